#pragma once

#include <string>
#include <vector>

namespace skyrlab {

// One heatmap panel: v is row-major (ny rows of nx values), drawn with the
// first row at the bottom. Axis ranges are the physical extents of the grid.
struct HeatPanel {
  int nx = 0;
  int ny = 0;
  double x0 = 0, x1 = 1;
  double y0 = 0, y1 = 1;
  std::vector<double> v;
  std::string title;
};

struct LineSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::string label;
};

// Renders one or more heatmap panels side by side into a self-contained
// 800x600 SVG. A shared linear color map spans the finite range of all
// panels and is printed next to the color bar; NaN cells draw grey.
// Throws EmptyTable when there is nothing to draw and ArgumentError when a
// panel's value count does not match its grid.
std::string svg_heatmap(const std::vector<HeatPanel>& panels,
                        const std::string& xlabel, const std::string& ylabel);

// Renders line series into a self-contained 800x600 SVG with a legend.
// Non-finite points break the line. Throws EmptyTable when no series has a
// finite point and ArgumentError on x/y length mismatch.
std::string svg_lines(const std::vector<LineSeries>& series,
                      const std::string& title, const std::string& xlabel,
                      const std::string& ylabel);

}  // namespace skyrlab
