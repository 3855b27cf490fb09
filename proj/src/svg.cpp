#include "skyrlab/svg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

#include "skyrlab/error.hpp"

namespace skyrlab {
namespace {

// Fixed canvas; the spec'd artifact size.
constexpr double kW = 800;
constexpr double kH = 600;

// to_chars keeps the output locale-independent, so rendered bytes are
// reproducible across hosts.
std::string fmt(double v, int precision, std::chars_format f) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, f, precision);
  return std::string(buf, res.ptr);
}

std::string px(double v) { return fmt(v, 2, std::chars_format::fixed); }
std::string lbl(double v) { return fmt(v, 6, std::chars_format::general); }

// Three-stop perceptual-ish ramp (dark violet, teal, yellow).
std::string ramp_color(double t) {
  static const double stops[3][3] = {
      {68, 1, 84}, {33, 145, 140}, {253, 231, 37}};
  t = std::clamp(t, 0.0, 1.0);
  const int lo = t < 0.5 ? 0 : 1;
  const double u = (t - 0.5 * lo) * 2.0;
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x",
                (int)std::lround(stops[lo][0] + u * (stops[lo + 1][0] - stops[lo][0])),
                (int)std::lround(stops[lo][1] + u * (stops[lo + 1][1] - stops[lo][1])),
                (int)std::lround(stops[lo][2] + u * (stops[lo + 1][2] - stops[lo][2])));
  return buf;
}

void open_doc(std::string& s) {
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 600\" "
       "width=\"800\" height=\"600\">\n";
  s += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"#ffffff\"/>\n";
}

void text(std::string& s, double x, double y, const std::string& body,
          const char* anchor = "middle", int size = 14,
          const char* extra = "") {
  s += "<text x=\"" + px(x) + "\" y=\"" + px(y) + "\" font-family=\"sans-serif\" font-size=\"" +
       std::to_string(size) + "\" text-anchor=\"" + anchor + "\"" + extra + ">" +
       body + "</text>\n";
}

void frame(std::string& s, double x, double y, double w, double h) {
  s += "<rect x=\"" + px(x) + "\" y=\"" + px(y) + "\" width=\"" + px(w) +
       "\" height=\"" + px(h) + "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
}

// Axis extreme labels plus centered axis titles around one plot frame.
void axes(std::string& s, double x, double y, double w, double h, double x0,
          double x1, double y0, double y1, const std::string& xlabel,
          const std::string& ylabel) {
  frame(s, x, y, w, h);
  text(s, x, y + h + 16, lbl(x0), "start", 11);
  text(s, x + w, y + h + 16, lbl(x1), "end", 11);
  text(s, x - 6, y + h, lbl(y0), "end", 11);
  text(s, x - 6, y + 10, lbl(y1), "end", 11);
  text(s, x + w / 2, y + h + 34, xlabel, "middle", 13);
  std::string rot = " transform=\"rotate(-90 " + px(x - 48) + " " + px(y + h / 2) + ")\"";
  text(s, x - 48, y + h / 2, ylabel, "middle", 13, rot.c_str());
}

}  // namespace

std::string svg_heatmap(const std::vector<HeatPanel>& panels,
                        const std::string& xlabel, const std::string& ylabel) {
  if (panels.empty()) throw Error(ErrorKind::EmptyTable, "no heatmap panels");
  double vmin = std::numeric_limits<double>::infinity();
  double vmax = -vmin;
  for (const auto& p : panels) {
    if (p.nx <= 0 || p.ny <= 0 || p.v.empty()) {
      throw Error(ErrorKind::EmptyTable, "empty heatmap panel");
    }
    if ((std::size_t)p.nx * p.ny != p.v.size()) {
      throw Error(ErrorKind::ArgumentError, "panel grid does not match value count");
    }
    for (double v : p.v) {
      if (std::isfinite(v)) {
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
      }
    }
  }
  if (!(vmin <= vmax)) throw Error(ErrorKind::EmptyTable, "no finite heatmap values");
  const double span = vmax > vmin ? vmax - vmin : 1.0;

  const double left = 80, right = 110, top = 46, bottom = 60, gap = 54;
  const int n = (int)panels.size();
  const double pw = (kW - left - right - gap * (n - 1)) / n;
  const double ph = kH - top - bottom;

  std::string s;
  open_doc(s);
  for (int k = 0; k < n; ++k) {
    const HeatPanel& p = panels[k];
    const double ox = left + k * (pw + gap);
    if (!p.title.empty()) text(s, ox + pw / 2, top - 14, p.title, "middle", 15);
    const double cw = pw / p.nx, ch = ph / p.ny;
    for (int j = 0; j < p.ny; ++j) {
      for (int i = 0; i < p.nx; ++i) {
        const double v = p.v[(std::size_t)j * p.nx + i];
        const std::string color =
            std::isfinite(v) ? ramp_color((v - vmin) / span) : std::string("#7f7f7f");
        // rows drawn bottom-up; pad 0.4px so adjacent cells do not leave seams
        s += "<rect x=\"" + px(ox + i * cw) + "\" y=\"" +
             px(top + ph - (j + 1) * ch) + "\" width=\"" + px(cw + 0.4) +
             "\" height=\"" + px(ch + 0.4) + "\" fill=\"" + color + "\"/>\n";
      }
    }
    axes(s, ox, top, pw, ph, p.x0, p.x1, p.y0, p.y1, xlabel, ylabel);
  }

  // color bar with the printed range
  const double bx = kW - right + 26, bw = 18;
  const int steps = 64;
  for (int i = 0; i < steps; ++i) {
    s += "<rect x=\"" + px(bx) + "\" y=\"" + px(top + ph - (i + 1) * ph / steps) +
         "\" width=\"" + px(bw) + "\" height=\"" + px(ph / steps + 0.4) +
         "\" fill=\"" + ramp_color((i + 0.5) / steps) + "\"/>\n";
  }
  frame(s, bx, top, bw, ph);
  text(s, bx + bw + 5, top + 10, "max=" + lbl(vmax), "start", 11);
  text(s, bx + bw + 5, top + ph, "min=" + lbl(vmin), "start", 11);
  s += "</svg>\n";
  return s;
}

std::string svg_lines(const std::vector<LineSeries>& series,
                      const std::string& title, const std::string& xlabel,
                      const std::string& ylabel) {
  static const char* palette[6] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#9467bd", "#ff7f0e", "#8c564b"};
  if (series.empty()) throw Error(ErrorKind::EmptyTable, "no line series");
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0;
  double y0 = x0, y1 = -x0;
  for (const auto& sr : series) {
    if (sr.x.size() != sr.y.size()) {
      throw Error(ErrorKind::ArgumentError, "series x/y length mismatch");
    }
    for (std::size_t i = 0; i < sr.x.size(); ++i) {
      if (std::isfinite(sr.x[i]) && std::isfinite(sr.y[i])) {
        x0 = std::min(x0, sr.x[i]);
        x1 = std::max(x1, sr.x[i]);
        y0 = std::min(y0, sr.y[i]);
        y1 = std::max(y1, sr.y[i]);
      }
    }
  }
  if (!(x0 <= x1)) throw Error(ErrorKind::EmptyTable, "no finite points");
  if (x1 == x0) { x0 -= 0.5; x1 += 0.5; }
  if (y1 == y0) { y0 -= 0.5; y1 += 0.5; }
  const double yr = (y1 - y0) * 0.05;  // headroom so curves clear the frame
  y0 -= yr;
  y1 += yr;

  const double left = 80, right = 40, top = 46, bottom = 60;
  const double pw = kW - left - right, ph = kH - top - bottom;
  std::string s;
  open_doc(s);
  if (!title.empty()) text(s, left + pw / 2, top - 14, title, "middle", 15);

  auto X = [&](double v) { return left + (v - x0) / (x1 - x0) * pw; };
  auto Y = [&](double v) { return top + ph - (v - y0) / (y1 - y0) * ph; };

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& sr = series[k];
    const char* color = palette[k % 6];
    std::string pts;
    auto flush = [&]() {
      if (pts.empty()) return;
      s += "<polyline fill=\"none\" stroke=\"";
      s += color;
      s += "\" stroke-width=\"1.8\" points=\"" + pts + "\"/>\n";
      pts.clear();
    };
    for (std::size_t i = 0; i < sr.x.size(); ++i) {
      if (!(std::isfinite(sr.x[i]) && std::isfinite(sr.y[i]))) {
        flush();
        continue;
      }
      if (!pts.empty()) pts += ' ';
      pts += px(X(sr.x[i])) + "," + px(Y(sr.y[i]));
    }
    flush();
    if (!sr.label.empty()) {
      const double ly = top + 16 + 18 * (double)k;
      s += "<line x1=\"" + px(left + pw - 150) + "\" y1=\"" + px(ly - 4) +
           "\" x2=\"" + px(left + pw - 122) + "\" y2=\"" + px(ly - 4) +
           "\" stroke=\"" + color + "\" stroke-width=\"1.8\"/>\n";
      text(s, left + pw - 116, ly, sr.label, "start", 12);
    }
  }
  axes(s, left, top, pw, ph, x0, x1, y0, y1, xlabel, ylabel);
  s += "</svg>\n";
  return s;
}

}  // namespace skyrlab
