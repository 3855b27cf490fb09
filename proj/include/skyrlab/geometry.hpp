#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "skyrlab/config.hpp"

namespace skyrlab {

enum class WideSide { Left, Right };

// Rasterized T-shaped track. The input arm and the output arm share the
// roof (y = track_width); the stem hangs down to y = 0 between them. A
// triangular wedge is removed from the output arm behind the junction so
// that the passage at the roof narrows to throat_width.
struct TrackGeometry {
  int nx = 0;
  int ny = 0;
  double cell_size = 0;            // m per cell, both axes
  std::vector<std::uint8_t> mask;  // nx*ny row-major in y, 1 = magnet

  // echoed parameters [m]
  double track_length = 0;
  double track_width = 0;
  double arm_width_in = 0;
  double arm_width_out = 0;
  double stem_width = 0;
  double throat_width = 0;
  double stem_x = 0;      // left edge of the stem column
  double junction_x = 0;  // stem_x + stem_width, where the output arm starts
  double wedge_slope = 1; // |dy/dx| of the removed wedge hypotenuse
  WideSide wide_side = WideSide::Right;

  bool inside(int i, int j) const {
    return mask[static_cast<std::size_t>(j) * nx + i] != 0;
  }
};

TrackGeometry build_t_track(const ExperimentConfig& cfg);

// Left-right reflection; swaps the widening side.
TrackGeometry mirror_x(const TrackGeometry& g);

// Euclidean distance [m] from each magnet cell center to the nearest vacuum
// cell center (the frame outside the grid counts as vacuum). Vacuum cells
// hold 0.
std::vector<double> distance_field(const TrackGeometry& g);

// Same metric but signed: positive inside the magnet, negative distance to
// the nearest magnet cell outside of it.
std::vector<double> signed_distance_field(const TrackGeometry& g);

struct ConfinementPotential {
  int nx = 0;
  int ny = 0;
  double cell_size = 0;  // m
  double u0 = 0;         // J
  double lambda = 0;     // m
  std::vector<double> u;      // J
  std::vector<double> du_dx;  // J/m
  std::vector<double> du_dy;  // J/m
};

// U(r) = U0 exp(-d(r)/lambda) with d the signed boundary distance, so U
// keeps rising outside the mask and trajectories are pushed back in.
ConfinementPotential build_potential(const TrackGeometry& g, double u0,
                                     double lambda);

void write_mask_pgm(const TrackGeometry& g, const std::string& path);
void write_potential_csv(const ConfinementPotential& p,
                         const std::string& path);

}  // namespace skyrlab
