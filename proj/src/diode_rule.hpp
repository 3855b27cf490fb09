#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>

#include "skyrlab/geometry.hpp"
#include "skyrlab/thiele.hpp"

namespace skyrlab {
namespace diode_rule {

// Injection point and decision planes shared by the Thiele and LLG drivers:
// inject at 12.5% / 87.5% of the track, classify against the 25% / 75%
// planes, approach ball around the throat center clipped under the
// injection distance.
struct Protocol {
  bool fwd = true;
  std::array<double, 2> start{0, 0};
  double plane_near = 0;
  double plane_far = 0;
  double throat_x = 0;
  double throat_y = 0;
  double approach_r = 0;
};

inline Protocol make(const TrackGeometry& g, DriveDirection dir) {
  Protocol p;
  p.fwd = dir == DriveDirection::Forward;
  const double L = g.track_length;
  const double W = g.track_width;

  // arm present at the starting side; swaps when the geometry is mirrored
  const bool input_on_left = g.wide_side == WideSide::Right;
  const double left_w = input_on_left ? g.arm_width_in : g.arm_width_out;
  const double right_w = input_on_left ? g.arm_width_out : g.arm_width_in;

  p.start = {p.fwd ? 0.125 * L : 0.875 * L,
             W - 0.5 * (p.fwd ? left_w : right_w)};
  p.plane_near = p.fwd ? 0.25 * L : 0.75 * L;
  p.plane_far = p.fwd ? 0.75 * L : 0.25 * L;
  p.throat_x = input_on_left ? g.junction_x : g.stem_x;
  p.throat_y = W - 0.5 * g.throat_width;
  // one arm width, clipped under the injection distance so a run that never
  // leaves the injection neighborhood cannot register an approach
  const double d0 =
      std::hypot(p.start[0] - p.throat_x, p.start[1] - p.throat_y);
  p.approach_r = std::min(g.arm_width_in, 0.9 * d0);
  return p;
}

// Stateful classifier fed with core positions; fires Transmitted on the far
// plane, Reflected on the near plane moving away after an approach.
struct Monitor {
  Protocol p;
  bool approached = false;
  double min_throat_dist = std::numeric_limits<double>::infinity();

  explicit Monitor(const Protocol& proto) : p(proto) {}

  std::optional<DiodeClass> feed(const std::array<double, 2>& r,
                                 const std::array<double, 2>& v) {
    const double dx = r[0] - p.throat_x, dy = r[1] - p.throat_y;
    const double d = std::sqrt(dx * dx + dy * dy);
    min_throat_dist = std::min(min_throat_dist, d);
    if (d < p.approach_r) approached = true;

    const bool crossed_far = p.fwd ? r[0] >= p.plane_far : r[0] <= p.plane_far;
    if (crossed_far) return DiodeClass::Transmitted;
    const bool back_out = p.fwd ? (r[0] <= p.plane_near && v[0] < 0)
                                : (r[0] >= p.plane_near && v[0] > 0);
    if (approached && back_out) return DiodeClass::Reflected;
    return std::nullopt;
  }
};

}  // namespace diode_rule
}  // namespace skyrlab
