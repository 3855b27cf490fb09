#pragma once

#include <array>
#include <string>
#include <vector>

#include "skyrlab/config.hpp"
#include "skyrlab/geometry.hpp"

namespace skyrlab {

// Rigid-core collective coordinates: G x v + alpha_g * D v = F_dl - grad U,
// massless, so v is solved algebraically from r at every evaluation point.
struct ThieleParams {
  double g_gyro = 0;    // gyrocoupling [kg/s], sign follows the core charge Q
  double d_diss = 0;    // dissipative tensor diagonal [kg/s]
  double alpha_g = 0;   // damping in the alpha*D*v term
  std::array<double, 2> f_dl{0, 0};  // damping-like drive force [N]
  double force_per_current = 0;      // |F_dl| / J [N per A/m^2], for sweeps
};

struct ThieleState {
  std::array<double, 2> r{0, 0};  // m
  std::array<double, 2> v{0, 0};  // m/s
  double t = 0;                   // s
};

enum class DiodeClass { Transmitted, Reflected, Stalled, Annihilated };

const char* to_string(DiodeClass c);

struct DiodeOutcome {
  DiodeClass cls = DiodeClass::Stalled;
  double time = 0;           // transit or return time [s]; NaN when Stalled
  bool left_domain = false;  // trajectory escaped the raster, forced Reflected
  double min_throat_dist = 0;         // closest approach to the throat [m]
  std::vector<ThieleState> trajectory;  // subsampled
  // parallel to trajectory, filled by the LLG driver; empty from Thiele
  // runs. Charge is referenced to the relaxed skyrmion-free track, so a
  // healthy skyrmion reads -1 regardless of the mask's edge twist.
  std::vector<double> charge;
  std::vector<double> energy;  // J
};

// G and d_diss from config with 0 meaning the shape defaults
// G = 4*pi*Q*Ms*t/gamma_e (Q = -1) and d_diss = |G|*pi^2*R/(8*delta_dw);
// the drive is the damping-like SOT force pi^2*R*hbar*theta_sh*J/(4e).
ThieleParams thiele_from_config(const ExperimentConfig& cfg);

// Closed-form flat-potential velocity. Throws SingularMobility when both
// G and alpha_g*d_diss vanish.
std::array<double, 2> steady_velocity(const ThieleParams& p,
                                      const std::array<double, 2>& f);

// Fixed-step RK4 on r' = v(r) with bilinearly interpolated grad U.
// Throws LeftDomain when r exits the raster bounding box.
std::vector<ThieleState> integrate(const ThieleParams& p,
                                   const ConfinementPotential& pot,
                                   const std::array<double, 2>& r0, double T,
                                   double dt);

enum class DriveDirection { Forward, Reverse };

// Injects at 12.5% (Forward) or 87.5% (Reverse) of the track, drives along
// +x / -x, and classifies against the 25% / 75% planes: Transmitted when the
// core crosses the far plane, Reflected when it re-crosses the near plane
// moving away after approaching within one input-arm width of the throat
// (clipped under the injection distance), Stalled at timeout. A LeftDomain
// escape maps to Reflected with the flag.
DiodeOutcome classify_diode(const ThieleParams& p,
                            const ConfinementPotential& pot,
                            const TrackGeometry& g, DriveDirection dir,
                            double timeout, double dt = 1e-13);

struct SweepRow {
  double j = 0;  // A/m^2
  DiodeClass forward_cls = DiodeClass::Stalled;
  DiodeClass reverse_cls = DiodeClass::Stalled;
  double tau_fwd = 0;  // s, NaN unless Transmitted
  double tau_rev = 0;  // s, NaN unless Reflected
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double j_min = 0;  // first J of the contiguous (Transmitted, Reflected) run
  double j_max = 0;  // last J of that run
};

// Throws EmptyWindow when no J produces (Transmitted, Reflected); requires
// ascending j_values.
SweepResult efficiency_sweep(const ThieleParams& p,
                             const ConfinementPotential& pot,
                             const TrackGeometry& g,
                             const std::vector<double>& j_values,
                             double timeout, double dt = 1e-13);

}  // namespace skyrlab
