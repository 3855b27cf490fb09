#pragma once

#include <vector>

#include "skyrlab/config.hpp"

namespace skyrlab {

// Flux-tunable SQUID transmon. All energies in GHz*h, so frequency formulas
// drop the division by h.
struct TransmonParams {
  double ej_sigma = 50.0;  // total Josephson energy [GHz*h]
  double ec = 0.2;         // charging energy [GHz*h]
  double epsilon = 0.0;    // junction imbalance, [0,1)
  double phi_e = 0.0;      // reduced external flux Phi_e/Phi0
};

TransmonParams transmon_from_config(const ExperimentConfig& cfg);

// E_J,eff = EJ_sigma * sqrt(cos^2(pi phi_e) + eps^2 sin^2(pi phi_e)).
// Same value as |cos|*sqrt(1 + eps^2 tan^2) but regular at phi_e = 1/2.
double ej_eff(const TransmonParams& p);

struct DuffingLevels {
  std::vector<double> em;     // E_m [GHz*h]
  double omega_p;             // sqrt(8 EC EJ_eff) [GHz*h]
  double f01;                 // omega_p - EC [GHz]
  double anharmonicity;       // E12 - E01 = -EC [GHz*h]
  double ej_over_ec;
};

// Perturbative ladder E_m = -EJ_eff + omega_p (m+1/2) - (EC/12)(6m^2+6m+3).
// Throws OutOfRegime for EJ_eff/EC < 20.
DuffingLevels duffing_levels(const TransmonParams& p, int n);

// Charge-basis diagonalization with offset charge 0: diagonal 4 EC n^2,
// off-diagonal -EJ/2, n in [-cutoff, cutoff]. cutoff = 0 picks
// 10 + ceil(sqrt(EJ/EC)) + 4 automatically. The returned levels are checked
// against cutoff+5; a relative shift above 1e-10 raises CutoffError.
std::vector<double> exact_levels(double ec, double ej, int n_levels, int charge_cutoff);

struct TransmonRow {
  double phi_e;
  double epsilon;
  double ej_eff_ghz;
  double f01_duffing_ghz;
  double f01_exact_ghz;  // NaN when the exact column is off
  bool out_of_regime;    // EJ_eff/EC < 20
};

// Grid sweep: phi_points uniform over [0,1), eps_points uniform over
// [0, eps_max]. OutOfRegime rows are flagged, never dropped; the exact
// column falls back to NaN where the cutoff check cannot stabilize.
std::vector<TransmonRow> f01_map(const TransmonParams& base, int phi_points, int eps_points,
                                 double eps_max, bool exact_column, int charge_cutoff);

struct DipoleEstimate {
  double moment;       // Ms * volume [A*m^2]
  double z;            // standoff [m]
  double b_z;          // axial dipole field [T]
  double loop_side;    // pickup loop side [m]
  double flux;         // through the equivalent-area circular loop [Wb]
  double flux_quanta;  // flux / Phi0
};

DipoleEstimate dipole_estimate(double ms, double volume, double z, double loop_side);

// Cross-check: flux through the actual square loop by 2D Simpson integration
// of the full dipole B_z over the loop area.
double dipole_flux_square_numeric(double moment, double z, double loop_side);

}  // namespace skyrlab
