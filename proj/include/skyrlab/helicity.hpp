#pragma once

#include <utility>
#include <vector>

#include "skyrlab/config.hpp"

namespace skyrlab {

// Helicity rotor H = kappa_z*Sz^2 - h_z*Sz + eta*K2*cos(2 phi0) - e_z*cos(phi0)
// in the integer Sz basis m in [-m_max, m_max]. Energies in units of kappa_z's
// declared base energy.
struct RotorParams {
  double kappa_z = 1.0;
  double h_z = 0.0;
  double k2 = 10.0;
  double e_z = 1.0;
  double eta = 1.0;
  int m_max = 40;
};

RotorParams rotor_from_config(const ExperimentConfig& cfg);

// Dense symmetric matrix, dimension 2*m_max+1, row-major.
// Diagonal kappa_z*m^2 - h_z*m; |m><m+-1| entries -e_z/2; |m><m+-2| entries
// +eta*k2/2 (cos phi0 and cos 2phi0 matrix elements are both 1/2).
std::vector<double> build_rotor_hamiltonian(const RotorParams& p);

struct RotorSpectrum {
  std::vector<double> energies;  // ascending, n_levels of them
  std::vector<double> vectors;   // vectors[k*dim ..] in the m basis
  int dim = 0;
  double omega01 = 0.0;
  double omega12 = 0.0;
  double anharmonicity = 0.0;    // omega12 - omega01
};

// Lowest n_levels eigenpairs. Truncation is validated by re-solving at
// m_max+10; a relative shift above 1e-8 raises TruncationError.
RotorSpectrum rotor_spectrum(const RotorParams& p, int n_levels);

struct AnharmonicityRow {
  double eta;
  double omega01;
  double omega12;
  double delta_omega;
};

// One spectrum per eta on a uniform [0,1] grid, shared m_max.
std::vector<AnharmonicityRow> anharmonicity_sweep(const RotorParams& base, int eta_points,
                                                  int n_levels);

// Potential V(phi0) = eta*k2*cos(2 phi0) - e_z*cos(phi0) sampled on a uniform
// grid over [0, 2pi), plus per-level phi intervals where E_n >= V (interval
// ends linearly interpolated between grid points).
struct LevelDiagram {
  std::vector<double> phi;
  std::vector<double> potential;
  std::vector<double> energies;
  std::vector<std::vector<std::pair<double, double>>> intervals;  // per level
};

LevelDiagram level_diagram(const RotorParams& p, int phi_points, int n_levels);

// phi intervals where energy >= V, for V sampled on a uniform closed grid
// over [0, 2pi). A segment wrapping through phi = 0 is reported with a
// negative start. Used by level_diagram; exposed for direct checks.
std::vector<std::pair<double, double>> allowed_intervals(const std::vector<double>& potential,
                                                         double energy);

}  // namespace skyrlab
