#pragma once

#include <array>
#include <complex>
#include <vector>

#include "skyrlab/config.hpp"

namespace skyrlab {

// Two-level open system. H = J sigma_x + delta sigma_z; collapse operator
// C = sqrt(eta*gamma_max) |0><1|. Energies and rates in units of the base
// energy (time in its inverse), matching the 1/J axis convention.
struct QubitModel {
  double j_coupling = 1.0;
  double delta = 0.0;
  double gamma_max = 1.0;
  double eta = 1.0;
};

QubitModel qubit_from_config(const ExperimentConfig& cfg);

using Rho2 = std::array<std::complex<double>, 4>;  // row-major 2x2

Rho2 ground_state();   // |0><0|
Rho2 excited_state();  // |1><1|

// Lindblad RHS: -i[H,rho] + C rho C^dag - (1/2){C^dag C, rho}.
Rho2 lindblad_rhs(const QubitModel& m, const Rho2& rho);

// RK4 with fixed substeps of at most (t_max/400)/10 between samples;
// returns rho at every point of the ascending t_grid. rho0 must be
// Hermitian, unit trace, positive (InvalidState otherwise).
std::vector<Rho2> evolve(const QubitModel& m, const Rho2& rho0,
                         const std::vector<double>& t_grid);

struct FidelityMaps {
  std::vector<double> eta;      // eta_points values on [0,1]
  std::vector<double> t;        // t_points values, (0, t_max]
  std::vector<double> forward;  // row-major [i_eta * t_points + i_t]
  std::vector<double> reverse;
};

// forward = <1|rho(t)|1> starting from |0><0|; reverse = <0|rho(t)|0>
// starting from |1><1|.
FidelityMaps fidelity_maps(const QubitModel& base, int eta_points, double t_max, int t_points);

}  // namespace skyrlab
