#pragma once

// Physical constants (SI). CODATA 2018 values.
namespace skyrlab::constants {

inline constexpr double mu0      = 1.25663706212e-6;  // vacuum permeability [T*m/A]
inline constexpr double gamma_e  = 1.76085963023e11;  // electron gyromagnetic ratio [rad/(s*T)]
inline constexpr double gamma0   = mu0 * gamma_e;     // gyromagnetic ratio in field units [m/(A*s)]
inline constexpr double hbar     = 1.054571817e-34;   // reduced Planck constant [J*s]
inline constexpr double h_planck = 6.62607015e-34;    // Planck constant [J*s]
inline constexpr double e_charge = 1.602176634e-19;   // elementary charge [C]
inline constexpr double mu_B     = 9.2740100783e-24;  // Bohr magneton [J/T]
inline constexpr double phi0     = h_planck / (2.0 * e_charge);  // flux quantum h/2e [Wb]
inline constexpr double pi       = 3.14159265358979323846;

}  // namespace skyrlab::constants
