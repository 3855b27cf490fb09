#include "skyrlab/helicity.hpp"

#include <cmath>

#include "skyrlab/constants.hpp"
#include "skyrlab/eigen_sym.hpp"
#include "skyrlab/error.hpp"

namespace skyrlab {

RotorParams rotor_from_config(const ExperimentConfig& cfg) {
  RotorParams p;
  p.kappa_z = cfg.num("rotor", "kappa_z");
  p.h_z = cfg.num("rotor", "h_z");
  p.k2 = cfg.num("rotor", "k2");
  p.e_z = cfg.num("rotor", "e_z");
  p.eta = cfg.num("rotor", "eta");
  p.m_max = static_cast<int>(cfg.integer("rotor", "m_max"));
  return p;
}

std::vector<double> build_rotor_hamiltonian(const RotorParams& p) {
  if (p.m_max < 10) {
    throw Error(ErrorKind::ArgumentError, "rotor m_max must be >= 10");
  }
  const int dim = 2 * p.m_max + 1;
  std::vector<double> h(static_cast<size_t>(dim) * dim, 0.0);
  const double k2_eff = p.eta * p.k2;
  for (int i = 0; i < dim; i++) {
    const double m = i - p.m_max;
    h[static_cast<size_t>(i) * dim + i] = p.kappa_z * m * m - p.h_z * m;
    if (i + 1 < dim) {
      h[static_cast<size_t>(i) * dim + i + 1] = -0.5 * p.e_z;
      h[static_cast<size_t>(i + 1) * dim + i] = -0.5 * p.e_z;
    }
    if (i + 2 < dim) {
      h[static_cast<size_t>(i) * dim + i + 2] = 0.5 * k2_eff;
      h[static_cast<size_t>(i + 2) * dim + i] = 0.5 * k2_eff;
    }
  }
  return h;
}

namespace {

std::vector<double> lowest_energies(const RotorParams& p, int n_levels) {
  auto h = build_rotor_hamiltonian(p);
  const int dim = 2 * p.m_max + 1;
  auto eig = eigen_sym(h, dim);
  eig.values.resize(n_levels);
  return eig.values;
}

}  // namespace

RotorSpectrum rotor_spectrum(const RotorParams& p, int n_levels) {
  const int dim = 2 * p.m_max + 1;
  if (n_levels < 3 || n_levels > 2 * p.m_max - 3) {
    throw Error(ErrorKind::ArgumentError,
                "n_levels must lie in [3, 2*m_max-3], got " + std::to_string(n_levels));
  }
  auto h = build_rotor_hamiltonian(p);
  auto eig = eigen_sym(h, dim);

  // Truncation control: the requested levels must be insensitive to widening
  // the basis. Relative scale is max(|E|, kappa_z), kappa_z being the unit.
  RotorParams wider = p;
  wider.m_max += 10;
  auto check = lowest_energies(wider, n_levels);
  for (int k = 0; k < n_levels; k++) {
    double denom = std::max(std::fabs(eig.values[k]), p.kappa_z);
    double shift = std::fabs(eig.values[k] - check[k]) / denom;
    if (shift > 1e-8) {
      throw Error(ErrorKind::TruncationError,
                  "level " + std::to_string(k) + " shifts by " + format_double(shift) +
                      " (relative) under m_max+10; raise m_max");
    }
  }

  RotorSpectrum s;
  s.dim = dim;
  s.energies.assign(eig.values.begin(), eig.values.begin() + n_levels);
  s.vectors.assign(eig.vectors.begin(),
                   eig.vectors.begin() + static_cast<size_t>(n_levels) * dim);
  s.omega01 = s.energies[1] - s.energies[0];
  s.omega12 = s.energies[2] - s.energies[1];
  s.anharmonicity = s.omega12 - s.omega01;
  return s;
}

std::vector<AnharmonicityRow> anharmonicity_sweep(const RotorParams& base, int eta_points,
                                                  int n_levels) {
  if (eta_points < 2) {
    throw Error(ErrorKind::ArgumentError, "eta_points must be >= 2");
  }
  std::vector<AnharmonicityRow> rows;
  rows.reserve(eta_points);
  for (int i = 0; i < eta_points; i++) {
    RotorParams p = base;
    p.eta = static_cast<double>(i) / (eta_points - 1);
    auto s = rotor_spectrum(p, n_levels);
    rows.push_back({p.eta, s.omega01, s.omega12, s.anharmonicity});
  }
  return rows;
}

std::vector<std::pair<double, double>> allowed_intervals(const std::vector<double>& potential,
                                                         double energy) {
  const int n = static_cast<int>(potential.size());
  if (n < 8) {
    throw Error(ErrorKind::ArgumentError, "allowed_intervals: need at least 8 samples");
  }
  auto v_at = [&](int i) { return potential[i % n]; };
  auto phi_at = [&](int i) { return 2.0 * constants::pi * i / n; };

  std::vector<std::pair<double, double>> segs;
  bool inside = energy >= v_at(0);
  double start = 0.0;
  for (int i = 0; i < n; i++) {
    double f0 = energy - v_at(i);
    double f1 = energy - v_at(i + 1);
    if (!inside && f1 >= 0) {
      double t = f1 != f0 ? -f0 / (f1 - f0) : 0.0;
      start = phi_at(i) + t * (phi_at(i + 1) - phi_at(i));
      inside = true;
    } else if (inside && f1 < 0) {
      double t = f1 != f0 ? -f0 / (f1 - f0) : 0.0;
      double end = phi_at(i) + t * (phi_at(i + 1) - phi_at(i));
      segs.emplace_back(start, end);
      inside = false;
    }
  }
  if (inside) {
    // Still inside after the full circle: either the whole circle is
    // allowed, or the final segment wraps through phi = 0 and merges with
    // the one that began there (start shifted by -2pi keeps it contiguous).
    if (!segs.empty() && segs.front().first == 0.0) {
      segs.front().first = start - 2.0 * constants::pi;
    } else {
      segs.emplace_back(start, 2.0 * constants::pi);
    }
  }
  return segs;
}

LevelDiagram level_diagram(const RotorParams& p, int phi_points, int n_levels) {
  if (phi_points < 8) {
    throw Error(ErrorKind::ArgumentError, "phi_points must be >= 8");
  }
  auto s = rotor_spectrum(p, n_levels);

  LevelDiagram d;
  d.energies = s.energies;
  d.phi.resize(phi_points);
  d.potential.resize(phi_points);
  const double k2_eff = p.eta * p.k2;
  for (int i = 0; i < phi_points; i++) {
    double phi = 2.0 * constants::pi * i / phi_points;
    d.phi[i] = phi;
    d.potential[i] = k2_eff * std::cos(2.0 * phi) - p.e_z * std::cos(phi);
  }

  d.intervals.resize(n_levels);
  for (int lvl = 0; lvl < n_levels; lvl++) {
    d.intervals[lvl] = allowed_intervals(d.potential, s.energies[lvl]);
  }
  return d;
}

}  // namespace skyrlab
