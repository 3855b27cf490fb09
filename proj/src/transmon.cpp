#include "skyrlab/transmon.hpp"

#include <cmath>
#include <limits>

#include "skyrlab/constants.hpp"
#include "skyrlab/eigen_sym.hpp"
#include "skyrlab/error.hpp"

namespace skyrlab {

TransmonParams transmon_from_config(const ExperimentConfig& cfg) {
  TransmonParams p;
  p.ej_sigma = cfg.num("transmon", "ej_sigma");
  p.ec = cfg.num("transmon", "ec");
  p.epsilon = 0.0;
  p.phi_e = 0.0;
  return p;
}

double ej_eff(const TransmonParams& p) {
  const double c = std::cos(constants::pi * p.phi_e);
  const double s = std::sin(constants::pi * p.phi_e);
  return p.ej_sigma * std::sqrt(c * c + p.epsilon * p.epsilon * s * s);
}

namespace {

DuffingLevels duffing_core(const TransmonParams& p, int n) {
  DuffingLevels d;
  const double ej = ej_eff(p);
  d.ej_over_ec = ej / p.ec;
  d.omega_p = std::sqrt(8.0 * p.ec * ej);
  d.f01 = d.omega_p - p.ec;
  d.anharmonicity = -p.ec;
  d.em.resize(n + 1);
  for (int m = 0; m <= n; m++) {
    d.em[m] = -ej + d.omega_p * (m + 0.5) - (p.ec / 12.0) * (6.0 * m * m + 6.0 * m + 3.0);
  }
  return d;
}

std::vector<double> charge_basis_levels(double ec, double ej, int n_levels, int cutoff) {
  const int dim = 2 * cutoff + 1;
  std::vector<double> h(static_cast<size_t>(dim) * dim, 0.0);
  for (int i = 0; i < dim; i++) {
    const double n = i - cutoff;
    h[static_cast<size_t>(i) * dim + i] = 4.0 * ec * n * n;
    if (i + 1 < dim) {
      h[static_cast<size_t>(i) * dim + i + 1] = -0.5 * ej;
      h[static_cast<size_t>(i + 1) * dim + i] = -0.5 * ej;
    }
  }
  auto eig = eigen_sym(h, dim);
  eig.values.resize(n_levels);
  return eig.values;
}

}  // namespace

DuffingLevels duffing_levels(const TransmonParams& p, int n) {
  auto d = duffing_core(p, n);
  if (d.ej_over_ec < 20.0) {
    throw Error(ErrorKind::OutOfRegime,
                "EJ_eff/EC = " + format_double(d.ej_over_ec) +
                    " is below the transmon floor of 20");
  }
  return d;
}

std::vector<double> exact_levels(double ec, double ej, int n_levels, int charge_cutoff) {
  if (ec <= 0 || ej < 0 || n_levels < 1) {
    throw Error(ErrorKind::ArgumentError, "exact_levels: need ec > 0, ej >= 0, n_levels >= 1");
  }
  const int floor_cutoff = 10 + static_cast<int>(std::ceil(std::sqrt(std::max(ej, 0.0) / ec)));
  int cutoff = charge_cutoff;
  if (cutoff == 0) {
    cutoff = floor_cutoff + 4;
  } else if (cutoff < floor_cutoff) {
    throw Error(ErrorKind::CutoffError,
                "charge_cutoff " + std::to_string(cutoff) + " is below the floor " +
                    std::to_string(floor_cutoff) + " for EJ/EC = " + format_double(ej / ec));
  }
  if (n_levels > 2 * cutoff) {
    throw Error(ErrorKind::ArgumentError, "exact_levels: n_levels exceeds basis size");
  }

  auto levels = charge_basis_levels(ec, ej, n_levels, cutoff);
  auto check = charge_basis_levels(ec, ej, n_levels, cutoff + 5);
  for (int k = 0; k < n_levels; k++) {
    double denom = std::max(std::fabs(levels[k]), ec);
    if (std::fabs(levels[k] - check[k]) / denom > 1e-10) {
      throw Error(ErrorKind::CutoffError,
                  "level " + std::to_string(k) + " unstable under cutoff+5; raise charge_cutoff");
    }
  }
  return levels;
}

std::vector<TransmonRow> f01_map(const TransmonParams& base, int phi_points, int eps_points,
                                 double eps_max, bool exact_column, int charge_cutoff) {
  if (phi_points < 2 || eps_points < 1) {
    throw Error(ErrorKind::ArgumentError, "f01_map: need phi_points >= 2, eps_points >= 1");
  }
  std::vector<TransmonRow> rows;
  rows.reserve(static_cast<size_t>(phi_points) * eps_points);
  for (int ie = 0; ie < eps_points; ie++) {
    const double eps = eps_points == 1 ? eps_max : eps_max * ie / (eps_points - 1);
    for (int ip = 0; ip < phi_points; ip++) {
      TransmonParams p = base;
      p.epsilon = eps;
      p.phi_e = static_cast<double>(ip) / phi_points;  // [0,1), periodic
      auto d = duffing_core(p, 2);
      TransmonRow row;
      row.phi_e = p.phi_e;
      row.epsilon = eps;
      row.ej_eff_ghz = ej_eff(p);
      row.f01_duffing_ghz = d.f01;
      row.out_of_regime = d.ej_over_ec < 20.0;
      row.f01_exact_ghz = std::numeric_limits<double>::quiet_NaN();
      if (exact_column) {
        try {
          auto lv = exact_levels(p.ec, row.ej_eff_ghz, 2, charge_cutoff);
          row.f01_exact_ghz = lv[1] - lv[0];
        } catch (const Error&) {
          // Deep out-of-regime corner (EJ_eff -> 0): leave the column NaN.
        }
      }
      rows.push_back(row);
    }
  }
  return rows;
}

DipoleEstimate dipole_estimate(double ms, double volume, double z, double loop_side) {
  if (z <= 0) {
    throw Error(ErrorKind::ArgumentError, "dipole_estimate: z must be > 0");
  }
  DipoleEstimate e;
  e.moment = ms * volume;
  e.z = z;
  e.b_z = constants::mu0 / (4.0 * constants::pi) * 2.0 * e.moment / (z * z * z);
  e.loop_side = loop_side;
  // Equivalent circle of the same area: pi R^2 = side^2.
  const double r2 = loop_side * loop_side / constants::pi;
  e.flux = constants::mu0 * e.moment * r2 / (2.0 * std::pow(r2 + z * z, 1.5));
  e.flux_quanta = e.flux / constants::phi0;
  return e;
}

double dipole_flux_square_numeric(double moment, double z, double loop_side) {
  // B_z of a z-directed dipole at height z over the plane:
  // B_z(rho) = mu0 m (2 z^2 - rho^2) / (4 pi (rho^2 + z^2)^{5/2}).
  // Composite Simpson over the square, 201 x 201 nodes.
  const int n = 200;  // even
  const double h = loop_side / n;
  auto weight = [&](int i) {
    if (i == 0 || i == n) return 1.0;
    return i % 2 == 1 ? 4.0 : 2.0;
  };
  double sum = 0.0;
  for (int i = 0; i <= n; i++) {
    const double x = -0.5 * loop_side + i * h;
    for (int j = 0; j <= n; j++) {
      const double y = -0.5 * loop_side + j * h;
      const double rho2 = x * x + y * y;
      const double r2 = rho2 + z * z;
      const double bz = constants::mu0 * moment * (2.0 * z * z - rho2) /
                        (4.0 * constants::pi * std::pow(r2, 2.5));
      sum += weight(i) * weight(j) * bz;
    }
  }
  return sum * h * h / 9.0;
}

}  // namespace skyrlab
