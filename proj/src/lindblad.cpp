#include "skyrlab/lindblad.hpp"

#include <cmath>

#include "skyrlab/error.hpp"

namespace skyrlab {

namespace {

using cd = std::complex<double>;

Rho2 add_scaled(const Rho2& a, const Rho2& b, double s) {
  return {a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]};
}

void validate_state(const Rho2& rho) {
  const double herm = std::abs(rho[1] - std::conj(rho[2]));
  const double diag_imag = std::abs(rho[0].imag()) + std::abs(rho[3].imag());
  if (herm > 1e-10 || diag_imag > 1e-10) {
    throw Error(ErrorKind::InvalidState, "rho0 is not Hermitian");
  }
  const double tr = rho[0].real() + rho[3].real();
  if (std::abs(tr - 1.0) > 1e-9) {
    throw Error(ErrorKind::InvalidState, "Tr rho0 = " + format_double(tr));
  }
  // 2x2 Hermitian eigenvalues: tr/2 +- sqrt((tr/2)^2 - det).
  const double det = (rho[0] * rho[3] - rho[1] * rho[2]).real();
  const double disc = std::sqrt(std::max(0.25 * tr * tr - det, 0.0));
  if (0.5 * tr - disc < -1e-9) {
    throw Error(ErrorKind::InvalidState, "rho0 has a negative eigenvalue");
  }
}

}  // namespace

QubitModel qubit_from_config(const ExperimentConfig& cfg) {
  QubitModel m;
  m.j_coupling = cfg.num("lindblad", "j_coupling");
  m.delta = cfg.num("lindblad", "delta");
  m.gamma_max = cfg.num("lindblad", "gamma_max");
  m.eta = cfg.num("lindblad", "eta");
  return m;
}

Rho2 ground_state() { return {cd(1, 0), cd(0, 0), cd(0, 0), cd(0, 0)}; }
Rho2 excited_state() { return {cd(0, 0), cd(0, 0), cd(0, 0), cd(1, 0)}; }

Rho2 lindblad_rhs(const QubitModel& m, const Rho2& rho) {
  // H = [[delta, J], [J, -delta]]
  const cd i(0, 1);
  const double J = m.j_coupling, dl = m.delta;
  const double gamma = m.eta * m.gamma_max;

  // Commutator [H, rho]
  const cd h00(dl, 0), h01(J, 0), h10(J, 0), h11(-dl, 0);
  Rho2 hr = {h00 * rho[0] + h01 * rho[2], h00 * rho[1] + h01 * rho[3],
             h10 * rho[0] + h11 * rho[2], h10 * rho[1] + h11 * rho[3]};
  Rho2 rh = {rho[0] * h00 + rho[1] * h10, rho[0] * h01 + rho[1] * h11,
             rho[2] * h00 + rho[3] * h10, rho[2] * h01 + rho[3] * h11};

  // C = sqrt(gamma)|0><1|: C rho C^dag = gamma * rho11 |0><0|;
  // {C^dag C, rho} couples only through rho11 and the coherences.
  Rho2 out;
  out[0] = -i * (hr[0] - rh[0]) + gamma * rho[3];
  out[1] = -i * (hr[1] - rh[1]) - 0.5 * gamma * rho[1];
  out[2] = -i * (hr[2] - rh[2]) - 0.5 * gamma * rho[2];
  out[3] = -i * (hr[3] - rh[3]) - gamma * rho[3];
  return out;
}

std::vector<Rho2> evolve(const QubitModel& m, const Rho2& rho0,
                         const std::vector<double>& t_grid) {
  validate_state(rho0);
  for (size_t k = 1; k < t_grid.size(); k++) {
    if (t_grid[k] <= t_grid[k - 1]) {
      throw Error(ErrorKind::ArgumentError, "t_grid must be strictly ascending");
    }
  }
  if (!t_grid.empty() && t_grid.front() < 0) {
    throw Error(ErrorKind::ArgumentError, "t_grid must be nonnegative");
  }

  const double t_end = t_grid.empty() ? 0.0 : t_grid.back();
  const double dt_max = t_end > 0 ? (t_end / 400.0) / 10.0 : 1.0;

  std::vector<Rho2> out;
  out.reserve(t_grid.size());
  Rho2 rho = rho0;
  double t = 0.0;
  for (double target : t_grid) {
    const double span = target - t;
    if (span > 0) {
      const int steps = static_cast<int>(std::ceil(span / dt_max));
      const double dt = span / steps;
      for (int s = 0; s < steps; s++) {
        Rho2 k1 = lindblad_rhs(m, rho);
        Rho2 k2 = lindblad_rhs(m, add_scaled(rho, k1, 0.5 * dt));
        Rho2 k3 = lindblad_rhs(m, add_scaled(rho, k2, 0.5 * dt));
        Rho2 k4 = lindblad_rhs(m, add_scaled(rho, k3, dt));
        for (int c = 0; c < 4; c++) {
          rho[c] += dt / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
      }
      t = target;
    }
    out.push_back(rho);
  }
  return out;
}

FidelityMaps fidelity_maps(const QubitModel& base, int eta_points, double t_max, int t_points) {
  if (eta_points < 2 || t_points < 2 || t_max <= 0) {
    throw Error(ErrorKind::ArgumentError, "fidelity_maps: bad grid shape");
  }
  FidelityMaps maps;
  maps.eta.resize(eta_points);
  maps.t.resize(t_points);
  for (int j = 0; j < t_points; j++) maps.t[j] = t_max * (j + 1) / t_points;
  maps.forward.resize(static_cast<size_t>(eta_points) * t_points);
  maps.reverse.resize(static_cast<size_t>(eta_points) * t_points);

  for (int ie = 0; ie < eta_points; ie++) {
    QubitModel m = base;
    m.eta = static_cast<double>(ie) / (eta_points - 1);
    maps.eta[ie] = m.eta;
    auto fwd = evolve(m, ground_state(), maps.t);
    auto rev = evolve(m, excited_state(), maps.t);
    for (int j = 0; j < t_points; j++) {
      maps.forward[static_cast<size_t>(ie) * t_points + j] = fwd[j][3].real();
      maps.reverse[static_cast<size_t>(ie) * t_points + j] = rev[j][0].real();
    }
  }
  return maps;
}

}  // namespace skyrlab
