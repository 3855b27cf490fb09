#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "skyrlab/config.hpp"
#include "skyrlab/constants.hpp"
#include "skyrlab/error.hpp"
#include "skyrlab/geometry.hpp"
#include "skyrlab/params.hpp"
#include "skyrlab/thiele.hpp"

using namespace skyrlab;

namespace {

ExperimentConfig defaults() { return parse_config("[material]\n"); }

struct Baseline {
  ExperimentConfig cfg;
  TrackGeometry g;
  ConfinementPotential pot;
  ThieleParams p;
};

Baseline baseline() {
  Baseline b{defaults(), {}, {}, {}};
  b.g = build_t_track(b.cfg);
  double lambda = derive_scales(material_from_config(b.cfg)).delta_dw;
  b.pot = build_potential(b.g, b.cfg.num("geometry", "potential_u0"), lambda);
  b.p = thiele_from_config(b.cfg);
  return b;
}

// constant-zero landscape on a 50 nm box
ConfinementPotential flat_potential(int n = 50) {
  ConfinementPotential pot;
  pot.nx = n;
  pot.ny = n;
  pot.cell_size = 1e-9;
  pot.u0 = 0;
  pot.lambda = 1e-9;
  pot.u.assign(std::size_t(n) * n, 0.0);
  pot.du_dx.assign(std::size_t(n) * n, 0.0);
  pot.du_dy.assign(std::size_t(n) * n, 0.0);
  return pot;
}

// U = k/2 |r - c|^2 with exact linear gradient arrays, so the bilinear
// sampler reproduces grad U without interpolation error
ConfinementPotential harmonic_potential(int n, double h, double k,
                                        std::array<double, 2> c) {
  ConfinementPotential pot;
  pot.nx = n;
  pot.ny = n;
  pot.cell_size = h;
  pot.u0 = 0;
  pot.lambda = h;
  pot.u.resize(std::size_t(n) * n);
  pot.du_dx.resize(std::size_t(n) * n);
  pot.du_dy.resize(std::size_t(n) * n);
  for (int j = 0; j < n; j++)
    for (int i = 0; i < n; i++) {
      double x = (i + 0.5) * h - c[0];
      double y = (j + 0.5) * h - c[1];
      std::size_t idx = std::size_t(j) * n + i;
      pot.u[idx] = 0.5 * k * (x * x + y * y);
      pot.du_dx[idx] = k * x;
      pot.du_dy[idx] = k * y;
    }
  return pot;
}

double lerp_u(const ConfinementPotential& pot, double x, double y) {
  double u = x / pot.cell_size - 0.5;
  double v = y / pot.cell_size - 0.5;
  int i0 = std::max(0, std::min(pot.nx - 2, int(std::floor(u))));
  int j0 = std::max(0, std::min(pot.ny - 2, int(std::floor(v))));
  double fx = std::min(1.0, std::max(0.0, u - i0));
  double fy = std::min(1.0, std::max(0.0, v - j0));
  std::size_t c = std::size_t(j0) * pot.nx + i0;
  return (1 - fy) * ((1 - fx) * pot.u[c] + fx * pot.u[c + 1]) +
         fy * ((1 - fx) * pot.u[c + pot.nx] + fx * pot.u[c + pot.nx + 1]);
}

}  // namespace

TEST_CASE("config mapping produces the shape-default tensors") {
  auto p = thiele_from_config(defaults());
  namespace k = constants;
  double g_expect = -4.0 * k::pi * 580e3 * 1e-9 / k::gamma_e;
  double delta_dw = std::sqrt(15e-12 / 0.8e6);
  double d_expect = std::fabs(g_expect) * k::pi * k::pi * 6.5e-9 /
                    (8.0 * delta_dw);
  double fpc = k::pi * k::pi * 6.5e-9 * k::hbar * 0.10 / (4.0 * k::e_charge);
  CHECK(p.g_gyro == doctest::Approx(g_expect).epsilon(1e-12).scale(0.0));
  CHECK(p.d_diss == doctest::Approx(d_expect).epsilon(1e-12).scale(0.0));
  CHECK(p.alpha_g == doctest::Approx(0.1));
  CHECK(p.force_per_current == doctest::Approx(fpc).epsilon(1e-12).scale(0.0));
  CHECK(p.f_dl[0] == doctest::Approx(fpc * 0.2e12).epsilon(1e-12).scale(0.0));
  CHECK(p.f_dl[1] == 0.0);
  CHECK(p.d_diss > 0.0);
  CHECK(p.g_gyro != 0.0);

  auto q = thiele_from_config(parse_config(
      "[material]\n[thiele]\ng_gyro = 1e-14\nd_diss = 2e-14\n"));
  CHECK(q.g_gyro == doctest::Approx(1e-14).epsilon(1e-12).scale(0.0));
  CHECK(q.d_diss == doctest::Approx(2e-14).epsilon(1e-12).scale(0.0));
}

TEST_CASE("steady velocity solves the 2x2 mobility system") {
  auto p = thiele_from_config(defaults());

  auto v0 = steady_velocity(p, {0.0, 0.0});
  CHECK(v0[0] == 0.0);
  CHECK(v0[1] == 0.0);

  auto v = steady_velocity(p, {p.f_dl[0], 0.0});
  CHECK(v[1] / v[0] ==
        doctest::Approx(-p.g_gyro / (p.alpha_g * p.d_diss)).epsilon(1e-12));

  ThieleParams flipped = p;
  flipped.g_gyro = -p.g_gyro;
  auto vf = steady_velocity(flipped, {p.f_dl[0], 0.0});
  CHECK(vf[0] == doctest::Approx(v[0]).epsilon(1e-14).scale(0.0));
  CHECK(vf[1] == doctest::Approx(-v[1]).epsilon(1e-14).scale(0.0));

  // general F against Cramer's rule on [ad, -G; G, ad] v = F
  std::array<double, 2> f{3.1e-13, -1.7e-13};
  auto w = steady_velocity(p, f);
  double ad = p.alpha_g * p.d_diss;
  double det = ad * ad + p.g_gyro * p.g_gyro;
  CHECK(ad * w[0] - p.g_gyro * w[1] == doctest::Approx(f[0]).epsilon(1e-12).scale(0.0));
  CHECK(p.g_gyro * w[0] + ad * w[1] == doctest::Approx(f[1]).epsilon(1e-12).scale(0.0));
  CHECK(std::hypot(w[0], w[1]) ==
        doctest::Approx(std::hypot(f[0], f[1]) / std::sqrt(det)).epsilon(1e-12).scale(0.0));

  ThieleParams dead;
  dead.g_gyro = 0;
  dead.d_diss = 1;
  dead.alpha_g = 0;
  try {
    steady_velocity(dead, {1.0, 0.0});
    FAIL("expected SingularMobility");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularMobility);
  }
}

TEST_CASE("channel centerline is an equilibrium") {
  auto b = baseline();
  ThieleParams p = b.p;
  p.f_dl = {0.0, 0.0};
  auto traj = integrate(p, b.pot, {60e-9, 75e-9}, 10e-9, 1e-12);
  auto& last = traj.back();
  double disp = std::hypot(last.r[0] - 60e-9, last.r[1] - 75e-9);
  CHECK(disp < 1e-12);
}

TEST_CASE("flat region reproduces the closed-form drift") {
  auto pot = flat_potential();
  auto p = thiele_from_config(defaults());
  p.f_dl = {3e-13, -1e-13};
  auto vs = steady_velocity(p, p.f_dl);
  auto traj = integrate(p, pot, {25e-9, 25e-9}, 1e-10, 1e-12);
  for (const auto& s : traj) {
    CHECK(s.v[0] == doctest::Approx(vs[0]).epsilon(1e-10).scale(0.0));
    CHECK(s.v[1] == doctest::Approx(vs[1]).epsilon(1e-10).scale(0.0));
  }
  auto& last = traj.back();
  CHECK(last.r[0] == doctest::Approx(25e-9 + vs[0] * 1e-10).epsilon(1e-10).scale(0.0));
  CHECK(last.r[1] == doctest::Approx(25e-9 + vs[1] * 1e-10).epsilon(1e-10).scale(0.0));
}

TEST_CASE("harmonic well gyrates against the linear-ODE oracle") {
  auto p = thiele_from_config(defaults());
  p.f_dl = {0.0, 0.0};
  const double k_spring = 2.6e-3;
  const std::array<double, 2> c{100e-9, 100e-9};
  auto pot = harmonic_potential(200, 1e-9, k_spring, c);

  const double dt = 1e-13, T = 5e-10;
  auto traj = integrate(p, pot, {c[0] + 20e-9, c[1]}, T, dt);

  // dw/dt = -k (ad - iG)/det w  for w = (x-cx) + i(y-cy)
  double ad = p.alpha_g * p.d_diss;
  double det = ad * ad + p.g_gyro * p.g_gyro;
  std::complex<double> lam(-k_spring * ad / det, k_spring * p.g_gyro / det);
  std::complex<double> w0(20e-9, 0.0);

  double prev_radius = std::abs(w0);
  const double tol = 1e-7 * std::abs(w0);
  for (const auto& s : traj) {
    std::complex<double> w = w0 * std::exp(lam * s.t);
    CHECK(std::fabs(s.r[0] - c[0] - w.real()) < tol);
    CHECK(std::fabs(s.r[1] - c[1] - w.imag()) < tol);
    double radius = std::hypot(s.r[0] - c[0], s.r[1] - c[1]);
    CHECK(radius <= prev_radius * (1 + 1e-12));
    prev_radius = radius;
  }
  // several full turns at omega = k|G|/det, radius shrunk measurably
  CHECK(std::fabs(lam.imag()) * T / (2 * constants::pi) > 4.0);
  CHECK(prev_radius < 0.1 * std::abs(w0));
}

TEST_CASE("dissipative flow never climbs the landscape") {
  auto b = baseline();
  ThieleParams p = b.p;
  p.f_dl = {0.0, 0.0};
  auto traj = integrate(p, b.pot, {60e-9, 85e-9}, 2e-9, 1e-13);
  double prev = lerp_u(b.pot, traj.front().r[0], traj.front().r[1]);
  for (const auto& s : traj) {
    double u = lerp_u(b.pot, s.r[0], s.r[1]);
    CHECK(u <= prev * (1 + 1e-12) + 1e-40);
    prev = u;
  }
  CHECK(lerp_u(b.pot, traj.back().r[0], traj.back().r[1]) <
        lerp_u(b.pot, traj.front().r[0], traj.front().r[1]));
}

TEST_CASE("escaping the raster box raises LeftDomain") {
  auto pot = flat_potential();
  auto p = thiele_from_config(defaults());
  try {
    integrate(p, pot, {25e-9, 40e-9}, 5e-9, 1e-12);
    FAIL("expected LeftDomain");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::LeftDomain);
  }
}

TEST_CASE("calibrated defaults rectify: forward passes, reverse returns") {
  auto b = baseline();

  auto fwd = classify_diode(b.p, b.pot, b.g, DriveDirection::Forward, 20e-9);
  CHECK(fwd.cls == DiodeClass::Transmitted);
  CHECK(std::isfinite(fwd.time));
  CHECK(fwd.time > 0.0);
  CHECK(fwd.time < 12e-9);
  CHECK_FALSE(fwd.left_domain);
  CHECK_FALSE(fwd.trajectory.empty());
  CHECK(fwd.trajectory.front().r[0] ==
        doctest::Approx(0.125 * 300e-9).epsilon(1e-12).scale(0.0));
  CHECK(fwd.trajectory.back().r[0] >= 0.75 * 300e-9);

  auto rev = classify_diode(b.p, b.pot, b.g, DriveDirection::Reverse, 20e-9);
  CHECK(rev.cls == DiodeClass::Reflected);
  CHECK(std::isfinite(rev.time));
  CHECK(rev.time < 20e-9);
  CHECK_FALSE(rev.left_domain);
  // it genuinely entered the junction before turning back
  CHECK(rev.min_throat_dist < b.g.arm_width_in);
}

TEST_CASE("drive below the depinning threshold stalls both ways") {
  auto b = baseline();
  ThieleParams p = b.p;
  p.f_dl = {p.force_per_current * 1e10, 0.0};
  auto fwd = classify_diode(p, b.pot, b.g, DriveDirection::Forward, 2e-9);
  auto rev = classify_diode(p, b.pot, b.g, DriveDirection::Reverse, 2e-9);
  CHECK(fwd.cls == DiodeClass::Stalled);
  CHECK(rev.cls == DiodeClass::Stalled);
  CHECK(std::isnan(fwd.time));
  CHECK(std::isnan(rev.time));
}

TEST_CASE("box escape maps to Reflected with the flag") {
  auto b = baseline();
  auto pot = flat_potential(100);
  pot.nx = b.pot.nx;
  pot.ny = b.pot.ny;
  pot.u.assign(std::size_t(pot.nx) * pot.ny, 0.0);
  pot.du_dx = pot.u;
  pot.du_dy = pot.u;
  auto out = classify_diode(b.p, pot, b.g, DriveDirection::Forward, 20e-9);
  CHECK(out.cls == DiodeClass::Reflected);
  CHECK(out.left_domain);
}

TEST_CASE("mirror antisymmetry: reverse equals forward on the mirrored track") {
  auto b = baseline();
  auto gm = mirror_x(b.g);
  double lambda = derive_scales(material_from_config(b.cfg)).delta_dw;
  auto potm = build_potential(gm, b.cfg.num("geometry", "potential_u0"), lambda);
  ThieleParams pm = b.p;
  pm.g_gyro = -b.p.g_gyro;

  auto rev = classify_diode(b.p, b.pot, b.g, DriveDirection::Reverse, 20e-9);
  auto fwd_m = classify_diode(pm, potm, gm, DriveDirection::Forward, 20e-9);
  CHECK(fwd_m.cls == rev.cls);
  CHECK(std::fabs(fwd_m.time - rev.time) <= 1e-13);
  CHECK(fwd_m.min_throat_dist ==
        doctest::Approx(rev.min_throat_dist).epsilon(1e-6).scale(0.0));

  auto fwd = classify_diode(b.p, b.pot, b.g, DriveDirection::Forward, 20e-9);
  auto rev_m = classify_diode(pm, potm, gm, DriveDirection::Reverse, 20e-9);
  CHECK(rev_m.cls == fwd.cls);
  CHECK(std::fabs(rev_m.time - fwd.time) <= 1e-13);
}

TEST_CASE("current sweep brackets the operating window") {
  auto b = baseline();
  std::vector<double> grid;
  for (int k = 0; k <= 10; k++) grid.push_back(k * 1e11);
  auto res = efficiency_sweep(b.p, b.pot, b.g, grid, 20e-9);

  REQUIRE(res.rows.size() == 11);
  CHECK(res.rows[0].forward_cls == DiodeClass::Stalled);
  CHECK(res.rows[0].reverse_cls == DiodeClass::Stalled);
  CHECK(std::isnan(res.rows[0].tau_fwd));
  CHECK(std::isnan(res.rows[0].tau_rev));
  CHECK(res.j_min <= 2e11);
  CHECK(res.j_max >= 2e11);
  for (const auto& row : res.rows) {
    if (row.forward_cls != DiodeClass::Transmitted) CHECK(std::isnan(row.tau_fwd));
    if (row.reverse_cls != DiodeClass::Reflected) CHECK(std::isnan(row.tau_rev));
    if (row.j == 2e11) {
      CHECK(row.forward_cls == DiodeClass::Transmitted);
      CHECK(row.reverse_cls == DiodeClass::Reflected);
      CHECK(std::isfinite(row.tau_fwd));
      CHECK(std::isfinite(row.tau_rev));
    }
  }
}

TEST_CASE("transit time shortens with drive inside the window") {
  auto b = baseline();
  std::vector<double> grid{1.6e11, 1.8e11, 2.0e11, 2.2e11};
  auto res = efficiency_sweep(b.p, b.pot, b.g, grid, 20e-9);
  CHECK(res.j_min == doctest::Approx(1.6e11));
  CHECK(res.j_max == doctest::Approx(2.2e11));
  for (std::size_t k = 0; k < res.rows.size(); k++) {
    CHECK(res.rows[k].forward_cls == DiodeClass::Transmitted);
    CHECK(res.rows[k].reverse_cls == DiodeClass::Reflected);
    if (k > 0) CHECK(res.rows[k].tau_fwd <= res.rows[k - 1].tau_fwd + 1e-15);
  }
}

TEST_CASE("sweep argument and window errors") {
  auto b = baseline();
  try {
    efficiency_sweep(b.p, b.pot, b.g, {0.0}, 1e-9);
    FAIL("expected EmptyWindow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyWindow);
  }
  try {
    efficiency_sweep(b.p, b.pot, b.g, {2e11, 1e11}, 1e-9);
    FAIL("expected ArgumentError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ArgumentError);
  }
}

TEST_CASE("outcome labels are stable") {
  CHECK(std::string(to_string(DiodeClass::Transmitted)) == "Transmitted");
  CHECK(std::string(to_string(DiodeClass::Reflected)) == "Reflected");
  CHECK(std::string(to_string(DiodeClass::Stalled)) == "Stalled");
  CHECK(std::string(to_string(DiodeClass::Annihilated)) == "Annihilated");
}
