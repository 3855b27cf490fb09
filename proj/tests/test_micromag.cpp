#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <cmath>
#include <cstdio>
#include <vector>

#include "doctest.h"
#include "skyrlab/config.hpp"
#include "skyrlab/constants.hpp"
#include "skyrlab/error.hpp"
#include "skyrlab/geometry.hpp"
#include "skyrlab/micromag.hpp"
#include "skyrlab/params.hpp"
#include "skyrlab/thiele.hpp"

using namespace skyrlab;
namespace k = constants;

namespace {

ExperimentConfig defaults() { return parse_config("[material]\n"); }

MaterialParams baseline_material() {
  return material_from_config(defaults());
}

// bare rectangle, every cell magnetic
TrackGeometry strip(int nx, int ny, double h) {
  TrackGeometry g;
  g.nx = nx;
  g.ny = ny;
  g.cell_size = h;
  g.mask.assign(static_cast<std::size_t>(nx) * ny, 1);
  g.track_length = nx * h;
  g.track_width = ny * h;
  return g;
}

// rectangle with a notched corner and an interior hole, to exercise the
// free-boundary link weights away from straight edges
TrackGeometry notched(int nx, int ny, double h) {
  TrackGeometry g = strip(nx, ny, h);
  for (int j = 0; j < 4; j++)
    for (int i = 0; i < 4; i++) g.mask[std::size_t(j) * nx + i] = 0;
  g.mask[std::size_t(7) * nx + 10] = 0;
  return g;
}

// deterministic unit spins, decorrelated cell to cell
void randomize(const TrackGeometry& g, Texture& t, unsigned seed) {
  unsigned s = seed;
  auto next = [&s]() {
    s = 1664525u * s + 1013904223u;
    return (s >> 8) * (1.0 / 16777216.0) - 0.5;
  };
  for (int j = 0; j < g.ny; j++)
    for (int i = 0; i < g.nx; i++) {
      if (!g.inside(i, j)) continue;
      const std::size_t c = t.idx(i, j);
      double x = next(), y = next(), z = next() + 0.7;
      const double n = std::sqrt(x * x + y * y + z * z);
      t.mx[c] = x / n;
      t.my[c] = y / n;
      t.mz[c] = z / n;
    }
}

double k_eff_of(const MaterialParams& m) {
  return m.Ku - 0.5 * k::mu0 * m.Ms * m.Ms;
}

}  // namespace

TEST_CASE("uniform state: interior field is pure anisotropy plus Zeeman") {
  auto g = strip(24, 20, 1e-9);
  auto m = baseline_material();
  auto t = uniform_texture(g);
  const std::array<double, 3> b{0.0, 0.0, 0.05};
  auto h = effective_field(g, t, m, b);

  const double han = 2.0 * k_eff_of(m) / (k::mu0 * m.Ms);
  const double hz = 0.05 / k::mu0;
  // interior cell: exchange and DMI differences vanish
  std::size_t c = t.idx(12, 10);
  CHECK(h.x[c] == doctest::Approx(0.0).epsilon(1e-12).scale(han));
  CHECK(h.y[c] == doctest::Approx(0.0).epsilon(1e-12).scale(han));
  CHECK(h.z[c] == doctest::Approx(han + hz).epsilon(1e-12).scale(0.0));

  // an edge cell keeps the unbalanced DMI link: in-plane component appears
  std::size_t e = t.idx(0, 10);
  const double c_dmi = m.Dmi / (k::mu0 * m.Ms * g.cell_size);
  CHECK(h.x[e] == doctest::Approx(c_dmi).epsilon(1e-12).scale(0.0));

  // vacuum cells stay zero
  auto gn = notched(24, 20, 1e-9);
  auto tn = uniform_texture(gn);
  auto hn = effective_field(gn, tn, m, b);
  CHECK(hn.x[tn.idx(1, 1)] == 0.0);
  CHECK(hn.z[tn.idx(1, 1)] == 0.0);
}

TEST_CASE("field terms are additive and individually selectable") {
  auto g = notched(16, 16, 1e-9);
  auto m = baseline_material();
  Texture t = uniform_texture(g);
  randomize(g, t, 42u);
  const std::array<double, 3> b{0.01, -0.02, 0.03};

  auto all = effective_field(g, t, m, b);
  auto ex = effective_field(g, t, m, b, FieldExchange);
  auto dm = effective_field(g, t, m, b, FieldDmi);
  auto an = effective_field(g, t, m, b, FieldAnisotropy);
  auto ze = effective_field(g, t, m, b, FieldZeeman);
  for (int j = 0; j < g.ny; j++)
    for (int i = 0; i < g.nx; i++) {
      const std::size_t c = t.idx(i, j);
      CHECK(all.x[c] == doctest::Approx(ex.x[c] + dm.x[c] + an.x[c] + ze.x[c])
                            .epsilon(1e-12).scale(1e6));
      CHECK(all.z[c] == doctest::Approx(ex.z[c] + dm.z[c] + an.z[c] + ze.z[c])
                            .epsilon(1e-12).scale(1e6));
    }
  // Zeeman is state independent: B/mu0 on every magnet cell
  CHECK(ze.y[t.idx(8, 8)] == doctest::Approx(-0.02 / k::mu0).epsilon(1e-12));
}

TEST_CASE("planar spiral reproduces the continuum exchange density") {
  // m = (sin kx, 0, cos kx): energy density A k^2 for kh -> 0
  auto m = baseline_material();
  const double h = 1e-9;
  auto g = strip(64, 16, h);
  Texture t = uniform_texture(g);
  const double kx = 0.2 / h;  // kh = 0.2
  long long n_xlinks = 0;
  for (int j = 0; j < g.ny; j++)
    for (int i = 0; i < g.nx; i++) {
      const double x = (i + 0.5) * h;
      const std::size_t c = t.idx(i, j);
      t.mx[c] = std::sin(kx * x);
      t.my[c] = 0.0;
      t.mz[c] = std::cos(kx * x);
      if (i + 1 < g.nx) n_xlinks++;
    }
  const double e_ex = total_energy(g, t, m, {0, 0, 0}, FieldExchange);
  // one x link per interior cell pair carries the whole gradient
  const double v_links = double(n_xlinks) * h * h * m.thickness;
  const double density = e_ex / v_links;
  const double target = m.Aex * kx * kx;
  CHECK(density == doctest::Approx(target).epsilon(0.01).scale(0.0));
  // and the discrete value is exactly 4 sin^2(kh/2)/h^2 per link
  const double exact = m.Aex * 4.0 * std::pow(std::sin(0.5 * kx * h), 2) /
                       (h * h);
  CHECK(density == doctest::Approx(exact).epsilon(1e-12).scale(0.0));
}

TEST_CASE("effective field is the exact energy gradient") {
  // central differences of a quadratic energy carry no truncation error,
  // so the comparison holds to roundoff
  auto g = notched(16, 16, 1e-9);
  auto m = baseline_material();
  Texture t = uniform_texture(g);
  randomize(g, t, 7u);
  const std::array<double, 3> b{0.02, 0.015, -0.04};

  auto hf = effective_field(g, t, m, b);
  const double pref =
      k::mu0 * m.Ms * g.cell_size * g.cell_size * m.thickness;
  const double delta = 1e-4;
  const int probes[][2] = {{5, 9}, {0, 15}, {15, 0}, {9, 7},  // next to hole
                           {4, 4},  // notch corner
                           {8, 0}, {0, 8}, {15, 15}, {11, 7}, {10, 8}};
  for (auto& pr : probes) {
    const std::size_t c = t.idx(pr[0], pr[1]);
    if (!g.inside(pr[0], pr[1])) continue;
    double* comp[3] = {&t.mx[c], &t.my[c], &t.mz[c]};
    const double want[3] = {hf.x[c], hf.y[c], hf.z[c]};
    for (int a = 0; a < 3; a++) {
      const double keep = *comp[a];
      *comp[a] = keep + delta;
      const double ep = total_energy(g, t, m, b);
      *comp[a] = keep - delta;
      const double em = total_energy(g, t, m, b);
      *comp[a] = keep;
      const double grad = -(ep - em) / (2.0 * delta * pref);
      CHECK(grad == doctest::Approx(want[a]).epsilon(1e-5).scale(1e6));
    }
  }
}

TEST_CASE("macrospin follows the damped-precession closed form") {
  // single cell, exchange/DMI inert, k_eff = 0: pure Zeeman dynamics
  //   mz(t) = tanh(g' a H t + atanh mz0),  phi(t) = phi0 + g' H t
  auto g = strip(1, 1, 1e-9);
  MaterialParams m = baseline_material();
  m.Aex = 0.0;
  m.Dmi = 0.0;
  m.Ku = 0.5 * k::mu0 * m.Ms * m.Ms;
  const double bz = 0.2;
  DriveParams drv{};
  drv.current_density = 0.0;
  drv.torque_kind = TorqueKind::SotDampingLike;
  drv.polarization = {0.0, -1.0, 0.0};
  drv.spin_hall_angle = 0.0;
  drv.nonadiabaticity_beta = 0.0;
  drv.polarization_p = 0.0;
  drv.b_ext = {0.0, 0.0, bz};

  Texture t = uniform_texture(g);
  const double mz0 = 0.1;
  const double s0 = std::sqrt(1.0 - mz0 * mz0);
  t.mx[0] = s0;
  t.my[0] = 0.0;
  t.mz[0] = mz0;

  const double gp = k::gamma0 / (1.0 + m.alpha * m.alpha);
  const double hfield = bz / k::mu0;
  const double dt = 5e-15;
  const int steps = 200000;  // 1 ns
  for (int i = 0; i < steps; i++) step_llg(g, t, m, &drv, dt);

  const double tt = steps * dt;
  const double mz = std::tanh(gp * m.alpha * hfield * tt + std::atanh(mz0));
  const double phi = gp * hfield * tt;
  const double st = std::sqrt(1.0 - mz * mz);
  CHECK(t.mz[0] == doctest::Approx(mz).epsilon(1e-6));
  CHECK(t.mx[0] == doctest::Approx(st * std::cos(phi)).epsilon(1e-6));
  CHECK(t.my[0] == doctest::Approx(st * std::sin(phi)).epsilon(1e-6).scale(1.0));
  const double norm = std::sqrt(t.mx[0] * t.mx[0] + t.my[0] * t.my[0] +
                                t.mz[0] * t.mz[0]);
  CHECK(std::fabs(norm - 1.0) < 1e-12);
}

TEST_CASE("aligned easy-axis state is a fixed point") {
  auto g = strip(12, 12, 1e-9);
  MaterialParams m = baseline_material();
  m.Dmi = 0.0;  // no edge canting
  Texture t = uniform_texture(g);
  for (int i = 0; i < 100; i++) step_llg(g, t, m, nullptr, 1e-14);
  for (int j = 0; j < g.ny; j++)
    for (int i = 0; i < g.nx; i++) {
      CHECK(t.mz[t.idx(i, j)] == 1.0);
      CHECK(t.mx[t.idx(i, j)] == 0.0);
    }
}

TEST_CASE("Zhang-Li advection shifts a spiral at u sin(kh)/h") {
  // A = D = 0 and k_eff = 0 leave the bare transport term; the spiral is an
  // eigenfunction of the centered difference, so the phase velocity is the
  // lattice-modified u and the profile stays rigid
  const double h = 1e-9;
  auto g = strip(64, 8, h);
  MaterialParams m = baseline_material();
  m.Aex = 0.0;
  m.Dmi = 0.0;
  m.Ku = 0.5 * k::mu0 * m.Ms * m.Ms;

  DriveParams drv{};
  drv.current_density = 0.4e12;
  drv.torque_kind = TorqueKind::SttZhangLi;
  drv.polarization = {1.0, 0.0, 0.0};
  drv.spin_hall_angle = 0.0;
  drv.nonadiabaticity_beta = 0.0;  // pure advection
  drv.polarization_p = 0.5;
  drv.b_ext = {0.0, 0.0, 0.0};

  const double u = drv.polarization_p * k::mu_B * drv.current_density /
                   (k::e_charge * m.Ms);
  CHECK(u == doctest::Approx(19.96).epsilon(0.01));  // m/s scale sanity

  Texture t = uniform_texture(g);
  const double kx = 0.2 / h;
  for (int j = 0; j < g.ny; j++)
    for (int i = 0; i < g.nx; i++) {
      const double x = (i + 0.5) * h;
      const std::size_t c = t.idx(i, j);
      t.mx[c] = std::sin(kx * x);
      t.my[c] = 0.0;
      t.mz[c] = std::cos(kx * x);
    }

  const double dt = 1e-12;
  const int steps = 200;
  for (int i = 0; i < steps; i++) step_llg(g, t, m, &drv, dt);

  const double dphi = u * std::sin(kx * h) / h * steps * dt;
  for (int i = 8; i < g.nx - 8; i++) {
    const double x = (i + 0.5) * h;
    const std::size_t c = t.idx(i, 4);
    CHECK(t.mz[c] == doctest::Approx(std::cos(kx * x - dphi))
                         .epsilon(2e-5));
    CHECK(t.mx[c] == doctest::Approx(std::sin(kx * x - dphi))
                         .epsilon(2e-5).scale(1.0));
  }
}

TEST_CASE("oversized steps throw and leave the texture untouched") {
  auto g = strip(20, 20, 1e-9);
  auto m = baseline_material();
  Texture t = uniform_texture(g);
  randomize(g, t, 13u);
  Texture before = t;
  const double dt = 50.0 * suggest_dt(g, t, m, nullptr);
  try {
    step_llg(g, t, m, nullptr, dt);
    FAIL("expected StepUnstable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::StepUnstable);
  }
  for (std::size_t c = 0; c < t.mx.size(); c++) {
    CHECK(t.mx[c] == before.mx[c]);
    CHECK(t.my[c] == before.my[c]);
    CHECK(t.mz[c] == before.mz[c]);
  }
}

TEST_CASE("seeded ansatz carries unit negative charge") {
  auto g = strip(100, 100, 1e-9);
  Texture t = uniform_texture(g);
  seed_skyrmion(g, t, 50e-9, 50e-9, 10e-9, 5e-9);
  const double q = topological_charge(g, t);
  CHECK(q == doctest::Approx(-1.0).epsilon(0.02));
  // core points down, rim in-plane component is radial (Neel, outward)
  CHECK(t.mz[t.idx(50, 50)] == doctest::Approx(-1.0).epsilon(1e-3));
  const std::size_t rim = t.idx(60, 50);  // +x side of the wall
  CHECK(t.mx[rim] > 0.1);
  CHECK(std::fabs(t.my[rim]) < 1e-12);
}

TEST_CASE("charge flips sign under polarity reversal, exactly") {
  auto g = strip(80, 80, 1e-9);
  Texture t = uniform_texture(g);
  seed_skyrmion(g, t, 40e-9, 40e-9, 9e-9, 4e-9);
  const double q = topological_charge(g, t);
  Texture f = t;
  for (std::size_t c = 0; c < f.mz.size(); c++) f.mz[c] = -f.mz[c];
  CHECK(topological_charge(g, f) == doctest::Approx(-q).epsilon(1e-14));
}

TEST_CASE("x mirror with mx negation preserves the charge") {
  auto g = strip(80, 60, 1e-9);
  Texture t = uniform_texture(g);
  seed_skyrmion(g, t, 30e-9, 30e-9, 9e-9, 4e-9);
  Texture mt = uniform_texture(g);
  for (int j = 0; j < g.ny; j++)
    for (int i = 0; i < g.nx; i++) {
      const std::size_t src = t.idx(g.nx - 1 - i, j);
      const std::size_t dst = t.idx(i, j);
      mt.mx[dst] = -t.mx[src];
      mt.my[dst] = t.my[src];
      mt.mz[dst] = t.mz[src];
    }
  // same object seen in a mirror: winding and polarity both survive
  CHECK(topological_charge(g, mt) ==
        doctest::Approx(topological_charge(g, t)).epsilon(1e-6));
}

TEST_CASE("seed and snapshot argument validation") {
  auto g = strip(10, 10, 1e-9);
  Texture t = uniform_texture(g);
  CHECK_THROWS_AS(seed_skyrmion(g, t, 5e-9, 5e-9, 0.0, 2e-9), Error);
  CHECK_THROWS_AS(seed_skyrmion(g, t, 5e-9, 5e-9, 3e-9, -1e-9), Error);
  CHECK_THROWS_AS(write_snapshot_csv(g, t, "x.csv", 0), Error);
  CHECK_THROWS_AS(relax(g, t, baseline_material(), -1.0, 1e-4), Error);
}

TEST_CASE("relaxation descends the energy and stops on the tolerance") {
  auto g = strip(60, 60, 1e-9);
  auto m = baseline_material();
  Texture t = uniform_texture(g);
  seed_skyrmion(g, t, 30e-9, 30e-9, 8e-9, 4.33e-9);
  const double e0 = total_energy(g, t, m, {0, 0, 0});

  Texture coarse = t;
  auto r1 = relax(g, coarse, m, 50e-9, 1e-2);
  const double e1 = total_energy(g, coarse, m, {0, 0, 0});
  CHECK(r1.max_torque < 1e-2);
  CHECK(e1 < e0);

  auto r2 = relax(g, coarse, m, 50e-9, 1e-4);
  const double e2 = total_energy(g, coarse, m, {0, 0, 0});
  CHECK(r2.max_torque < 1e-4);
  CHECK(e2 <= e1 + 1e-30);

  // unreachable tolerance inside a tiny budget reports NoConvergence
  Texture rough = uniform_texture(g);
  randomize(g, rough, 3u);
  try {
    relax(g, rough, m, 1e-12, 1e-13);
    FAIL("expected NoConvergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoConvergence);
  }
}

TEST_CASE("relaxed skyrmion: unit charge over the edge background") {
  auto g = strip(120, 80, 1e-9);
  auto m = baseline_material();

  // the DMI edge twist of the finite mask holds a static charge fraction
  Texture bg = uniform_texture(g);
  relax(g, bg, m, 50e-9, 1e-4);
  const double q_bg = topological_charge(g, bg);
  CHECK(std::fabs(q_bg) < 0.2);
  CHECK(std::fabs(q_bg) > 1e-4);  // it is real, not roundoff

  Texture t = uniform_texture(g);
  seed_skyrmion(g, t, 60e-9, 40e-9, 10e-9, 5e-9);
  auto r = relax(g, t, m, 50e-9, 1e-4);
  CHECK(r.max_torque < 1e-4);
  CHECK(r.time < 50e-9);

  auto ob = observe(g, t, m, {0, 0, 0});
  CHECK(ob.q - q_bg == doctest::Approx(-1.0).epsilon(0.02));
  // baseline Ku: about 20 nm across, generous band
  CHECK(ob.diameter > 10e-9);
  CHECK(ob.diameter < 30e-9);
  CHECK(ob.core[0] == doctest::Approx(60e-9).epsilon(0.05));
  CHECK(ob.core[1] == doctest::Approx(40e-9).epsilon(0.05));
}

TEST_CASE("relaxed diameter shrinks monotonically with anisotropy") {
  // patch and cell sizes track the shrinking wall width
  const double ku[4] = {0.8e6, 1.0e6, 1.2e6, 1.5e6};
  const double cell[4] = {1.0e-9, 0.75e-9, 0.6e-9, 0.5e-9};
  const double patch[4] = {100e-9, 80e-9, 60e-9, 50e-9};
  double diam[4];
  for (int i = 0; i < 4; i++) {
    MaterialParams m = baseline_material();
    m.Ku = ku[i];
    const double delta = std::sqrt(m.Aex / m.Ku);
    const int n = int(patch[i] / cell[i] + 0.5);
    auto g = strip(n, n, cell[i]);
    Texture t = uniform_texture(g);
    seed_skyrmion(g, t, patch[i] / 2, patch[i] / 2, 2.0 * delta, delta);
    relax(g, t, m, 50e-9, 1e-4);
    auto ob = observe(g, t, m, {0, 0, 0});
    diam[i] = ob.diameter;
    CHECK(ob.diameter > 0.0);
  }
  CHECK(diam[1] < diam[0]);
  CHECK(diam[2] < diam[1]);
  CHECK(diam[3] < diam[2]);
  CHECK(diam[0] > 10e-9);   // 20 nm +-50%
  CHECK(diam[0] < 30e-9);
  CHECK(diam[3] > 1.5e-9);  // 3 nm +-50%
  CHECK(diam[3] < 4.5e-9);
}

TEST_CASE("snapshot csv round-trips the masked cells") {
  auto g = notched(12, 10, 1e-9);
  Texture t = uniform_texture(g);
  randomize(g, t, 5u);
  const char* path = "mm_snapshot_scratch.csv";
  write_snapshot_csv(g, t, path);
  std::FILE* f = std::fopen(path, "rb");
  REQUIRE(f != nullptr);
  char line[256];
  REQUIRE(std::fgets(line, sizeof line, f) != nullptr);
  CHECK(std::string(line) == "x_nm,y_nm,mx,my,mz\n");
  int rows = 0;
  double x, y, mx, my, mz;
  while (std::fgets(line, sizeof line, f)) {
    REQUIRE(std::sscanf(line, "%lf,%lf,%lf,%lf,%lf", &x, &y, &mx, &my, &mz) == 5);
    rows++;
  }
  std::fclose(f);
  std::remove(path);
  CHECK(rows == 12 * 10 - 17);  // minus notch and hole
  // last row is the top-right cell
  CHECK(x == doctest::Approx(11.5));
  CHECK(y == doctest::Approx(9.5));
}

TEST_CASE("tilted start keeps |m| on the unit sphere while driven") {
  auto g = strip(30, 20, 1e-9);
  auto m = baseline_material();
  DriveParams drv = drive_from_config(defaults());
  Texture t = uniform_texture(g);
  seed_skyrmion(g, t, 15e-9, 10e-9, 5e-9, 3e-9);
  const double dt = suggest_dt(g, t, m, &drv);
  for (int i = 0; i < 400; i++) step_llg(g, t, m, &drv, dt);
  double worst = 0;
  for (int j = 0; j < g.ny; j++)
    for (int i = 0; i < g.nx; i++) {
      const std::size_t c = t.idx(i, j);
      const double n = std::sqrt(t.mx[c] * t.mx[c] + t.my[c] * t.my[c] +
                                 t.mz[c] * t.mz[c]);
      worst = std::max(worst, std::fabs(n - 1.0));
    }
  CHECK(worst < 1e-12);
}

TEST_CASE("driven diode on the configured track rectifies") {
  auto cfg = defaults();

  auto fwd = run_diode_llg(cfg, DriveDirection::Forward);
  CHECK(fwd.cls == DiodeClass::Transmitted);
  CHECK(std::isfinite(fwd.time));
  CHECK(fwd.time < 20e-9);
  REQUIRE_FALSE(fwd.charge.empty());
  for (double q : fwd.charge) CHECK(std::fabs(q + 1.0) <= 0.05);

  auto rev = run_diode_llg(cfg, DriveDirection::Reverse);
  CHECK(rev.cls == DiodeClass::Reflected);
  CHECK(std::isfinite(rev.time));
  CHECK(rev.time <= 3e-9);
  for (double q : rev.charge) CHECK(std::fabs(q + 1.0) <= 0.05);
  // it reached the junction before turning back
  auto g = build_t_track(cfg);
  CHECK(rev.min_throat_dist < g.arm_width_in);

  // the collective-coordinate model sorts the same pair into the same bins
  auto pot = build_potential(
      g, cfg.num("geometry", "potential_u0"),
      derive_scales(material_from_config(cfg)).delta_dw);
  auto tp = thiele_from_config(cfg);
  auto tf = classify_diode(tp, pot, g, DriveDirection::Forward, 20e-9);
  auto tr = classify_diode(tp, pot, g, DriveDirection::Reverse, 20e-9);
  CHECK(tf.cls == fwd.cls);
  CHECK(tr.cls == rev.cls);
}
