#include "skyrlab/thiele.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "diode_rule.hpp"
#include "skyrlab/constants.hpp"
#include "skyrlab/error.hpp"
#include "skyrlab/params.hpp"

namespace skyrlab {

namespace constants_ = skyrlab::constants;

const char* to_string(DiodeClass c) {
  switch (c) {
    case DiodeClass::Transmitted: return "Transmitted";
    case DiodeClass::Reflected: return "Reflected";
    case DiodeClass::Stalled: return "Stalled";
    case DiodeClass::Annihilated: return "Annihilated";
  }
  return "?";
}

ThieleParams thiele_from_config(const ExperimentConfig& cfg) {
  ThieleParams p;
  MaterialParams m = material_from_config(cfg);
  DriveParams d = drive_from_config(cfg);
  DerivedScales sc = derive_scales(m);
  const double q_core = -1.0;  // relaxed core points down

  p.alpha_g = m.alpha;
  p.g_gyro = cfg.num("thiele", "g_gyro");
  if (p.g_gyro == 0.0)
    p.g_gyro = 4.0 * constants_::pi * q_core * m.Ms * m.thickness /
               constants_::gamma_e;

  double r_core = cfg.num("thiele", "core_radius");
  p.d_diss = cfg.num("thiele", "d_diss");
  if (p.d_diss == 0.0)
    p.d_diss = std::fabs(p.g_gyro) * constants_::pi * constants_::pi * r_core /
               (8.0 * sc.delta_dw);

  p.force_per_current = constants_::pi * constants_::pi * r_core *
                        constants_::hbar * d.spin_hall_angle /
                        (4.0 * constants_::e_charge);
  p.f_dl = {p.force_per_current * d.current_density, 0.0};
  return p;
}

std::array<double, 2> steady_velocity(const ThieleParams& p,
                                      const std::array<double, 2>& f) {
  const double ad = p.alpha_g * p.d_diss;
  const double det = ad * ad + p.g_gyro * p.g_gyro;
  if (det == 0.0)
    throw Error(ErrorKind::SingularMobility,
                "both G and alpha_g*d_diss vanish");
  return {(ad * f[0] + p.g_gyro * f[1]) / det,
          (-p.g_gyro * f[0] + ad * f[1]) / det};
}

namespace {

struct Sampler {
  const ConfinementPotential& pot;

  std::array<double, 2> grad(double x, double y) const {
    const double h = pot.cell_size;
    double u = x / h - 0.5;
    double v = y / h - 0.5;
    int i0 = static_cast<int>(std::floor(u));
    int j0 = static_cast<int>(std::floor(v));
    i0 = std::clamp(i0, 0, pot.nx - 2);
    j0 = std::clamp(j0, 0, pot.ny - 2);
    double fx = std::clamp(u - i0, 0.0, 1.0);
    double fy = std::clamp(v - j0, 0.0, 1.0);
    auto lerp2 = [&](const std::vector<double>& a) {
      std::size_t c = static_cast<std::size_t>(j0) * pot.nx + i0;
      double a00 = a[c], a10 = a[c + 1];
      double a01 = a[c + pot.nx], a11 = a[c + pot.nx + 1];
      return (1 - fy) * ((1 - fx) * a00 + fx * a10) +
             fy * ((1 - fx) * a01 + fx * a11);
    };
    return {lerp2(pot.du_dx), lerp2(pot.du_dy)};
  }

  double value(double x, double y) const {
    const double h = pot.cell_size;
    double u = x / h - 0.5;
    double v = y / h - 0.5;
    int i0 = static_cast<int>(std::floor(u));
    int j0 = static_cast<int>(std::floor(v));
    i0 = std::clamp(i0, 0, pot.nx - 2);
    j0 = std::clamp(j0, 0, pot.ny - 2);
    double fx = std::clamp(u - i0, 0.0, 1.0);
    double fy = std::clamp(v - j0, 0.0, 1.0);
    std::size_t c = static_cast<std::size_t>(j0) * pot.nx + i0;
    double a00 = pot.u[c], a10 = pot.u[c + 1];
    double a01 = pot.u[c + pot.nx], a11 = pot.u[c + pot.nx + 1];
    return (1 - fy) * ((1 - fx) * a00 + fx * a10) +
           fy * ((1 - fx) * a01 + fx * a11);
  }
};

struct Flow {
  const ThieleParams& p;
  Sampler s;
  double inv_det;

  Flow(const ThieleParams& p_, const ConfinementPotential& pot_)
      : p(p_), s{pot_} {
    const double ad = p.alpha_g * p.d_diss;
    const double det = ad * ad + p.g_gyro * p.g_gyro;
    if (det == 0.0)
      throw Error(ErrorKind::SingularMobility,
                  "both G and alpha_g*d_diss vanish");
    inv_det = 1.0 / det;
  }

  std::array<double, 2> vel(const std::array<double, 2>& r) const {
    auto g = s.grad(r[0], r[1]);
    const double fx = p.f_dl[0] - g[0];
    const double fy = p.f_dl[1] - g[1];
    const double ad = p.alpha_g * p.d_diss;
    return {(ad * fx + p.g_gyro * fy) * inv_det,
            (-p.g_gyro * fx + ad * fy) * inv_det};
  }

  std::array<double, 2> rk4(const std::array<double, 2>& r, double dt) const {
    auto k1 = vel(r);
    auto k2 = vel({r[0] + 0.5 * dt * k1[0], r[1] + 0.5 * dt * k1[1]});
    auto k3 = vel({r[0] + 0.5 * dt * k2[0], r[1] + 0.5 * dt * k2[1]});
    auto k4 = vel({r[0] + dt * k3[0], r[1] + dt * k3[1]});
    return {r[0] + dt / 6.0 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
            r[1] + dt / 6.0 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])};
  }
};

bool in_box(const ConfinementPotential& pot, const std::array<double, 2>& r) {
  return r[0] >= 0.0 && r[0] <= pot.nx * pot.cell_size && r[1] >= 0.0 &&
         r[1] <= pot.ny * pot.cell_size;
}

}  // namespace

std::vector<ThieleState> integrate(const ThieleParams& p,
                                   const ConfinementPotential& pot,
                                   const std::array<double, 2>& r0, double T,
                                   double dt) {
  if (!(dt > 0.0) || !(T >= 0.0))
    throw Error(ErrorKind::ArgumentError, "integrate needs dt > 0, T >= 0");
  Flow flow(p, pot);
  std::vector<ThieleState> traj;
  const long long steps = static_cast<long long>(std::ceil(T / dt));
  traj.reserve(static_cast<std::size_t>(steps) + 1);
  std::array<double, 2> r = r0;
  for (long long k = 0;; k++) {
    if (!in_box(pot, r))
      throw Error(ErrorKind::LeftDomain, "trajectory exited the raster box");
    traj.push_back({r, flow.vel(r), k * dt});
    if (k >= steps) break;
    r = flow.rk4(r, dt);
  }
  return traj;
}

DiodeOutcome classify_diode(const ThieleParams& p,
                            const ConfinementPotential& pot,
                            const TrackGeometry& g, DriveDirection dir,
                            double timeout, double dt) {
  const diode_rule::Protocol proto = diode_rule::make(g, dir);
  diode_rule::Monitor monitor(proto);

  ThieleParams pd = p;
  const double fmag = std::fabs(p.f_dl[0]);
  pd.f_dl = {proto.fwd ? fmag : -fmag, 0.0};
  std::array<double, 2> r = proto.start;

  Flow flow(pd, pot);
  DiodeOutcome out;
  const long long steps = static_cast<long long>(std::ceil(timeout / dt));
  const long long stride = std::max(1LL, steps / 4096);

  for (long long k = 0; k <= steps; k++) {
    const double t = k * dt;
    auto v = flow.vel(r);
    if (k % stride == 0) out.trajectory.push_back({r, v, t});

    if (!in_box(pot, r)) {
      out.cls = DiodeClass::Reflected;
      out.left_domain = true;
      out.time = t;
      out.min_throat_dist = monitor.min_throat_dist;
      return out;
    }
    if (auto cls = monitor.feed(r, v)) {
      out.cls = *cls;
      out.time = t;
      out.trajectory.push_back({r, v, t});
      out.min_throat_dist = monitor.min_throat_dist;
      return out;
    }
    r = flow.rk4(r, dt);
  }
  out.cls = DiodeClass::Stalled;
  out.time = std::numeric_limits<double>::quiet_NaN();
  out.min_throat_dist = monitor.min_throat_dist;
  return out;
}

SweepResult efficiency_sweep(const ThieleParams& p,
                             const ConfinementPotential& pot,
                             const TrackGeometry& g,
                             const std::vector<double>& j_values,
                             double timeout, double dt) {
  for (std::size_t k = 1; k < j_values.size(); k++)
    if (!(j_values[k] > j_values[k - 1]))
      throw Error(ErrorKind::ArgumentError, "j_values must ascend");

  SweepResult res;
  res.rows.reserve(j_values.size());
  for (double j : j_values) {
    ThieleParams pj = p;
    pj.f_dl = {p.force_per_current * j, 0.0};
    SweepRow row;
    row.j = j;
    auto f = classify_diode(pj, pot, g, DriveDirection::Forward, timeout, dt);
    auto r = classify_diode(pj, pot, g, DriveDirection::Reverse, timeout, dt);
    row.forward_cls = f.cls;
    row.reverse_cls = r.cls;
    row.tau_fwd = f.cls == DiodeClass::Transmitted
                      ? f.time
                      : std::numeric_limits<double>::quiet_NaN();
    row.tau_rev = r.cls == DiodeClass::Reflected
                      ? r.time
                      : std::numeric_limits<double>::quiet_NaN();
    res.rows.push_back(row);
  }

  std::size_t first = res.rows.size();
  for (std::size_t k = 0; k < res.rows.size(); k++) {
    if (res.rows[k].forward_cls == DiodeClass::Transmitted &&
        res.rows[k].reverse_cls == DiodeClass::Reflected) {
      first = k;
      break;
    }
  }
  if (first == res.rows.size())
    throw Error(ErrorKind::EmptyWindow,
                "no current density gives (Transmitted, Reflected)");
  std::size_t last = first;
  while (last + 1 < res.rows.size() &&
         res.rows[last + 1].forward_cls == DiodeClass::Transmitted &&
         res.rows[last + 1].reverse_cls == DiodeClass::Reflected)
    last++;
  res.j_min = res.rows[first].j;
  res.j_max = res.rows[last].j;
  return res;
}

}  // namespace skyrlab
