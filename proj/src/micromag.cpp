#include "skyrlab/micromag.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "diode_rule.hpp"
#include "skyrlab/constants.hpp"
#include "skyrlab/error.hpp"

namespace skyrlab {

namespace {

namespace cst = skyrlab::constants;

// Flat neighbor table over the masked cells. A missing neighbor points back
// at the cell itself with weight 0, so kernels read it without branching and
// the link simply drops out (the variational free boundary condition).
struct Lattice {
  int nx = 0, ny = 0;
  std::vector<int> cell;               // flat indices of masked cells
  std::vector<int> nl, nr, nd, nu;     // neighbor flat index per listed cell
  std::vector<double> wl, wr, wd, wu;  // 1 when the link exists

  explicit Lattice(const TrackGeometry& g) : nx(g.nx), ny(g.ny) {
    cell.reserve(static_cast<std::size_t>(nx) * ny / 2);
    for (int j = 0; j < ny; j++)
      for (int i = 0; i < nx; i++)
        if (g.inside(i, j)) cell.push_back(j * nx + i);
    const std::size_t n = cell.size();
    nl.resize(n); nr.resize(n); nd.resize(n); nu.resize(n);
    wl.resize(n); wr.resize(n); wd.resize(n); wu.resize(n);
    for (std::size_t k = 0; k < n; k++) {
      const int c = cell[k];
      const int i = c % nx, j = c / nx;
      const bool L = i > 0 && g.inside(i - 1, j);
      const bool R = i + 1 < nx && g.inside(i + 1, j);
      const bool D = j > 0 && g.inside(i, j - 1);
      const bool U = j + 1 < ny && g.inside(i, j + 1);
      nl[k] = L ? c - 1 : c;  wl[k] = L ? 1.0 : 0.0;
      nr[k] = R ? c + 1 : c;  wr[k] = R ? 1.0 : 0.0;
      nd[k] = D ? c - nx : c; wd[k] = D ? 1.0 : 0.0;
      nu[k] = U ? c + nx : c; wu[k] = U ? 1.0 : 0.0;
    }
  }
};

struct FieldCoef {
  double c_ex = 0;   // 2*Aex/(mu0*Ms*h^2), multiplies the link sum
  double c_dmi = 0;  // Dmi/(mu0*Ms*h), multiplies the chiral differences
  double c_an = 0;   // 2*k_eff/(mu0*Ms), multiplies mz
  double bx = 0, by = 0, bz = 0;  // B_ext/mu0 [A/m]
};

FieldCoef field_coef(const MaterialParams& p, double h,
                     const std::array<double, 3>& b_ext, unsigned terms) {
  FieldCoef c;
  const double k_eff = p.Ku - 0.5 * cst::mu0 * p.Ms * p.Ms;
  if (terms & FieldExchange) c.c_ex = 2.0 * p.Aex / (cst::mu0 * p.Ms * h * h);
  if (terms & FieldDmi) c.c_dmi = p.Dmi / (cst::mu0 * p.Ms * h);
  if (terms & FieldAnisotropy) c.c_an = 2.0 * k_eff / (cst::mu0 * p.Ms);
  if (terms & FieldZeeman) {
    c.bx = b_ext[0] / cst::mu0;
    c.by = b_ext[1] / cst::mu0;
    c.bz = b_ext[2] / cst::mu0;
  }
  return c;
}

// Current drive folded into per-step rates. SOT enters as the damping-like
// amplitude a_J = hbar*theta_sh*J/(2e*mu0*Ms*t); Zhang-Li as the drift
// velocity u = P*mu_B*J/(e*Ms*(1+beta^2)) along the polarization axis.
struct DriveCoef {
  bool sot = false, stt = false;
  double aj = 0;                  // A/m
  double sx = 0, sy = 0, sz = 0;  // SOT spin polarization
  double ux = 0, uy = 0;          // m/s
  double beta = 0;
};

DriveCoef drive_coef(const MaterialParams& p, const DriveParams* d) {
  DriveCoef c;
  if (!d || d->current_density == 0.0) return c;
  if (d->torque_kind == TorqueKind::SotDampingLike) {
    c.sot = true;
    c.aj = cst::hbar * d->spin_hall_angle * d->current_density /
           (2.0 * cst::e_charge * cst::mu0 * p.Ms * p.thickness);
    c.sx = d->polarization[0];
    c.sy = d->polarization[1];
    c.sz = d->polarization[2];
  } else {
    c.stt = true;
    c.beta = d->nonadiabaticity_beta;
    const double u = d->polarization_p * cst::mu_B * d->current_density /
                     (cst::e_charge * p.Ms * (1.0 + c.beta * c.beta));
    c.ux = u * d->polarization[0];
    c.uy = u * d->polarization[1];
  }
  return c;
}

void field_into(const Lattice& lat, const Texture& t, const FieldCoef& c,
                VectorField& h) {
  h.nx = t.nx;
  h.ny = t.ny;
  const std::size_t total = t.mx.size();
  h.x.assign(total, 0.0);
  h.y.assign(total, 0.0);
  h.z.assign(total, 0.0);

  const double* mx = t.mx.data();
  const double* my = t.my.data();
  const double* mz = t.mz.data();
  for (std::size_t k = 0; k < lat.cell.size(); k++) {
    const int cc = lat.cell[k];
    const int L = lat.nl[k], R = lat.nr[k], D = lat.nd[k], U = lat.nu[k];
    const double wL = lat.wl[k], wR = lat.wr[k], wD = lat.wd[k],
                 wU = lat.wu[k];
    const double wsum = wL + wR + wD + wU;

    double hx = c.bx, hy = c.by, hz = c.bz + c.c_an * mz[cc];
    hx += c.c_ex * (wL * mx[L] + wR * mx[R] + wD * mx[D] + wU * mx[U] -
                    wsum * mx[cc]);
    hy += c.c_ex * (wL * my[L] + wR * my[R] + wD * my[D] + wU * my[U] -
                    wsum * my[cc]);
    hz += c.c_ex * (wL * mz[L] + wR * mz[R] + wD * mz[D] + wU * mz[U] -
                    wsum * mz[cc]);
    hx += c.c_dmi * (wR * mz[R] - wL * mz[L]);
    hy += c.c_dmi * (wU * mz[U] - wD * mz[D]);
    hz += c.c_dmi * (wL * mx[L] - wR * mx[R] + wD * my[D] - wU * my[U]);

    h.x[cc] = hx;
    h.y[cc] = hy;
    h.z[cc] = hz;
  }
}

// Heun stepper with reusable stage buffers. Stage 1 also reports the largest
// |m x H|/Ms so relaxation can test convergence without an extra field pass.
struct Stepper {
  const Lattice& lat;
  const MaterialParams& p;
  FieldCoef fc;
  DriveCoef dc;
  double gp;           // gamma0/(1+alpha^2)
  bool damping_only = false;
  double inv_h = 0;

  std::vector<double> t1x, t1y, t1z, t2x, t2y, t2z;
  Texture pred;
  double stage1_max_torque = 0;  // |m x H|/Ms at the last stage-1 texture

  Stepper(const Lattice& l, const Texture& t, const MaterialParams& pp,
          const std::array<double, 3>& b_ext, const DriveParams* d)
      : lat(l), p(pp) {
    fc = field_coef(pp, t.cell_size, b_ext, FieldAll);
    dc = drive_coef(pp, d);
    gp = cst::gamma0 / (1.0 + pp.alpha * pp.alpha);
    inv_h = 1.0 / t.cell_size;
    const std::size_t total = t.mx.size();
    t1x.assign(total, 0.0); t1y.assign(total, 0.0); t1z.assign(total, 0.0);
    t2x.assign(total, 0.0); t2y.assign(total, 0.0); t2z.assign(total, 0.0);
    pred = t;
  }

  void torque_into(const Texture& t, std::vector<double>& ox,
                   std::vector<double>& oy, std::vector<double>& oz,
                   bool track_torque) {
    const double* mx = t.mx.data();
    const double* my = t.my.data();
    const double* mz = t.mz.data();
    double max_tq2 = 0;
    for (std::size_t k = 0; k < lat.cell.size(); k++) {
      const int cc = lat.cell[k];
      const int L = lat.nl[k], R = lat.nr[k], D = lat.nd[k], U = lat.nu[k];
      const double wL = lat.wl[k], wR = lat.wr[k], wD = lat.wd[k],
                   wU = lat.wu[k];
      const double wsum = wL + wR + wD + wU;
      const double mxc = mx[cc], myc = my[cc], mzc = mz[cc];

      double hx = fc.bx, hy = fc.by, hz = fc.bz + fc.c_an * mzc;
      hx += fc.c_ex *
            (wL * mx[L] + wR * mx[R] + wD * mx[D] + wU * mx[U] - wsum * mxc);
      hy += fc.c_ex *
            (wL * my[L] + wR * my[R] + wD * my[D] + wU * my[U] - wsum * myc);
      hz += fc.c_ex *
            (wL * mz[L] + wR * mz[R] + wD * mz[D] + wU * mz[U] - wsum * mzc);
      hx += fc.c_dmi * (wR * mz[R] - wL * mz[L]);
      hy += fc.c_dmi * (wU * mz[U] - wD * mz[D]);
      hz += fc.c_dmi * (wL * mx[L] - wR * mx[R] + wD * my[D] - wU * my[U]);

      const double px = myc * hz - mzc * hy;
      const double py = mzc * hx - mxc * hz;
      const double pz = mxc * hy - myc * hx;
      if (track_torque) {
        const double tq2 = px * px + py * py + pz * pz;
        if (tq2 > max_tq2) max_tq2 = tq2;
      }
      const double qx = myc * pz - mzc * py;
      const double qy = mzc * px - mxc * pz;
      const double qz = mxc * py - myc * px;

      double tx, ty, tz;
      if (damping_only) {
        tx = -gp * p.alpha * qx;
        ty = -gp * p.alpha * qy;
        tz = -gp * p.alpha * qz;
      } else {
        tx = -gp * (px + p.alpha * qx);
        ty = -gp * (py + p.alpha * qy);
        tz = -gp * (pz + p.alpha * qz);
      }

      if (dc.sot) {
        const double ax = myc * dc.sz - mzc * dc.sy;
        const double ay = mzc * dc.sx - mxc * dc.sz;
        const double az = mxc * dc.sy - myc * dc.sx;
        tx -= gp * dc.aj * (myc * az - mzc * ay);
        ty -= gp * dc.aj * (mzc * ax - mxc * az);
        tz -= gp * dc.aj * (mxc * ay - myc * ax);
      }
      if (dc.stt) {
        // (u . grad) m, centered where possible, one-sided at edges
        double ax = 0, ay = 0, az = 0;
        const double dXw = wL + wR, dYw = wD + wU;
        if (dXw > 0) {
          const double f = dc.ux * inv_h / dXw;
          ax += f * (wR * (mx[R] - mxc) + wL * (mxc - mx[L]));
          ay += f * (wR * (my[R] - myc) + wL * (myc - my[L]));
          az += f * (wR * (mz[R] - mzc) + wL * (mzc - mz[L]));
        }
        if (dYw > 0) {
          const double f = dc.uy * inv_h / dYw;
          ax += f * (wU * (mx[U] - mxc) + wD * (mxc - mx[D]));
          ay += f * (wU * (my[U] - myc) + wD * (myc - my[D]));
          az += f * (wU * (mz[U] - mzc) + wD * (mzc - mz[D]));
        }
        tx += -ax + dc.beta * (myc * az - mzc * ay);
        ty += -ay + dc.beta * (mzc * ax - mxc * az);
        tz += -az + dc.beta * (mxc * ay - myc * ax);
      }

      ox[cc] = tx;
      oy[cc] = ty;
      oz[cc] = tz;
    }
    if (track_torque) stage1_max_torque = std::sqrt(max_tq2) / p.Ms;
  }

  void stage1(const Texture& t) { torque_into(t, t1x, t1y, t1z, true); }

  // Completes the Heun step from the stage-1 slopes. Returns false and
  // leaves t untouched when the corrector drifts |m| off unity by > 1e-3.
  bool finish(Texture& t, double dt) {
    for (std::size_t k = 0; k < lat.cell.size(); k++) {
      const int cc = lat.cell[k];
      pred.mx[cc] = t.mx[cc] + dt * t1x[cc];
      pred.my[cc] = t.my[cc] + dt * t1y[cc];
      pred.mz[cc] = t.mz[cc] + dt * t1z[cc];
    }
    torque_into(pred, t2x, t2y, t2z, false);

    const double half = 0.5 * dt;
    double max_drift = 0;
    for (std::size_t k = 0; k < lat.cell.size(); k++) {
      const int cc = lat.cell[k];
      const double vx = t.mx[cc] + half * (t1x[cc] + t2x[cc]);
      const double vy = t.my[cc] + half * (t1y[cc] + t2y[cc]);
      const double vz = t.mz[cc] + half * (t1z[cc] + t2z[cc]);
      const double n = std::sqrt(vx * vx + vy * vy + vz * vz);
      const double drift = std::fabs(n - 1.0);
      if (drift > max_drift) max_drift = drift;
      pred.mx[cc] = vx;
      pred.my[cc] = vy;
      pred.mz[cc] = vz;
    }
    // NaN compares false both ways; reject unless provably small
    if (!(max_drift <= 1e-3)) return false;

    for (std::size_t k = 0; k < lat.cell.size(); k++) {
      const int cc = lat.cell[k];
      const double inv = 1.0 / std::sqrt(pred.mx[cc] * pred.mx[cc] +
                                         pred.my[cc] * pred.my[cc] +
                                         pred.mz[cc] * pred.mz[cc]);
      t.mx[cc] = pred.mx[cc] * inv;
      t.my[cc] = pred.my[cc] * inv;
      t.mz[cc] = pred.mz[cc] * inv;
    }
    return true;
  }
};

double max_field_mag(const Lattice& lat, const Texture& t,
                     const MaterialParams& p,
                     const std::array<double, 3>& b_ext) {
  VectorField h;
  field_into(lat, t, field_coef(p, t.cell_size, b_ext, FieldAll), h);
  double m2 = 0;
  for (int cc : lat.cell) {
    const double v =
        h.x[cc] * h.x[cc] + h.y[cc] * h.y[cc] + h.z[cc] * h.z[cc];
    if (v > m2) m2 = v;
  }
  return std::sqrt(m2);
}

// Stiffness scale governing the explicit-step stability: the checkerboard
// mode of the exchange response (eigenvalue 8 of the 5-point stencil) plus
// the local-field scales. At equilibrium |H_eff| alone is small while the
// curvature stays stiff, so the current field is only an additive term.
double stability_field(const Lattice& lat, const Texture& t,
                       const MaterialParams& p,
                       const std::array<double, 3>& b_ext) {
  const FieldCoef c = field_coef(p, t.cell_size, b_ext, FieldAll);
  return 8.0 * c.c_ex + std::fabs(c.c_an) + max_field_mag(lat, t, p, b_ext);
}

// Weighted mz < 0 centroid plus the circle-equivalent diameter; count is the
// number of core cells (0 means the core unwound).
struct CorePos {
  double x = 0, y = 0;
  double diameter = 0;
  long long count = 0;
};

CorePos core_position(const Lattice& lat, const Texture& t) {
  CorePos c;
  double wsum = 0, xs = 0, ys = 0;
  const double h = t.cell_size;
  const int nx = t.nx;
  for (int cc : lat.cell) {
    const double mzv = t.mz[cc];
    if (mzv < 0) {
      const double w = -mzv;
      const int i = cc % nx, j = cc / nx;
      xs += w * (i + 0.5) * h;
      ys += w * (j + 0.5) * h;
      wsum += w;
      c.count++;
    }
  }
  if (c.count > 0) {
    c.x = xs / wsum;
    c.y = ys / wsum;
    c.diameter = 2.0 * std::sqrt(static_cast<double>(c.count) * h * h /
                                 cst::pi);
  }
  return c;
}

}  // namespace

Texture uniform_texture(const TrackGeometry& g, double mz) {
  Texture t;
  t.nx = g.nx;
  t.ny = g.ny;
  t.cell_size = g.cell_size;
  const std::size_t total = static_cast<std::size_t>(g.nx) * g.ny;
  t.mx.assign(total, 0.0);
  t.my.assign(total, 0.0);
  t.mz.assign(total, 0.0);
  for (int j = 0; j < g.ny; j++)
    for (int i = 0; i < g.nx; i++)
      if (g.inside(i, j)) t.mz[t.idx(i, j)] = mz;
  return t;
}

void seed_skyrmion(const TrackGeometry& g, Texture& t, double cx, double cy,
                   double radius, double wall_width) {
  if (radius <= 0 || wall_width <= 0)
    throw Error(ErrorKind::ArgumentError,
                "seed radius and wall width must be > 0");
  const double h = g.cell_size;
  const double sR = std::sinh(radius / wall_width);
  for (int j = 0; j < g.ny; j++) {
    for (int i = 0; i < g.nx; i++) {
      if (!g.inside(i, j)) continue;
      const double dx = (i + 0.5) * h - cx;
      const double dy = (j + 0.5) * h - cy;
      const double rho = std::sqrt(dx * dx + dy * dy);
      // 2*pi domain-wall profile: theta = pi at the core, 0 far away
      const double theta = 2.0 * std::atan2(sR, std::sinh(rho / wall_width));
      const double st = std::sin(theta);
      const std::size_t c = t.idx(i, j);
      if (rho > 1e-30) {
        t.mx[c] = st * dx / rho;
        t.my[c] = st * dy / rho;
      } else {
        t.mx[c] = 0;
        t.my[c] = 0;
      }
      t.mz[c] = std::cos(theta);
    }
  }
}

VectorField effective_field(const TrackGeometry& g, const Texture& t,
                            const MaterialParams& p,
                            const std::array<double, 3>& b_ext,
                            unsigned terms) {
  Lattice lat(g);
  VectorField h;
  field_into(lat, t, field_coef(p, t.cell_size, b_ext, terms), h);
  return h;
}

double total_energy(const TrackGeometry& g, const Texture& t,
                    const MaterialParams& p,
                    const std::array<double, 3>& b_ext, unsigned terms) {
  const double h = t.cell_size;
  const double vol = h * h * p.thickness;
  const double k_eff = p.Ku - 0.5 * cst::mu0 * p.Ms * p.Ms;
  const double c_ex = p.Aex * p.thickness;       // per link |dm|^2
  const double c_dmi = p.Dmi * h * p.thickness;  // per link chiral term

  double e_ex = 0, e_dmi = 0, e_cell = 0;
  for (int j = 0; j < g.ny; j++) {
    for (int i = 0; i < g.nx; i++) {
      if (!g.inside(i, j)) continue;
      const std::size_t c = t.idx(i, j);
      const double mxc = t.mx[c], myc = t.my[c], mzc = t.mz[c];

      if ((terms & FieldAnisotropy))
        e_cell += k_eff * vol * (1.0 - mzc * mzc);
      if ((terms & FieldZeeman))
        e_cell -= p.Ms * vol *
                  (mxc * b_ext[0] + myc * b_ext[1] + mzc * b_ext[2]);

      if (i + 1 < g.nx && g.inside(i + 1, j)) {
        const std::size_t r = c + 1;
        const double dx = t.mx[r] - mxc, dy = t.my[r] - myc,
                     dz = t.mz[r] - mzc;
        if (terms & FieldExchange)
          e_ex += dx * dx + dy * dy + dz * dz;
        if (terms & FieldDmi) e_dmi += mzc * t.mx[r] - mxc * t.mz[r];
      }
      if (j + 1 < g.ny && g.inside(i, j + 1)) {
        const std::size_t u = c + g.nx;
        const double dx = t.mx[u] - mxc, dy = t.my[u] - myc,
                     dz = t.mz[u] - mzc;
        if (terms & FieldExchange)
          e_ex += dx * dx + dy * dy + dz * dz;
        if (terms & FieldDmi) e_dmi += mzc * t.my[u] - myc * t.mz[u];
      }
    }
  }
  return c_ex * e_ex + c_dmi * e_dmi + e_cell;
}

double topological_charge(const TrackGeometry& g, const Texture& t) {
  auto solid = [&](std::size_t a, std::size_t b, std::size_t c) {
    const double ax = t.mx[a], ay = t.my[a], az = t.mz[a];
    const double bx = t.mx[b], by = t.my[b], bz = t.mz[b];
    const double cx = t.mx[c], cy = t.my[c], cz = t.mz[c];
    const double num = ax * (by * cz - bz * cy) + ay * (bz * cx - bx * cz) +
                       az * (bx * cy - by * cx);
    const double den = 1.0 + (ax * bx + ay * by + az * bz) +
                       (bx * cx + by * cy + bz * cz) +
                       (cx * ax + cy * ay + cz * az);
    return 2.0 * std::atan2(num, den);
  };

  double sum = 0;
  for (int j = 0; j + 1 < g.ny; j++) {
    for (int i = 0; i + 1 < g.nx; i++) {
      if (!(g.inside(i, j) && g.inside(i + 1, j) && g.inside(i + 1, j + 1) &&
            g.inside(i, j + 1)))
        continue;
      const std::size_t c1 = t.idx(i, j);
      const std::size_t c2 = t.idx(i + 1, j);
      const std::size_t c3 = t.idx(i + 1, j + 1);
      const std::size_t c4 = t.idx(i, j + 1);
      sum += solid(c1, c2, c3) + solid(c1, c3, c4);
    }
  }
  return sum / (4.0 * cst::pi);
}

SkyrmionObservables observe(const TrackGeometry& g, const Texture& t,
                            const MaterialParams& p,
                            const std::array<double, 3>& b_ext) {
  SkyrmionObservables o;
  Lattice lat(g);
  o.q = topological_charge(g, t);
  o.energy = total_energy(g, t, p, b_ext);
  CorePos c = core_position(lat, t);
  if (c.count > 0) {
    o.core = {c.x, c.y};
    o.diameter = c.diameter;
  } else {
    // no reversed region: report the softest cell, zero size
    double mn = std::numeric_limits<double>::infinity();
    for (int cc : lat.cell)
      if (t.mz[cc] < mn) {
        mn = t.mz[cc];
        o.core = {(cc % t.nx + 0.5) * t.cell_size,
                  (cc / t.nx + 0.5) * t.cell_size};
      }
    o.diameter = 0;
  }
  return o;
}

void step_llg(const TrackGeometry& g, Texture& t, const MaterialParams& p,
              const DriveParams* drive, double dt) {
  if (!(dt > 0)) throw Error(ErrorKind::ArgumentError, "dt must be > 0");
  Lattice lat(g);
  const std::array<double, 3> b =
      drive ? drive->b_ext : std::array<double, 3>{0, 0, 0};
  Stepper st(lat, t, p, b, drive);
  st.stage1(t);
  if (!st.finish(t, dt))
    throw Error(ErrorKind::StepUnstable,
                "|m| drifted beyond 1e-3 in one step; reduce dt");
}

double suggest_dt(const TrackGeometry& g, const Texture& t,
                  const MaterialParams& p, const DriveParams* drive) {
  Lattice lat(g);
  const std::array<double, 3> b =
      drive ? drive->b_ext : std::array<double, 3>{0, 0, 0};
  const double gp = cst::gamma0 / (1.0 + p.alpha * p.alpha);
  double rate = gp * stability_field(lat, t, p, b);
  DriveCoef dc = drive_coef(p, drive);
  if (dc.sot) rate += gp * std::fabs(dc.aj);
  if (dc.stt)
    rate += (std::fabs(dc.ux) + std::fabs(dc.uy)) / t.cell_size;
  if (rate <= 0) throw Error(ErrorKind::ArgumentError, "zero-rate texture");
  // Heun on the precessional mode stays contractive up to w*dt ~ 1 at
  // alpha = 0.1; half of that keeps the checkerboard mode at roundoff.
  return 0.5 / rate;
}

RelaxResult relax(const TrackGeometry& g, Texture& t, const MaterialParams& p,
                  double max_time, double torque_tol) {
  if (!(max_time > 0) || !(torque_tol > 0))
    throw Error(ErrorKind::ArgumentError,
                "max_time and torque_tol must be > 0");
  Lattice lat(g);
  Stepper st(lat, t, p, {0, 0, 0}, nullptr);
  st.damping_only = true;

  const double gp = cst::gamma0 / (1.0 + p.alpha * p.alpha);
  const double h_stab = stability_field(lat, t, p, {0, 0, 0});
  if (h_stab == 0) return {0, 0, 0};  // vacuum-only or field-free texture
  // damping flow is contractive for rate*dt < 2; stay at half that
  double dt = 1.0 / (gp * p.alpha * h_stab);

  const double dt0 = dt;
  RelaxResult res;
  for (;;) {
    st.stage1(t);
    res.max_torque = st.stage1_max_torque;
    if (res.max_torque < torque_tol) return res;
    if (res.time >= max_time)
      throw Error(ErrorKind::NoConvergence,
                  "torque " + std::to_string(res.max_torque) +
                      " above tolerance after " +
                      std::to_string(max_time * 1e9) + " ns");
    int tries = 0;
    while (!st.finish(t, dt)) {
      if (++tries > 10)
        throw Error(ErrorKind::StepUnstable,
                    "relaxation unstable after 10 dt halvings");
      dt *= 0.5;
    }
    if (tries == 0) dt = std::min(dt * 1.001, dt0);
    res.time += dt;
    res.steps++;
  }
}

DiodeOutcome run_diode_llg(const ExperimentConfig& cfg, DriveDirection dir) {
  const TrackGeometry g = build_t_track(cfg);
  const MaterialParams mat = material_from_config(cfg);
  const DerivedScales sc = derive_scales(mat);
  DriveParams drv = drive_from_config(cfg);
  const double timeout = cfg.num("thiele", "timeout");
  const double relax_max_time = cfg.num("drive", "relax_max_time");
  const double relax_tol = cfg.num("drive", "relax_torque_tol");
  double seed_r = cfg.num("drive", "seed_radius");
  if (seed_r <= 0) seed_r = 2.0 * sc.delta_dw;

  const diode_rule::Protocol proto = diode_rule::make(g, dir);
  diode_rule::Monitor monitor(proto);

  // the DMI edge twist of a finite mask carries a static fraction of a
  // unit of charge; the skyrmion charge below is referenced against the
  // relaxed skyrmion-free track so a healthy skyrmion reads -1
  Texture bg = uniform_texture(g);
  relax(g, bg, mat, relax_max_time, relax_tol);
  const double q_bg = topological_charge(g, bg);

  Texture tex = uniform_texture(g);
  seed_skyrmion(g, tex, proto.start[0], proto.start[1], seed_r, sc.delta_dw);
  relax(g, tex, mat, relax_max_time, relax_tol);

  // reverse bias flips the charge current, hence the torque polarization
  if (!proto.fwd)
    for (double& c : drv.polarization) c = -c;

  Lattice lat(g);
  Stepper st(lat, tex, mat, drv.b_ext, &drv);
  double dt = suggest_dt(g, tex, mat, &drv);

  const long long cadence = 50;  // steps between classification checks
  const long long est_steps =
      static_cast<long long>(std::ceil(timeout / (dt * cadence)));
  const long long stride = cadence * std::max(1LL, est_steps / 4096);

  DiodeOutcome out;
  auto sample = [&](const std::array<double, 2>& r,
                    const std::array<double, 2>& v, double tnow, double q) {
    out.trajectory.push_back({r, v, tnow});
    out.charge.push_back(q);
    out.energy.push_back(total_energy(g, tex, mat, drv.b_ext));
  };

  CorePos c0 = core_position(lat, tex);
  std::array<double, 2> r_prev{c0.x, c0.y};
  double t_prev = 0;
  sample(r_prev, {0, 0}, 0, topological_charge(g, tex) - q_bg);
  monitor.feed(r_prev, {0, 0});

  const double dt0 = dt;
  double t_now = 0;
  long long k = 0;
  while (t_now < timeout) {
    st.stage1(tex);
    int tries = 0;
    while (!st.finish(tex, dt)) {
      if (++tries > 10)
        throw Error(ErrorKind::StepUnstable,
                    "drive step unstable after 10 dt halvings");
      dt *= 0.5;
    }
    // creep back toward the baseline step once the rough patch passes
    if (tries == 0) dt = std::min(dt * 1.001, dt0);
    t_now += dt;
    k++;
    if (k % cadence != 0) continue;

    const CorePos cp = core_position(lat, tex);
    const double q = topological_charge(g, tex) - q_bg;
    if (cp.count == 0 || std::fabs(q) < 0.5) {
      out.cls = DiodeClass::Annihilated;
      out.time = t_now;
      std::array<double, 2> r{cp.x, cp.y};
      sample(r, {0, 0}, t_now, q);
      out.min_throat_dist = monitor.min_throat_dist;
      return out;
    }
    const std::array<double, 2> r{cp.x, cp.y};
    const std::array<double, 2> v{(r[0] - r_prev[0]) / (t_now - t_prev),
                                  (r[1] - r_prev[1]) / (t_now - t_prev)};
    r_prev = r;
    t_prev = t_now;
    if (k % stride == 0) sample(r, v, t_now, q);

    if (auto cls = monitor.feed(r, v)) {
      out.cls = *cls;
      out.time = t_now;
      if (k % stride != 0) sample(r, v, t_now, q);
      out.min_throat_dist = monitor.min_throat_dist;
      return out;
    }
  }

  out.cls = DiodeClass::Stalled;
  out.time = std::numeric_limits<double>::quiet_NaN();
  out.min_throat_dist = monitor.min_throat_dist;
  return out;
}

void write_snapshot_csv(const TrackGeometry& g, const Texture& t,
                        const std::string& path, int stride) {
  if (stride < 1) throw Error(ErrorKind::ArgumentError, "stride must be >= 1");
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw Error(ErrorKind::IoError, "cannot open " + path);
  std::fprintf(f, "x_nm,y_nm,mx,my,mz\n");
  const double h = t.cell_size;
  for (int j = 0; j < g.ny; j += stride) {
    for (int i = 0; i < g.nx; i += stride) {
      if (!g.inside(i, j)) continue;
      const std::size_t c = t.idx(i, j);
      std::fprintf(f, "%.10g,%.10g,%.10g,%.10g,%.10g\n", (i + 0.5) * h * 1e9,
                   (j + 0.5) * h * 1e9, t.mx[c], t.my[c], t.mz[c]);
    }
  }
  std::fclose(f);
}

}  // namespace skyrlab
