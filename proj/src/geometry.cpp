#include "skyrlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <vector>

#include "skyrlab/error.hpp"
#include "skyrlab/params.hpp"

namespace skyrlab {

namespace {

int cells_along(double span, double h) {
  return static_cast<int>(std::llround(span / h));
}

// 1D squared-distance transform, lower envelope of parabolas
// (Felzenszwalb-Huttenlocher). f and out may not alias.
void dt_1d(const double* f, double* out, int n, int* v, double* z) {
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  for (int q = 1; q < n; q++) {
    double s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
               (2.0 * q - 2.0 * v[k]);
    while (s <= z[k]) {
      k--;
      s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) /
          (2.0 * q - 2.0 * v[k]);
    }
    k++;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; q++) {
    while (z[k + 1] < q) k++;
    double dq = double(q) - v[k];
    out[q] = dq * dq + f[v[k]];
  }
}

// Exact squared Euclidean cell-center distances to the nearest site on a
// grid padded with one frame ring; pass a site predicate over padded
// coordinates.
template <typename SiteAt>
std::vector<double> edt_sq(int nx, int ny, SiteAt site) {
  const int px = nx + 2, py = ny + 2;
  const double far = 1e15;
  std::vector<double> g(static_cast<std::size_t>(px) * py);
  for (int j = 0; j < py; j++)
    for (int i = 0; i < px; i++)
      g[static_cast<std::size_t>(j) * px + i] = site(i, j) ? 0.0 : far;

  std::vector<double> col(py), colout(py);
  std::vector<int> v(std::max(px, py));
  std::vector<double> z(std::max(px, py) + 1);
  for (int i = 0; i < px; i++) {
    for (int j = 0; j < py; j++) col[j] = g[static_cast<std::size_t>(j) * px + i];
    dt_1d(col.data(), colout.data(), py, v.data(), z.data());
    for (int j = 0; j < py; j++) g[static_cast<std::size_t>(j) * px + i] = colout[j];
  }
  std::vector<double> row(px), rowout(px);
  for (int j = 0; j < py; j++) {
    for (int i = 0; i < px; i++) row[i] = g[static_cast<std::size_t>(j) * px + i];
    dt_1d(row.data(), rowout.data(), px, v.data(), z.data());
    for (int i = 0; i < px; i++) g[static_cast<std::size_t>(j) * px + i] = rowout[i];
  }
  // strip the frame
  std::vector<double> out(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; j++)
    for (int i = 0; i < nx; i++)
      out[static_cast<std::size_t>(j) * nx + i] =
          g[static_cast<std::size_t>(j + 1) * px + (i + 1)];
  return out;
}

void check_connected(const TrackGeometry& g) {
  const std::size_t n = g.mask.size();
  std::size_t total = 0;
  std::size_t first = n;
  for (std::size_t c = 0; c < n; c++) {
    if (g.mask[c]) {
      total++;
      if (first == n) first = c;
    }
  }
  if (total == 0) throw Error(ErrorKind::DegenerateGeometry, "empty mask");
  std::vector<std::uint8_t> seen(n, 0);
  std::vector<std::size_t> stack{first};
  seen[first] = 1;
  std::size_t reached = 0;
  while (!stack.empty()) {
    std::size_t c = stack.back();
    stack.pop_back();
    reached++;
    int i = static_cast<int>(c % g.nx), j = static_cast<int>(c / g.nx);
    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
    for (int k = 0; k < 4; k++) {
      int ii = i + di[k], jj = j + dj[k];
      if (ii < 0 || ii >= g.nx || jj < 0 || jj >= g.ny) continue;
      std::size_t cc = static_cast<std::size_t>(jj) * g.nx + ii;
      if (g.mask[cc] && !seen[cc]) {
        seen[cc] = 1;
        stack.push_back(cc);
      }
    }
  }
  if (reached != total)
    throw Error(ErrorKind::DegenerateGeometry,
                "mask splits into disconnected regions");
}

}  // namespace

TrackGeometry build_t_track(const ExperimentConfig& cfg) {
  TrackGeometry g;
  g.cell_size = cfg.num("geometry", "cell_size");
  g.track_length = cfg.num("geometry", "track_length");
  g.track_width = cfg.num("geometry", "track_width");
  g.arm_width_in = cfg.num("geometry", "arm_width_in");
  g.arm_width_out = cfg.num("geometry", "arm_width_out");
  g.stem_width = cfg.num("geometry", "stem_width");
  g.throat_width = cfg.num("geometry", "throat_width");
  g.stem_x = cfg.num("geometry", "stem_x");
  g.wedge_slope = cfg.num("geometry", "wedge_slope");
  g.junction_x = g.stem_x + g.stem_width;
  g.wide_side = WideSide::Right;

  DerivedScales sc = derive_scales(material_from_config(cfg));
  double finest = std::min(sc.l_ex, sc.delta_dw);
  // continuum rule cell <= min(l_ex, delta_dw)/5, allowing 25% slack so the
  // reference 1 nm raster of the 300x100 track stays valid
  if (g.cell_size > finest / 5.0 * 1.25)
    throw Error(ErrorKind::ResolutionError,
                "cell_size " + format_double(g.cell_size) +
                    " m exceeds min(l_ex, delta_dw)/5 = " +
                    format_double(finest / 5.0) + " m");

  if (g.throat_width <= 0.0)
    throw Error(ErrorKind::DegenerateGeometry, "throat_width must be > 0");
  if (g.arm_width_in > g.track_width || g.arm_width_out > g.track_width)
    throw Error(ErrorKind::DegenerateGeometry,
                "arm width exceeds track_width");
  if (g.stem_x <= 0.0 || g.junction_x >= g.track_length)
    throw Error(ErrorKind::DegenerateGeometry,
                "stem column must sit strictly inside the track");

  g.nx = cells_along(g.track_length, g.cell_size);
  g.ny = cells_along(g.track_width, g.cell_size);
  if (g.nx < 4 || g.ny < 4)
    throw Error(ErrorKind::DegenerateGeometry, "raster too small");

  g.mask.assign(static_cast<std::size_t>(g.nx) * g.ny, 0);
  const double h = g.cell_size;
  const double W = g.track_width;
  const double tip_y = W - g.throat_width;  // wedge apex height at junction_x
  for (int j = 0; j < g.ny; j++) {
    double yc = (j + 0.5) * h;
    for (int i = 0; i < g.nx; i++) {
      double xc = (i + 0.5) * h;
      bool in_input = xc < g.junction_x && yc >= W - g.arm_width_in;
      bool in_stem = xc >= g.stem_x && xc < g.junction_x;
      bool in_output = false;
      if (xc >= g.junction_x && yc >= W - g.arm_width_out) {
        double wedge_top = tip_y - g.wedge_slope * (xc - g.junction_x);
        in_output = yc >= wedge_top;
      }
      if (in_input || in_stem || in_output)
        g.mask[static_cast<std::size_t>(j) * g.nx + i] = 1;
    }
  }
  check_connected(g);
  return g;
}

TrackGeometry mirror_x(const TrackGeometry& g) {
  TrackGeometry m = g;
  for (int j = 0; j < g.ny; j++)
    for (int i = 0; i < g.nx; i++)
      m.mask[static_cast<std::size_t>(j) * g.nx + i] =
          g.mask[static_cast<std::size_t>(j) * g.nx + (g.nx - 1 - i)];
  m.stem_x = g.track_length - g.junction_x;
  m.junction_x = m.stem_x + g.stem_width;
  m.wide_side = g.wide_side == WideSide::Right ? WideSide::Left : WideSide::Right;
  return m;
}

std::vector<double> distance_field(const TrackGeometry& g) {
  const int nx = g.nx, ny = g.ny;
  auto sq = edt_sq(nx, ny, [&](int pi, int pj) {
    // padded coords; the frame ring and every vacuum cell are sites
    if (pi == 0 || pj == 0 || pi == nx + 1 || pj == ny + 1) return true;
    return !g.inside(pi - 1, pj - 1);
  });
  std::vector<double> d(sq.size(), 0.0);
  for (std::size_t c = 0; c < sq.size(); c++)
    if (g.mask[c]) d[c] = g.cell_size * std::sqrt(sq[c]);
  return d;
}

std::vector<double> signed_distance_field(const TrackGeometry& g) {
  const int nx = g.nx, ny = g.ny;
  auto sq_in = edt_sq(nx, ny, [&](int pi, int pj) {
    if (pi == 0 || pj == 0 || pi == nx + 1 || pj == ny + 1) return true;
    return !g.inside(pi - 1, pj - 1);
  });
  auto sq_out = edt_sq(nx, ny, [&](int pi, int pj) {
    if (pi == 0 || pj == 0 || pi == nx + 1 || pj == ny + 1) return false;
    return g.inside(pi - 1, pj - 1);
  });
  std::vector<double> d(sq_in.size());
  for (std::size_t c = 0; c < d.size(); c++)
    d[c] = g.mask[c] ? g.cell_size * std::sqrt(sq_in[c])
                     : -g.cell_size * std::sqrt(sq_out[c]);
  return d;
}

ConfinementPotential build_potential(const TrackGeometry& g, double u0,
                                     double lambda) {
  if (!(u0 > 0.0) || !(lambda > 0.0))
    throw Error(ErrorKind::ArgumentError, "build_potential needs U0 > 0 and lambda > 0");
  ConfinementPotential p;
  p.nx = g.nx;
  p.ny = g.ny;
  p.cell_size = g.cell_size;
  p.u0 = u0;
  p.lambda = lambda;
  auto sd = signed_distance_field(g);
  p.u.resize(sd.size());
  for (std::size_t c = 0; c < sd.size(); c++) p.u[c] = u0 * std::exp(-sd[c] / lambda);
  p.du_dx.assign(sd.size(), 0.0);
  p.du_dy.assign(sd.size(), 0.0);
  const double h = g.cell_size;
  auto at = [&](int i, int j) { return p.u[static_cast<std::size_t>(j) * g.nx + i]; };
  for (int j = 0; j < g.ny; j++) {
    for (int i = 0; i < g.nx; i++) {
      std::size_t c = static_cast<std::size_t>(j) * g.nx + i;
      if (i == 0)
        p.du_dx[c] = (at(1, j) - at(0, j)) / h;
      else if (i == g.nx - 1)
        p.du_dx[c] = (at(g.nx - 1, j) - at(g.nx - 2, j)) / h;
      else
        p.du_dx[c] = (at(i + 1, j) - at(i - 1, j)) / (2.0 * h);
      if (j == 0)
        p.du_dy[c] = (at(i, 1) - at(i, 0)) / h;
      else if (j == g.ny - 1)
        p.du_dy[c] = (at(i, g.ny - 1) - at(i, g.ny - 2)) / h;
      else
        p.du_dy[c] = (at(i, j + 1) - at(i, j - 1)) / (2.0 * h);
    }
  }
  return p;
}

void write_mask_pgm(const TrackGeometry& g, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoError, "cannot open " + path);
  f << "P5\n" << g.nx << " " << g.ny << "\n255\n";
  std::vector<unsigned char> row(g.nx);
  for (int j = g.ny - 1; j >= 0; j--) {  // top scanline first
    for (int i = 0; i < g.nx; i++) row[i] = g.inside(i, j) ? 255 : 0;
    f.write(reinterpret_cast<const char*>(row.data()), g.nx);
  }
  if (!f) throw Error(ErrorKind::IoError, "short write to " + path);
}

void write_potential_csv(const ConfinementPotential& p, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::IoError, "cannot open " + path);
  f << "x_nm,y_nm,U_joule\n";
  for (int j = 0; j < p.ny; j++) {
    for (int i = 0; i < p.nx; i++) {
      double x = (i + 0.5) * p.cell_size * 1e9;
      double y = (j + 0.5) * p.cell_size * 1e9;
      f << format_double(x) << ',' << format_double(y) << ','
        << format_double(p.u[static_cast<std::size_t>(j) * p.nx + i]) << '\n';
    }
  }
  if (!f) throw Error(ErrorKind::IoError, "short write to " + path);
}

}  // namespace skyrlab
