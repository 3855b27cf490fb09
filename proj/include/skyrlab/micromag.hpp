#pragma once

#include <array>
#include <string>
#include <vector>

#include "skyrlab/config.hpp"
#include "skyrlab/geometry.hpp"
#include "skyrlab/params.hpp"
#include "skyrlab/thiele.hpp"

namespace skyrlab {

// Unit magnetization on the track raster; vacuum cells hold zero vectors and
// never enter the dynamics.
struct Texture {
  int nx = 0;
  int ny = 0;
  double cell_size = 0;  // m
  std::vector<double> mx, my, mz;

  std::size_t idx(int i, int j) const {
    return static_cast<std::size_t>(j) * nx + i;
  }
};

// Contribution selectors for effective_field / total_energy.
enum FieldTerm : unsigned {
  FieldExchange = 1u,
  FieldDmi = 2u,
  FieldAnisotropy = 4u,
  FieldZeeman = 8u,
  FieldAll = 15u,
};

struct VectorField {
  int nx = 0;
  int ny = 0;
  std::vector<double> x, y, z;  // A/m, zero on vacuum cells
};

Texture uniform_texture(const TrackGeometry& g, double mz = 1.0);

// 2*pi domain-wall skyrmion written into t: core mz = -1 at (cx, cy) in the
// +z background, radius R, wall width w, in-plane Neel pointing outward (the
// D > 0 ground-state chirality here).
void seed_skyrmion(const TrackGeometry& g, Texture& t, double cx, double cy,
                   double radius, double wall_width);

// H_eff = -(1/(mu0 Ms V)) dE/dm, the exact gradient of total_energy on the
// same raster, with the anisotropy using k_eff = Ku - mu0*Ms^2/2. Missing
// neighbors drop out of the link sums, which is the variational free
// boundary condition.
VectorField effective_field(const TrackGeometry& g, const Texture& t,
                            const MaterialParams& p,
                            const std::array<double, 3>& b_ext,
                            unsigned terms = FieldAll);

double total_energy(const TrackGeometry& g, const Texture& t,
                    const MaterialParams& p,
                    const std::array<double, 3>& b_ext,
                    unsigned terms = FieldAll);

// Berg-Luscher lattice solid angle over triangulated plaquettes / 4pi.
double topological_charge(const TrackGeometry& g, const Texture& t);

struct SkyrmionObservables {
  double q = 0;
  std::array<double, 2> core{0, 0};  // m, centroid of the mz < 0 region
  double diameter = 0;  // m, circle equivalent of the mz < 0 area
  double energy = 0;    // J
};

SkyrmionObservables observe(const TrackGeometry& g, const Texture& t,
                            const MaterialParams& p,
                            const std::array<double, 3>& b_ext);

// One Heun step of the explicit Landau-Lifshitz form
//   dm/dt = -g' m x H - g' alpha m x (m x H) + torque(drive),
// g' = gamma0/(1+alpha^2); drive may be null. Renormalizes afterwards and
// throws StepUnstable (texture untouched) when the corrector leaves |m| off
// unity by more than 1e-3.
void step_llg(const TrackGeometry& g, Texture& t, const MaterialParams& p,
              const DriveParams* drive, double dt);

// Conservative fixed step: half the explicit stability limit, which is set
// by the exchange-stencil stiffness (checkerboard mode) plus the local
// field and torque rates. Texture-dependent only through max|H_eff|.
double suggest_dt(const TrackGeometry& g, const Texture& t,
                  const MaterialParams& p, const DriveParams* drive);

struct RelaxResult {
  double time = 0;        // s of damping-only flow
  double max_torque = 0;  // final max |m x H|/Ms
  long long steps = 0;
};

// Damping-only descent (precession off, no drive, B = 0) until
// max |m x H|/Ms < torque_tol; throws NoConvergence at max_time.
RelaxResult relax(const TrackGeometry& g, Texture& t, const MaterialParams& p,
                  double max_time, double torque_tol);

// Full protocol on the configured track: uniform +z, seed in the injection
// arm, relax, then drive with the configured torque until the shared diode
// rule fires or [thiele] timeout runs out. Annihilated when |Q| drops under
// 0.5 (or the core vanishes) mid-run.
DiodeOutcome run_diode_llg(const ExperimentConfig& cfg, DriveDirection dir);

// Per-cell CSV x_nm,y_nm,mx,my,mz over masked cells at the given stride.
void write_snapshot_csv(const TrackGeometry& g, const Texture& t,
                        const std::string& path, int stride = 1);

}  // namespace skyrlab
