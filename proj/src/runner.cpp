#include "skyrlab/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <filesystem>
#include <functional>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "skyrlab/csv.hpp"
#include "skyrlab/error.hpp"
#include "skyrlab/geometry.hpp"
#include "skyrlab/helicity.hpp"
#include "skyrlab/lindblad.hpp"
#include "skyrlab/micromag.hpp"
#include "skyrlab/params.hpp"
#include "skyrlab/svg.hpp"
#include "skyrlab/thiele.hpp"
#include "skyrlab/transmon.hpp"
#include "diode_rule.hpp"

namespace skyrlab {
namespace {

namespace fs = std::filesystem;

// Output bytes must not depend on the thread count, so work items write to
// preassigned slots and the loop only trades wall time.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::min(std::max(threads, 1), n > 0 ? n : 1);
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::mutex mu;
  std::exception_ptr first;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      for (int i = t; i < n; i += threads) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first) first = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first) std::rethrow_exception(first);
}

std::string iso_utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec);
  return buf;
}

std::string join(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::string fd(double v) { return format_double(v); }

void note(const RunOptions& opt, const std::string& line) {
  if (opt.verbose) std::fprintf(stderr, "%s\n", line.c_str());
}

double lambda_or_default(const ExperimentConfig& cfg) {
  const double lam = cfg.num("geometry", "potential_lambda");
  if (lam > 0) return lam;
  return derive_scales(material_from_config(cfg)).delta_dw;
}

// Bilinear sample of U at r, cell centers at ((i+0.5)h, (j+0.5)h), clamped
// to the raster so trajectory exports never index out of range.
double sample_u(const ConfinementPotential& pot, double x, double y) {
  const double h = pot.cell_size;
  double fx = x / h - 0.5, fy = y / h - 0.5;
  fx = std::clamp(fx, 0.0, (double)pot.nx - 1.0);
  fy = std::clamp(fy, 0.0, (double)pot.ny - 1.0);
  const int i = std::min((int)fx, pot.nx - 2);
  const int j = std::min((int)fy, pot.ny - 2);
  const double ax = fx - i, ay = fy - j;
  const std::size_t c = (std::size_t)j * pot.nx + i;
  return (1 - ay) * ((1 - ax) * pot.u[c] + ax * pot.u[c + 1]) +
         ay * ((1 - ax) * pot.u[c + pot.nx] + ax * pot.u[c + pot.nx + 1]);
}

Table trajectory_table(const DiodeOutcome& o,
                       const ConfinementPotential* pot) {
  Table t({"t_ns", "x_nm", "y_nm", "Q", "E_joule"});
  for (std::size_t k = 0; k < o.trajectory.size(); ++k) {
    const auto& s = o.trajectory[k];
    const double q = k < o.charge.size() ? o.charge[k] : -1.0;
    const double e = k < o.energy.size()
                         ? o.energy[k]
                         : (pot ? sample_u(*pot, s.r[0], s.r[1])
                                : std::numeric_limits<double>::quiet_NaN());
    t.add_row({fd(s.t * 1e9), fd(s.r[0] * 1e9), fd(s.r[1] * 1e9), fd(q), fd(e)});
  }
  return t;
}

Table diode_summary_table(const DiodeOutcome& fwd, const DiodeOutcome& rev) {
  Table t({"direction", "class", "time_ns", "min_throat_dist_nm"});
  t.add_row({"forward", to_string(fwd.cls), fd(fwd.time * 1e9),
             fd(fwd.min_throat_dist * 1e9)});
  t.add_row({"reverse", to_string(rev.cls), fd(rev.time * 1e9),
             fd(rev.min_throat_dist * 1e9)});
  return t;
}

std::string trajectory_svg(const DiodeOutcome& fwd, const DiodeOutcome& rev,
                           const TrackGeometry& g) {
  std::vector<LineSeries> series(3);
  series[0].label = "forward";
  for (const auto& s : fwd.trajectory) {
    series[0].x.push_back(s.r[0] * 1e9);
    series[0].y.push_back(s.r[1] * 1e9);
  }
  series[1].label = "reverse";
  for (const auto& s : rev.trajectory) {
    series[1].x.push_back(s.r[0] * 1e9);
    series[1].y.push_back(s.r[1] * 1e9);
  }
  // track outline scale reference: bounding box corners
  series[2].label = "track bounds";
  const double L = g.track_length * 1e9, W = g.track_width * 1e9;
  series[2].x = {0, L, L, 0, 0};
  series[2].y = {0, 0, W, W, 0};
  return svg_lines(series, "diode trajectories", "x [nm]", "y [nm]");
}

struct Artifacts {
  std::vector<std::string> files;  // relative names, manifest excluded
  void csv(const std::string& out_dir, const std::string& name, const Table& t) {
    write_csv(t, join(out_dir, name));
    files.push_back(name);
  }
  void text(const std::string& out_dir, const std::string& name,
            const std::string& body) {
    write_text_file(join(out_dir, name), body);
    files.push_back(name);
  }
};

// ---- subcommand bodies ----------------------------------------------------

void cmd_relax(const ExperimentConfig& cfg, const std::string& out,
               const RunOptions& opt, Artifacts& a) {
  const TrackGeometry g = build_t_track(cfg);
  const MaterialParams mat = material_from_config(cfg);
  const DerivedScales sc = derive_scales(mat);
  Texture tex = uniform_texture(g);
  const auto proto = diode_rule::make(g, DriveDirection::Forward);
  double radius = cfg.num("drive", "seed_radius");
  if (radius <= 0) radius = 2.0 * sc.delta_dw;
  seed_skyrmion(g, tex, proto.start[0], proto.start[1], radius, sc.delta_dw);
  const RelaxResult res =
      relax(g, tex, mat, cfg.num("drive", "relax_max_time"),
            cfg.num("drive", "relax_torque_tol"));
  const auto obs = observe(g, tex, mat, {0, 0, 0});
  note(opt, "relaxed in " + fd(res.time * 1e9) + " ns, " +
                std::to_string(res.steps) + " steps, torque " +
                fd(res.max_torque) + ", Q " + fd(obs.q) + ", diameter " +
                fd(obs.diameter * 1e9) + " nm");

  const int stride = std::max(1, (int)cfg.num("output", "snapshot_stride"));
  write_snapshot_csv(g, tex, join(out, "texture.csv"), stride);
  a.files.push_back("texture.csv");
  write_mask_pgm(g, join(out, "mask.pgm"));
  a.files.push_back("mask.pgm");

  if (opt.svg) {
    HeatPanel p;
    p.nx = g.nx;
    p.ny = g.ny;
    p.x0 = 0;
    p.x1 = g.track_length * 1e9;
    p.y0 = 0;
    p.y1 = g.track_width * 1e9;
    p.v.assign((std::size_t)g.nx * g.ny,
               std::numeric_limits<double>::quiet_NaN());
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        if (g.inside(i, j)) p.v[(std::size_t)j * g.nx + i] = tex.mz[tex.idx(i, j)];
      }
    }
    p.title = "relaxed m_z";
    a.text(out, "texture.svg", svg_heatmap({p}, "x [nm]", "y [nm]"));
  }
}

void cmd_diode_llg(const ExperimentConfig& cfg, const std::string& out,
                   const RunOptions& opt, Artifacts& a) {
  const TrackGeometry g = build_t_track(cfg);
  DiodeOutcome legs[2];
  parallel_for(2, opt.threads, [&](int i) {
    legs[i] = run_diode_llg(
        cfg, i == 0 ? DriveDirection::Forward : DriveDirection::Reverse);
  });
  note(opt, std::string("forward: ") + to_string(legs[0].cls) + " at " +
                fd(legs[0].time * 1e9) + " ns; reverse: " +
                to_string(legs[1].cls) + " at " + fd(legs[1].time * 1e9) +
                " ns");
  a.csv(out, "trajectory_forward.csv", trajectory_table(legs[0], nullptr));
  a.csv(out, "trajectory_reverse.csv", trajectory_table(legs[1], nullptr));
  a.csv(out, "diode.csv", diode_summary_table(legs[0], legs[1]));
  if (opt.svg) a.text(out, "trajectory.svg", trajectory_svg(legs[0], legs[1], g));
}

void cmd_diode_thiele(const ExperimentConfig& cfg, const std::string& out,
                      const RunOptions& opt, Artifacts& a) {
  const TrackGeometry g = build_t_track(cfg);
  const ConfinementPotential pot =
      build_potential(g, cfg.num("geometry", "potential_u0"), lambda_or_default(cfg));
  const ThieleParams p = thiele_from_config(cfg);
  const double timeout = cfg.num("thiele", "timeout");
  const double dt = cfg.num("thiele", "dt");
  DiodeOutcome legs[2];
  parallel_for(2, opt.threads, [&](int i) {
    legs[i] = classify_diode(
        p, pot, g, i == 0 ? DriveDirection::Forward : DriveDirection::Reverse,
        timeout, dt);
  });
  note(opt, std::string("forward: ") + to_string(legs[0].cls) + " at " +
                fd(legs[0].time * 1e9) + " ns; reverse: " +
                to_string(legs[1].cls) + " at " + fd(legs[1].time * 1e9) +
                " ns");
  a.csv(out, "trajectory_forward.csv", trajectory_table(legs[0], &pot));
  a.csv(out, "trajectory_reverse.csv", trajectory_table(legs[1], &pot));
  a.csv(out, "diode.csv", diode_summary_table(legs[0], legs[1]));
  write_potential_csv(pot, join(out, "potential.csv"));
  a.files.push_back("potential.csv");
  if (opt.svg) a.text(out, "trajectory.svg", trajectory_svg(legs[0], legs[1], g));
}

void cmd_sweep_window(const ExperimentConfig& cfg, const std::string& out,
                      const RunOptions& opt, Artifacts& a) {
  const TrackGeometry g = build_t_track(cfg);
  const ConfinementPotential pot =
      build_potential(g, cfg.num("geometry", "potential_u0"), lambda_or_default(cfg));
  const ThieleParams p = thiele_from_config(cfg);
  const int n = (int)cfg.num("thiele", "sweep_j_points");
  const double j0 = cfg.num("thiele", "sweep_j_min");
  const double j1 = cfg.num("thiele", "sweep_j_max");
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) {
    grid[i] = n == 1 ? j0 : j0 + (j1 - j0) * i / (n - 1);
  }
  const SweepResult res = efficiency_sweep(p, pot, g, grid,
                                           cfg.num("thiele", "timeout"),
                                           cfg.num("thiele", "dt"));
  note(opt, "operating window [" + fd(res.j_min) + ", " + fd(res.j_max) +
                "] A/m^2");
  Table t({"J_A_per_m2", "forward_class", "reverse_class", "tau_fwd_ns",
           "tau_rev_ns"});
  for (const auto& row : res.rows) {
    t.add_row({fd(row.j), to_string(row.forward_cls), to_string(row.reverse_cls),
               fd(row.tau_fwd * 1e9), fd(row.tau_rev * 1e9)});
  }
  a.csv(out, "sweep.csv", t);
  if (opt.svg) {
    std::vector<LineSeries> series(2);
    series[0].label = "tau_fwd [ns]";
    series[1].label = "tau_rev [ns]";
    for (const auto& row : res.rows) {
      series[0].x.push_back(row.j);
      series[0].y.push_back(row.tau_fwd * 1e9);
      series[1].x.push_back(row.j);
      series[1].y.push_back(row.tau_rev * 1e9);
    }
    a.text(out, "sweep.svg",
           svg_lines(series, "diode transit and return times", "J [A/m^2]",
                     "time [ns]"));
  }
}

void cmd_fidelity_map(const ExperimentConfig& cfg, const std::string& out,
                      const RunOptions& opt, Artifacts& a) {
  const QubitModel base = qubit_from_config(cfg);
  const int eta_points = (int)cfg.num("lindblad", "eta_points");
  const int t_points = (int)cfg.num("lindblad", "t_points");
  const double t_max = cfg.num("lindblad", "t_max");
  const FidelityMaps m = fidelity_maps(base, eta_points, t_max, t_points);
  Table t({"eta", "t_over_J", "F_forward", "F_reverse"});
  for (int ie = 0; ie < eta_points; ++ie) {
    for (int it = 0; it < t_points; ++it) {
      const std::size_t k = (std::size_t)ie * t_points + it;
      t.add_row({fd(m.eta[ie]), fd(m.t[it] * base.j_coupling), fd(m.forward[k]),
                 fd(m.reverse[k])});
    }
  }
  a.csv(out, "fidelity.csv", t);
  if (opt.svg) {
    HeatPanel pf, pr;
    pf.nx = pr.nx = t_points;
    pf.ny = pr.ny = eta_points;
    pf.x0 = pr.x0 = m.t.front() * base.j_coupling;
    pf.x1 = pr.x1 = m.t.back() * base.j_coupling;
    pf.y0 = pr.y0 = m.eta.front();
    pf.y1 = pr.y1 = m.eta.back();
    pf.v = m.forward;
    pr.v = m.reverse;
    pf.title = "F forward";
    pr.title = "F reverse";
    a.text(out, "fidelity.svg", svg_heatmap({pf, pr}, "t J", "eta"));
  }
}

void cmd_rotor_spectrum(const ExperimentConfig& cfg, const std::string& out,
                        const RunOptions& opt, Artifacts& a) {
  const RotorParams base = rotor_from_config(cfg);
  const int eta_points = (int)cfg.num("rotor", "eta_points");
  const int n_levels = (int)cfg.num("rotor", "n_levels");
  std::vector<RotorSpectrum> spectra(eta_points);
  std::vector<double> etas(eta_points);
  parallel_for(eta_points, opt.threads, [&](int i) {
    RotorParams p = base;
    etas[i] = eta_points == 1 ? base.eta : (double)i / (eta_points - 1);
    p.eta = etas[i];
    spectra[i] = rotor_spectrum(p, n_levels);
  });
  Table t({"eta", "level_index", "energy"});
  for (int i = 0; i < eta_points; ++i) {
    for (int n = 0; n < n_levels; ++n) {
      t.add_row({fd(etas[i]), std::to_string(n), fd(spectra[i].energies[n])});
    }
  }
  a.csv(out, "spectrum.csv", t);
  if (opt.svg) {
    const LevelDiagram d = level_diagram(base, 401, n_levels);
    std::vector<LineSeries> series(1 + d.energies.size());
    series[0].label = "V(phi0)";
    series[0].x = d.phi;
    series[0].y = d.potential;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t n = 0; n < d.energies.size(); ++n) {
      auto& s = series[n + 1];
      s.label = "E" + std::to_string(n);
      for (const auto& [lo, hi] : d.intervals[n]) {
        // NaN gap separates disjoint classically allowed stretches
        if (!s.x.empty()) {
          s.x.push_back(nan);
          s.y.push_back(nan);
        }
        s.x.push_back(lo);
        s.y.push_back(d.energies[n]);
        s.x.push_back(hi);
        s.y.push_back(d.energies[n]);
      }
    }
    a.text(out, "levels.svg",
           svg_lines(series, "helicity rotor levels", "phi0 [rad]", "energy"));
  }
}

void cmd_anharmonicity(const ExperimentConfig& cfg, const std::string& out,
                       const RunOptions& opt, Artifacts& a) {
  const RotorParams base = rotor_from_config(cfg);
  const auto rows =
      anharmonicity_sweep(base, (int)cfg.num("rotor", "eta_points"),
                          (int)cfg.num("rotor", "n_levels"));
  Table t({"eta", "omega01", "omega12", "delta_omega"});
  for (const auto& r : rows) {
    t.add_row({fd(r.eta), fd(r.omega01), fd(r.omega12), fd(r.delta_omega)});
  }
  a.csv(out, "anharmonicity.csv", t);
  if (opt.svg) {
    std::vector<LineSeries> series(3);
    series[0].label = "omega01";
    series[1].label = "omega12";
    series[2].label = "delta_omega";
    for (const auto& r : rows) {
      series[0].x.push_back(r.eta);
      series[0].y.push_back(r.omega01);
      series[1].x.push_back(r.eta);
      series[1].y.push_back(r.omega12);
      series[2].x.push_back(r.eta);
      series[2].y.push_back(r.delta_omega);
    }
    a.text(out, "anharmonicity.svg",
           svg_lines(series, "rotor transition frequencies", "eta", "omega"));
  }
}

void cmd_transmon_map(const ExperimentConfig& cfg, const std::string& out,
                      const RunOptions& opt, Artifacts& a) {
  const TransmonParams base = transmon_from_config(cfg);
  const int phi_points = (int)cfg.num("transmon", "phi_points");
  const int eps_points = (int)cfg.num("transmon", "eps_points");
  const bool exact = cfg.token("transmon", "exact_column") == "true";
  const auto rows =
      f01_map(base, phi_points, eps_points, cfg.num("transmon", "eps_max"),
              exact, (int)cfg.num("transmon", "charge_cutoff"));
  Table t({"phi_e", "epsilon", "EJ_eff_GHz", "f01_duffing_GHz", "f01_exact_GHz",
           "regime_flag"});
  for (const auto& r : rows) {
    t.add_row({fd(r.phi_e), fd(r.epsilon), fd(r.ej_eff_ghz),
               fd(r.f01_duffing_ghz), fd(r.f01_exact_ghz),
               r.out_of_regime ? "1" : "0"});
  }
  a.csv(out, "transmon.csv", t);
  if (opt.svg) {
    HeatPanel p;
    p.nx = phi_points;
    p.ny = eps_points;
    p.x0 = rows.front().phi_e;
    p.x1 = rows.back().phi_e;
    p.y0 = rows.front().epsilon;
    p.y1 = rows.back().epsilon;
    p.v.resize(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) p.v[k] = rows[k].f01_duffing_ghz;
    p.title = "f01 [GHz]";
    a.text(out, "transmon.svg", svg_heatmap({p}, "phi_e", "epsilon"));
  }
}

void cmd_dipole(const ExperimentConfig& cfg, const std::string& out,
                const RunOptions& opt, Artifacts& a) {
  const double ms = cfg.num("transmon", "dipole_ms");
  const double vol = cfg.num("transmon", "dipole_volume");
  const double side = cfg.num("transmon", "dipole_loop_side");
  const double z0 = cfg.num("transmon", "dipole_z_min");
  const double z1 = cfg.num("transmon", "dipole_z_max");
  const int n = (int)cfg.num("transmon", "dipole_z_points");
  std::vector<DipoleEstimate> est(n);
  parallel_for(n, opt.threads, [&](int i) {
    const double z = n == 1 ? z0 : z0 + (z1 - z0) * i / (n - 1);
    est[i] = dipole_estimate(ms, vol, z, side);
  });
  Table t({"z_nm", "Bz_mT", "flux_over_flux0"});
  for (const auto& e : est) {
    t.add_row({fd(e.z * 1e9), fd(e.b_z * 1e3), fd(e.flux_quanta)});
  }
  a.csv(out, "dipole.csv", t);
  if (opt.svg) {
    LineSeries s;
    s.label = "Bz [mT]";
    for (const auto& e : est) {
      s.x.push_back(e.z * 1e9);
      s.y.push_back(e.b_z * 1e3);
    }
    a.text(out, "dipole.svg",
           svg_lines({s}, "axial dipole field", "z [nm]", "Bz [mT]"));
  }
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = {
      "relax",          "diode-llg",     "diode-thiele",
      "sweep-window",   "fidelity-map",  "rotor-spectrum",
      "anharmonicity",  "transmon-map",  "dipole"};
  return names;
}

std::vector<std::string> run_subcommand(const std::string& name,
                                        const ExperimentConfig& cfg,
                                        const std::string& out_dir,
                                        const RunOptions& opt) {
  using Body = void (*)(const ExperimentConfig&, const std::string&,
                        const RunOptions&, Artifacts&);
  static const std::pair<const char*, Body> dispatch[] = {
      {"relax", cmd_relax},
      {"diode-llg", cmd_diode_llg},
      {"diode-thiele", cmd_diode_thiele},
      {"sweep-window", cmd_sweep_window},
      {"fidelity-map", cmd_fidelity_map},
      {"rotor-spectrum", cmd_rotor_spectrum},
      {"anharmonicity", cmd_anharmonicity},
      {"transmon-map", cmd_transmon_map},
      {"dipole", cmd_dipole},
  };
  const auto* entry = std::find_if(
      std::begin(dispatch), std::end(dispatch),
      [&](const auto& d) { return name == d.first; });
  if (entry == std::end(dispatch)) {
    throw Error(ErrorKind::ArgumentError, "unknown subcommand: " + name);
  }

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) {
    throw Error(ErrorKind::IoError,
                "cannot create output directory " + out_dir + ": " + ec.message());
  }

  const std::string started = iso_utc_now();
  Artifacts a;
  entry->second(cfg, out_dir, opt, a);

  std::sort(a.files.begin(), a.files.end());
  nlohmann::json manifest;
  manifest["config_hash"] = config_hash(cfg);
  manifest["subcommand"] = name;
  manifest["started_utc"] = started;
  manifest["finished_utc"] = iso_utc_now();
  manifest["outputs"] = a.files;
  manifest["tool_version"] = kToolVersion;
  write_text_file(join(out_dir, "manifest.json"), manifest.dump(2) + "\n");
  a.files.push_back("manifest.json");
  return a.files;
}

}  // namespace skyrlab
