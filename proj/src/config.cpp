#include "skyrlab/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "skyrlab/error.hpp"

namespace skyrlab {

namespace {

constexpr double kUnbounded = std::numeric_limits<double>::quiet_NaN();

struct KeySpec {
  const char* section;
  const char* key;
  ValueType type;
  double def_f;          // Float/Int default
  const char* def_s;     // Token default ("" for numeric), Bool: "true"/"false"
  double lo, hi;         // inclusive unless marked exclusive; NaN = unbounded
  bool lo_excl, hi_excl;
  const char* allowed;   // Token: '|'-separated tokens
};

// Section order is the canonical serialization order.
constexpr std::array<const char*, 8> kSectionOrder = {
    "material", "geometry", "drive", "thiele",
    "rotor",    "lindblad", "transmon", "output"};

// Full schema. Zero means "derive automatically" for the keys whose comment
// says so; the derivation is logged by the consuming module.
const KeySpec kSchema[] = {
    // [material] baseline hard-magnet parameters
    {"material", "Aex", ValueType::Float, 15e-12, "", 0, kUnbounded, true, false, ""},
    {"material", "Dmi", ValueType::Float, 3.0e-3, "", kUnbounded, kUnbounded, false, false, ""},
    {"material", "Ku", ValueType::Float, 0.8e6, "", 0, kUnbounded, false, false, ""},
    {"material", "Ms", ValueType::Float, 580e3, "", 0, kUnbounded, true, false, ""},
    {"material", "alpha", ValueType::Float, 0.1, "", 0, 1, true, false, ""},
    {"material", "thickness", ValueType::Float, 1e-9, "", 0, kUnbounded, true, false, ""},
    {"material", "units", ValueType::Token, 0, "SI", 0, 0, false, false, "SI"},

    // [geometry] T-track raster and confinement potential
    {"geometry", "arm_width_in", ValueType::Float, 50e-9, "", 0, kUnbounded, true, false, ""},
    {"geometry", "arm_width_out", ValueType::Float, 75e-9, "", 0, kUnbounded, true, false, ""},
    {"geometry", "cell_size", ValueType::Float, 1e-9, "", 0, kUnbounded, true, false, ""},
    {"geometry", "potential_lambda", ValueType::Float, 0, "", 0, kUnbounded, false, false, ""},  // 0 = delta_dw
    {"geometry", "potential_u0", ValueType::Float, 5.6e-20, "", 0, kUnbounded, true, false, ""},
    {"geometry", "stem_width", ValueType::Float, 30e-9, "", 0, kUnbounded, true, false, ""},
    {"geometry", "stem_x", ValueType::Float, 195e-9, "", 0, kUnbounded, true, false, ""},
    {"geometry", "throat_width", ValueType::Float, 22e-9, "", 0, kUnbounded, false, false, ""},
    {"geometry", "track_length", ValueType::Float, 300e-9, "", 0, kUnbounded, true, false, ""},
    {"geometry", "track_width", ValueType::Float, 100e-9, "", 0, kUnbounded, true, false, ""},
    {"geometry", "units", ValueType::Token, 0, "SI", 0, 0, false, false, "SI"},
    {"geometry", "wedge_slope", ValueType::Float, 3.0, "", 0, kUnbounded, true, false, ""},

    // [drive] current drive, external field, relaxation protocol
    {"drive", "b_ext_x", ValueType::Float, 0, "", kUnbounded, kUnbounded, false, false, ""},
    {"drive", "b_ext_y", ValueType::Float, 0, "", kUnbounded, kUnbounded, false, false, ""},
    {"drive", "b_ext_z", ValueType::Float, 0, "", kUnbounded, kUnbounded, false, false, ""},
    {"drive", "current_density", ValueType::Float, 0.2e12, "", 0, kUnbounded, false, false, ""},
    {"drive", "nonadiabaticity_beta", ValueType::Float, 0.1, "", kUnbounded, kUnbounded, false, false, ""},
    {"drive", "polarization_p", ValueType::Float, 0.5, "", 0, 1, true, false, ""},
    {"drive", "polarization_x", ValueType::Float, 0, "", kUnbounded, kUnbounded, false, false, ""},
    {"drive", "polarization_y", ValueType::Float, -1, "", kUnbounded, kUnbounded, false, false, ""},
    {"drive", "polarization_z", ValueType::Float, 0, "", kUnbounded, kUnbounded, false, false, ""},
    {"drive", "relax_max_time", ValueType::Float, 20e-9, "", 0, kUnbounded, true, false, ""},
    {"drive", "relax_torque_tol", ValueType::Float, 3e-3, "", 0, kUnbounded, true, false, ""},  // profile settles here; tighter budgets chase edge creep
    {"drive", "seed_radius", ValueType::Float, 0, "", 0, kUnbounded, false, false, ""},  // 0 = 2*delta_dw
    {"drive", "spin_hall_angle", ValueType::Float, 0.10, "", kUnbounded, kUnbounded, false, false, ""},
    {"drive", "torque_kind", ValueType::Token, 0, "sot", 0, 0, false, false, "sot|stt"},
    {"drive", "units", ValueType::Token, 0, "SI", 0, 0, false, false, "SI"},

    // [thiele] collective-coordinate model
    {"thiele", "core_radius", ValueType::Float, 6.5e-9, "", 0, kUnbounded, true, false, ""},
    {"thiele", "d_diss", ValueType::Float, 0, "", 0, kUnbounded, false, false, ""},  // 0 = shape estimate
    {"thiele", "dt", ValueType::Float, 1e-13, "", 0, kUnbounded, true, false, ""},
    {"thiele", "g_gyro", ValueType::Float, 0, "", kUnbounded, kUnbounded, false, false, ""},  // 0 = 4*pi*Q*mu0*Ms*t/gamma0
    {"thiele", "sweep_j_max", ValueType::Float, 1e12, "", 0, kUnbounded, false, false, ""},
    {"thiele", "sweep_j_min", ValueType::Float, 0, "", 0, kUnbounded, false, false, ""},
    {"thiele", "sweep_j_points", ValueType::Int, 11, "", 1, kUnbounded, false, false, ""},
    {"thiele", "timeout", ValueType::Float, 20e-9, "", 0, kUnbounded, true, false, ""},
    {"thiele", "units", ValueType::Token, 0, "SI", 0, 0, false, false, "SI"},

    // [rotor] helicity qubit, energies in units of kappa_z
    {"rotor", "e_z", ValueType::Float, 1, "", kUnbounded, kUnbounded, false, false, ""},
    {"rotor", "eta", ValueType::Float, 1, "", 0, 1, false, false, ""},
    {"rotor", "eta_points", ValueType::Int, 41, "", 2, kUnbounded, false, false, ""},
    {"rotor", "h_z", ValueType::Float, 0, "", kUnbounded, kUnbounded, false, false, ""},
    {"rotor", "k2", ValueType::Float, 10, "", kUnbounded, kUnbounded, false, false, ""},
    {"rotor", "kappa_z", ValueType::Float, 1, "", 0, kUnbounded, true, false, ""},
    {"rotor", "m_max", ValueType::Int, 40, "", 10, kUnbounded, false, false, ""},
    {"rotor", "n_levels", ValueType::Int, 6, "", 3, kUnbounded, false, false, ""},
    {"rotor", "units", ValueType::Token, 0, "natural", 0, 0, false, false, "natural"},

    // [lindblad] two-level open system, time in units of 1/J
    {"lindblad", "delta", ValueType::Float, 0, "", kUnbounded, kUnbounded, false, false, ""},
    {"lindblad", "eta", ValueType::Float, 1, "", 0, 1, false, false, ""},
    {"lindblad", "eta_points", ValueType::Int, 41, "", 2, kUnbounded, false, false, ""},
    {"lindblad", "gamma_max", ValueType::Float, 1, "", 0, kUnbounded, false, false, ""},
    {"lindblad", "j_coupling", ValueType::Float, 1, "", 0, kUnbounded, false, false, ""},
    {"lindblad", "t_max", ValueType::Float, 10, "", 0, kUnbounded, true, false, ""},
    {"lindblad", "t_points", ValueType::Int, 400, "", 2, kUnbounded, false, false, ""},
    {"lindblad", "units", ValueType::Token, 0, "natural", 0, 0, false, false, "natural"},

    // [transmon] SQUID transmon plus the stray-field estimator
    {"transmon", "charge_cutoff", ValueType::Int, 0, "", 0, kUnbounded, false, false, ""},  // 0 = auto
    {"transmon", "dipole_loop_side", ValueType::Float, 100e-9, "", 0, kUnbounded, true, false, ""},
    {"transmon", "dipole_ms", ValueType::Float, 1e6, "", 0, kUnbounded, true, false, ""},
    {"transmon", "dipole_volume", ValueType::Float, 8e-24, "", 0, kUnbounded, true, false, ""},
    {"transmon", "dipole_z_max", ValueType::Float, 100e-9, "", 0, kUnbounded, true, false, ""},
    {"transmon", "dipole_z_min", ValueType::Float, 20e-9, "", 0, kUnbounded, true, false, ""},
    {"transmon", "dipole_z_points", ValueType::Int, 9, "", 1, kUnbounded, false, false, ""},
    {"transmon", "ec", ValueType::Float, 0.2, "", 0, kUnbounded, true, false, ""},
    {"transmon", "ej_sigma", ValueType::Float, 50, "", 0, kUnbounded, true, false, ""},
    {"transmon", "eps_max", ValueType::Float, 0.5, "", 0, 1, false, true, ""},
    {"transmon", "eps_points", ValueType::Int, 11, "", 1, kUnbounded, false, false, ""},
    {"transmon", "exact_column", ValueType::Bool, 0, "true", 0, 0, false, false, ""},
    {"transmon", "phi_points", ValueType::Int, 201, "", 2, kUnbounded, false, false, ""},
    {"transmon", "units", ValueType::Token, 0, "GHz", 0, 0, false, false, "GHz"},

    // [output] artifact controls
    {"output", "sample_dt", ValueType::Float, 1e-11, "", 0, kUnbounded, true, false, ""},
    {"output", "snapshot_stride", ValueType::Int, 0, "", 0, kUnbounded, false, false, ""},
    {"output", "units", ValueType::Token, 0, "SI", 0, 0, false, false, "SI"},
};

bool known_section(const std::string& s) {
  return std::any_of(kSectionOrder.begin(), kSectionOrder.end(),
                     [&](const char* name) { return s == name; });
}

const KeySpec* find_spec(const std::string& section, const std::string& key) {
  for (const auto& spec : kSchema) {
    if (section == spec.section && key == spec.key) return &spec;
  }
  return nullptr;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool token_allowed(const std::string& tok, const char* allowed) {
  std::string list(allowed);
  size_t pos = 0;
  while (pos <= list.size()) {
    size_t bar = list.find('|', pos);
    std::string item = list.substr(pos, bar == std::string::npos ? std::string::npos : bar - pos);
    if (tok == item) return true;
    if (bar == std::string::npos) break;
    pos = bar + 1;
  }
  return false;
}

bool parse_number(const std::string& text, double& out) {
  std::string t = text;
  if (!t.empty() && t[0] == '+') t = t.substr(1);
  const char* begin = t.c_str();
  const char* end = begin + t.size();
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end;
}

bool parse_integer(const std::string& text, long long& out) {
  std::string t = text;
  if (!t.empty() && t[0] == '+') t = t.substr(1);
  const char* begin = t.c_str();
  const char* end = begin + t.size();
  auto res = std::from_chars(begin, end, out);
  return res.ec == std::errc() && res.ptr == end;
}

std::string bound_text(const KeySpec& spec) {
  std::string s;
  if (!std::isnan(spec.lo)) {
    s += spec.lo_excl ? "> " : ">= ";
    s += format_double(spec.lo);
  }
  if (!std::isnan(spec.hi)) {
    if (!s.empty()) s += " and ";
    s += spec.hi_excl ? "< " : "<= ";
    s += format_double(spec.hi);
  }
  return s;
}

bool check_bounds(const KeySpec& spec, double v) {
  if (!std::isnan(spec.lo) && (spec.lo_excl ? v <= spec.lo : v < spec.lo)) return false;
  if (!std::isnan(spec.hi) && (spec.hi_excl ? v >= spec.hi : v > spec.hi)) return false;
  return true;
}

std::string render(const Value& v) {
  switch (v.type) {
    case ValueType::Float: return format_double(v.f);
    case ValueType::Int:   return std::to_string(v.i);
    case ValueType::Bool:  return v.b ? "true" : "false";
    case ValueType::Token: return v.s;
  }
  return "";
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double ExperimentConfig::num(const std::string& section, const std::string& key) const {
  return sections.at(section).at(key).f;
}

long long ExperimentConfig::integer(const std::string& section, const std::string& key) const {
  return sections.at(section).at(key).i;
}

bool ExperimentConfig::flag(const std::string& section, const std::string& key) const {
  return sections.at(section).at(key).b;
}

const std::string& ExperimentConfig::token(const std::string& section, const std::string& key) const {
  return sections.at(section).at(key).s;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::vector<std::string> violations;

  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    size_t hash = line.find_first_of("#;");
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        violations.push_back("line " + std::to_string(lineno) + ": malformed section header '" + line + "'");
        section.clear();
        continue;
      }
      section = trim(line.substr(1, line.size() - 2));
      if (!known_section(section)) {
        violations.push_back("unknown section [" + section + "]");
        section.clear();  // swallow its keys; the section itself is the error
      }
      continue;
    }

    size_t eq = line.find('=');
    if (eq == std::string::npos) {
      violations.push_back("line " + std::to_string(lineno) + ": expected 'key = value', got '" + line + "'");
      continue;
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (section.empty()) continue;  // already reported the bad section

    const KeySpec* spec = find_spec(section, key);
    if (!spec) {
      violations.push_back(section + "." + key + ": unknown key");
      continue;
    }
    if (cfg.sections[section].count(key)) {
      violations.push_back(section + "." + key + ": duplicate key");
      continue;
    }

    Value v;
    v.type = spec->type;
    switch (spec->type) {
      case ValueType::Float: {
        if (!parse_number(value, v.f)) {
          violations.push_back(section + "." + key + ": not a number ('" + value + "')");
          continue;
        }
        if (!std::isfinite(v.f)) {
          violations.push_back(section + "." + key + ": must be finite");
          continue;
        }
        if (!check_bounds(*spec, v.f)) {
          violations.push_back(section + "." + key + ": must be " + bound_text(*spec) +
                               " (got " + format_double(v.f) + ")");
          continue;
        }
        break;
      }
      case ValueType::Int: {
        if (!parse_integer(value, v.i)) {
          violations.push_back(section + "." + key + ": not an integer ('" + value + "')");
          continue;
        }
        if (!check_bounds(*spec, static_cast<double>(v.i))) {
          violations.push_back(section + "." + key + ": must be " + bound_text(*spec) +
                               " (got " + std::to_string(v.i) + ")");
          continue;
        }
        break;
      }
      case ValueType::Bool: {
        if (value == "true") v.b = true;
        else if (value == "false") v.b = false;
        else {
          violations.push_back(section + "." + key + ": expected true or false ('" + value + "')");
          continue;
        }
        break;
      }
      case ValueType::Token: {
        if (!token_allowed(value, spec->allowed)) {
          violations.push_back(section + "." + key + ": must be one of {" +
                               std::string(spec->allowed) + "} ('" + value + "')");
          continue;
        }
        v.s = value;
        break;
      }
    }
    cfg.sections[section][key] = v;
  }

  // Fill in every missing key from the schema and log the default.
  for (const auto& spec : kSchema) {
    auto& sec = cfg.sections[spec.section];
    if (sec.count(spec.key)) continue;
    Value v;
    v.type = spec.type;
    switch (spec.type) {
      case ValueType::Float: v.f = spec.def_f; break;
      case ValueType::Int:   v.i = static_cast<long long>(spec.def_f); break;
      case ValueType::Bool:  v.b = std::string(spec.def_s) == "true"; break;
      case ValueType::Token: v.s = spec.def_s; break;
    }
    sec[spec.key] = v;
    cfg.applied_defaults.push_back(std::string(spec.section) + "." + spec.key + " = " + render(v));
  }

  // Cross-key checks.
  {
    double px = cfg.num("drive", "polarization_x");
    double py = cfg.num("drive", "polarization_y");
    double pz = cfg.num("drive", "polarization_z");
    double norm = std::sqrt(px * px + py * py + pz * pz);
    if (std::abs(norm - 1.0) > 1e-3) {
      violations.push_back("drive.polarization_*: must be a unit vector (|p| = " +
                           format_double(norm) + ")");
    }
    if (cfg.num("geometry", "throat_width") > cfg.num("geometry", "arm_width_in")) {
      violations.push_back("geometry.throat_width: must be <= arm_width_in");
    }
    if (cfg.num("thiele", "sweep_j_min") > cfg.num("thiele", "sweep_j_max")) {
      violations.push_back("thiele.sweep_j_min: must be <= sweep_j_max");
    }
    if (cfg.num("transmon", "dipole_z_min") > cfg.num("transmon", "dipole_z_max")) {
      violations.push_back("transmon.dipole_z_min: must be <= dipole_z_max");
    }
  }

  if (!violations.empty()) {
    throw Error(ErrorKind::SchemaError,
                std::to_string(violations.size()) + " config violation(s)", violations);
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::IoError, "cannot open config file '" + path + "'");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_config(const ExperimentConfig& cfg) {
  std::string out;
  bool first = true;
  for (const char* name : kSectionOrder) {
    auto it = cfg.sections.find(name);
    if (it == cfg.sections.end()) continue;
    if (!first) out += "\n";
    first = false;
    out += "[";
    out += name;
    out += "]\n";
    for (const auto& [key, value] : it->second) {
      out += key;
      out += " = ";
      out += render(value);
      out += "\n";
    }
  }
  return out;
}

std::string config_hash(const ExperimentConfig& cfg) {
  std::string canon = canonical_config(cfg);
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace skyrlab
