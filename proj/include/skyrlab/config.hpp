#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace skyrlab {

enum class ValueType { Float, Int, Bool, Token };

struct Value {
  ValueType type = ValueType::Float;
  double f = 0.0;
  long long i = 0;
  bool b = false;
  std::string s;
};

// Fully validated configuration: every schema key present (user-supplied or
// defaulted), no extras. Immutable after parse.
struct ExperimentConfig {
  std::map<std::string, std::map<std::string, Value>> sections;
  std::vector<std::string> applied_defaults;  // "section.key = value" lines

  double num(const std::string& section, const std::string& key) const;
  long long integer(const std::string& section, const std::string& key) const;
  bool flag(const std::string& section, const std::string& key) const;
  const std::string& token(const std::string& section, const std::string& key) const;
};

// Parses sectioned key = value text. Collects every schema violation and
// throws a single SchemaError listing all of them.
ExperimentConfig parse_config(const std::string& text);

ExperimentConfig load_config_file(const std::string& path);

// Canonical form: fixed section order, keys alphabetical, floats as
// shortest round-trip decimals. parse(canonical(c)) == c bitwise.
std::string canonical_config(const ExperimentConfig& cfg);

// FNV-1a 64-bit hash of the canonical form, hex encoded.
std::string config_hash(const ExperimentConfig& cfg);

// Shortest round-trip decimal for a double (the float format used in the
// canonical config and in every CSV column).
std::string format_double(double x);

}  // namespace skyrlab
