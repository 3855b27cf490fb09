#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace skyrlab {

// Every failure mode the library reports. The kind survives the trip
// through the C boundary so callers can dispatch without string matching.
enum class ErrorKind {
  SchemaError,
  NonPerpendicularEasyAxis,
  ResolutionError,
  DegenerateGeometry,
  StepUnstable,
  NoConvergence,
  SingularMobility,
  LeftDomain,
  InvalidState,
  TruncationError,
  CutoffError,
  OutOfRegime,
  EmptyWindow,
  EmptyTable,
  IoError,
  ArgumentError,
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::SchemaError:              return "SchemaError";
    case ErrorKind::NonPerpendicularEasyAxis: return "NonPerpendicularEasyAxis";
    case ErrorKind::ResolutionError:          return "ResolutionError";
    case ErrorKind::DegenerateGeometry:       return "DegenerateGeometry";
    case ErrorKind::StepUnstable:             return "StepUnstable";
    case ErrorKind::NoConvergence:            return "NoConvergence";
    case ErrorKind::SingularMobility:         return "SingularMobility";
    case ErrorKind::LeftDomain:               return "LeftDomain";
    case ErrorKind::InvalidState:             return "InvalidState";
    case ErrorKind::TruncationError:          return "TruncationError";
    case ErrorKind::CutoffError:              return "CutoffError";
    case ErrorKind::OutOfRegime:              return "OutOfRegime";
    case ErrorKind::EmptyWindow:              return "EmptyWindow";
    case ErrorKind::EmptyTable:               return "EmptyTable";
    case ErrorKind::IoError:                  return "IoError";
    case ErrorKind::ArgumentError:            return "ArgumentError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message)
      : std::runtime_error(to_string(kind) + std::string(": ") + message),
        kind_(kind) {}

  // Schema errors carry the full list of violations so a bad config is
  // reported in one shot instead of one key at a time.
  Error(ErrorKind kind, std::string message, std::vector<std::string> violations)
      : std::runtime_error(join(kind, message, violations)),
        kind_(kind),
        violations_(std::move(violations)) {}

  ErrorKind kind() const { return kind_; }
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(ErrorKind kind, const std::string& message,
                          const std::vector<std::string>& violations) {
    std::string s = to_string(kind) + std::string(": ") + message;
    for (const auto& v : violations) {
      s += "\n  - " + v;
    }
    return s;
  }

  ErrorKind kind_;
  std::vector<std::string> violations_;
};

}  // namespace skyrlab
