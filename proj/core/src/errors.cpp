#include "dyson/errors.hpp"

namespace dyson {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
  case ErrorKind::NonFinite: return "NonFinite";
  case ErrorKind::SingularMatrix: return "SingularMatrix";
  case ErrorKind::NoConvergence: return "NoConvergence";
  case ErrorKind::NotHermitian: return "NotHermitian";
  case ErrorKind::DimensionMismatch: return "DimensionMismatch";
  case ErrorKind::UnknownKind: return "UnknownKind";
  case ErrorKind::CondBoundViolated: return "CondBoundViolated";
  case ErrorKind::BadExplicitMatrix: return "BadExplicitMatrix";
  case ErrorKind::ParseError: return "ParseError";
  case ErrorKind::ValidationError: return "ValidationError";
  case ErrorKind::DegenerateStep: return "DegenerateStep";
  case ErrorKind::IllConditionedDyson: return "IllConditionedDyson";
  case ErrorKind::MetricNotPositive: return "MetricNotPositive";
  case ErrorKind::NotQuasiHermitian: return "NotQuasiHermitian";
  case ErrorKind::InsufficientPoints: return "InsufficientPoints";
  case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

} // namespace dyson
