#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dyson {

enum class ErrorKind {
  NonFinite,
  SingularMatrix,
  NoConvergence,
  NotHermitian,
  DimensionMismatch,
  UnknownKind,
  CondBoundViolated,
  BadExplicitMatrix,
  ParseError,
  ValidationError,
  DegenerateStep,
  IllConditionedDyson,
  MetricNotPositive,
  NotQuasiHermitian,
  InsufficientPoints,
  IoError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

} // namespace dyson
