#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace valuecert {

enum class ErrorKind {
  Syntax,
  Dimension,
  NonConstantExponent,
  Domain,
  NonDifferentiable,
  Schema,
  UnknownBuiltin,
  NotAGain,
  NumericalBreakdown,
  NotSupported,
  BoxTooSmall,
  NoConstraintDescription,
  InfeasiblePoint,
  LicqNotVerified,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::Dimension: return "DimensionError";
    case ErrorKind::NonConstantExponent: return "NonConstantExponent";
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::NonDifferentiable: return "NonDifferentiable";
    case ErrorKind::Schema: return "SchemaError";
    case ErrorKind::UnknownBuiltin: return "UnknownBuiltin";
    case ErrorKind::NotAGain: return "NotAGain";
    case ErrorKind::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorKind::NotSupported: return "NotSupported";
    case ErrorKind::BoxTooSmall: return "BoxTooSmall";
    case ErrorKind::NoConstraintDescription: return "NoConstraintDescription";
    case ErrorKind::InfeasiblePoint: return "InfeasiblePoint";
    case ErrorKind::LicqNotVerified: return "LicqNotVerified";
  }
  return "Error";
}

/// Single exception type for the library; `kind()` discriminates.
class Error : public std::runtime_error {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  Error(ErrorKind kind, const std::string& message, std::size_t position = npos)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        detail_(message),
        position_(position) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }
  /// Character offset for syntax errors, npos otherwise.
  std::size_t position() const noexcept { return position_; }

  /// Same error with a location prefix, e.g. a JSON field path.
  Error with_context(const std::string& where) const {
    return Error(kind_, where + ": " + detail_, position_);
  }

 private:
  ErrorKind kind_;
  std::string detail_;
  std::size_t position_;
};

}  // namespace valuecert
