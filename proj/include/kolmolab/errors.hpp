#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace kolmolab {

enum class ErrorKind {
  kPrecondition,
  kRange,
  kDomain,
  kValidation,
  kPending,
  kOraclePigeonhole,
  kInvariant,
  kParse,
};

std::string_view to_string(ErrorKind kind);

/// Checked error carrying a machine-readable kind. Every failure the library
/// reports to callers goes through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        detail_(message) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kPrecondition: return "PRECONDITION_VIOLATION";
    case ErrorKind::kRange: return "RANGE_ERROR";
    case ErrorKind::kDomain: return "DOMAIN_ERROR";
    case ErrorKind::kValidation: return "VALIDATION_ERROR";
    case ErrorKind::kPending: return "PENDING";
    case ErrorKind::kOraclePigeonhole: return "ORACLE_PIGEONHOLE_VIOLATION";
    case ErrorKind::kInvariant: return "INVARIANT_VIOLATION";
    case ErrorKind::kParse: return "PARSE_ERROR";
  }
  return "UNKNOWN";
}

}  // namespace kolmolab
