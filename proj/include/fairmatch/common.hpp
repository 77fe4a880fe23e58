#pragma once

#include <charconv>
#include <stdexcept>
#include <string>

namespace fairmatch {

/// Tolerance for event coincidence in the float engines and for invariant checks.
inline constexpr double kEpsNum = 1e-9;

/// Tolerance used when checking dual certificates.
inline constexpr double kCertTolerance = 1e-6;

class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CapacityExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class InsufficientSamples : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require_unit_interval(double value, const char* name) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw InvalidParameter(std::string(name) + " must lie in [0,1], got " + std::to_string(value));
  }
}

/// Shortest round-trip decimal form; used for every CSV/JSON number we emit.
inline std::string format_double(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) return std::to_string(value);
  return std::string(buffer, end);
}

}  // namespace fairmatch
