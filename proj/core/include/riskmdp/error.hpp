#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace riskmdp {

enum class ErrorCode {
  LengthMismatch,
  NegativeProbability,
  ZeroMass,
  BadNormalization,
  DomainError,
  InvalidSpec,
  Overflow,
  NotCoherent,
  InfeasibleAction,
  InfeasiblePolicy,
  DimensionMismatch,
  NotContractive,
  PreconditionViolated,
  TooLargeForEnumeration,
  MonotonicityViolation,
  InvalidParams,
  InvalidModel,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception thrown by every fallible operation in the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace riskmdp
