#include "riskmdp/error.hpp"

namespace riskmdp {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NegativeProbability: return "NegativeProbability";
    case ErrorCode::ZeroMass: return "ZeroMass";
    case ErrorCode::BadNormalization: return "BadNormalization";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::NotCoherent: return "NotCoherent";
    case ErrorCode::InfeasibleAction: return "InfeasibleAction";
    case ErrorCode::InfeasiblePolicy: return "InfeasiblePolicy";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotContractive: return "NotContractive";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::TooLargeForEnumeration: return "TooLargeForEnumeration";
    case ErrorCode::MonotonicityViolation: return "MonotonicityViolation";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::InvalidModel: return "InvalidModel";
  }
  return "Unknown";
}

}  // namespace riskmdp
