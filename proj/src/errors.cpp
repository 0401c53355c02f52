#include "stablesup/errors.hpp"

namespace stablesup {

const char* to_string(ErrorCode c) noexcept {
  switch (c) {
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::DegenerateRho: return "DegenerateRho";
    case ErrorCode::NonPositiveT: return "NonPositiveT";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::CauchyMode: return "CauchyMode";
    case ErrorCode::CauchyModeMismatch: return "CauchyModeMismatch";
    case ErrorCode::MomentDoesNotExist: return "MomentDoesNotExist";
    case ErrorCode::IndexOrder: return "IndexOrder";
    case ErrorCode::KappaTooSmall: return "KappaTooSmall";
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::LevelOrder: return "LevelOrder";
    case ErrorCode::MissingOrder: return "MissingOrder";
    case ErrorCode::OutsideSupport: return "OutsideSupport";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::DivergentIntegral: return "DivergentIntegral";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace stablesup
