#pragma once

#include <stdexcept>
#include <string>

namespace stablesup {

enum class ErrorCode {
  OutOfRange,
  DegenerateRho,
  NonPositiveT,
  DomainError,
  CauchyMode,
  CauchyModeMismatch,
  MomentDoesNotExist,
  IndexOrder,
  KappaTooSmall,
  CapacityExceeded,
  LevelOrder,
  MissingOrder,
  OutsideSupport,
  PreconditionViolated,
  EmptyGrid,
  QuadratureFailure,
  DivergentIntegral,
  InvalidArgument,
};

const char* to_string(ErrorCode c) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// KappaTooSmall carries the smallest admissible kappa.
class KappaError : public Error {
 public:
  KappaError(double kappa_min, const std::string& what)
      : Error(ErrorCode::KappaTooSmall, what), kappa_min_(kappa_min) {}
  double kappa_min() const noexcept { return kappa_min_; }

 private:
  double kappa_min_;
};

}  // namespace stablesup
