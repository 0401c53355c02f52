#pragma once

#include <cstdint>

#include "stablesup/ibp.hpp"

namespace stablesup {

struct FdReport {
  double max_rel_error = 0.0;
  std::uint64_t samples = 0;
};

// Central difference of t -> X_{side,n}^power under the multiplicative
// perturbation of the D^side_m coordinates, against eta_exponent * power * X^power.
// The opposite coordinate must not move; its relative change enters the error too.
FdReport reg_fd_check(const StableParams& p, double kappa, int n, int m, double power, Side side,
                      std::uint64_t samples, std::uint64_t seed, double h = 1e-6);

// Central difference of the evaluated expression against the evaluated apply_D.
// Error is relative to the larger of |D expr| and the term-sum magnitudes of
// expr and D expr.
FdReport d_operator_fd_check(const WeightExpr& expr, Side side, const StableParams& p, double kappa, int n,
                             int m, std::uint64_t samples, std::uint64_t seed, double h = 1e-6);

// max over samples of the relative gap between
// H^{k+,k-}_{n,m} X_{+,n}^{k+} X_{-,n}^{k-} and the same at level n+1 (m > n),
// relative to the larger of either value and the term-sum magnitude.
FdReport level_shift_check(int k_plus, int k_minus, const StableParams& p, double kappa, int n, int m,
                           std::uint64_t samples, std::uint64_t seed);

// H^{+,k}(H^{-,j}(1)) == H^{-,j}(H^{+,k}(1)) as canonical forms.
bool weights_commute(int k, int j, Mode mode);

}  // namespace stablesup
