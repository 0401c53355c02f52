#pragma once

#include "stablesup/rng.hpp"

namespace stablesup {

enum class Mode { Standard, Cauchy };
enum class Side { Plus, Minus };

inline constexpr double kPi = 3.14159265358979323846;

struct StableParams {
  double alpha = 1.5;
  double rho = 0.5;
  double omega = 0.0;  // pi * (rho - 1/2)
  double T = 1.0;

  bool cauchy() const noexcept { return alpha == 1.0; }
  Mode mode() const noexcept { return cauchy() ? Mode::Cauchy : Mode::Standard; }
  double zeta() const noexcept { return 1.0 - 1.0 / alpha; }
  // Exponent on eta in the remainder term: zeta, or 1 in the Cauchy case.
  double eta_exponent() const noexcept { return cauchy() ? 1.0 : zeta(); }
  // Cauchy location sin(omega) and scale cos(omega).
  double mu() const;
  double gam() const;
};

// Admissible rho range is [1 - 1/alpha, 1/alpha] intersected with (0,1);
// endpoints are compared with a 1e-12 tolerance so that decimal inputs such
// as rho = 1/3 at alpha = 1.5 are not rejected by rounding.
StableParams validate_params(double alpha, double rho, double T);

// Chambers-Mallows-Stuck kernel g on (-pi/2, pi/2). Arguments within 1e-12
// of the endpoints are clamped to pi/2 - 1e-12.
double cms_g(double x, const StableParams& p);

// One draw of S_1 (time-1 marginal with positivity rho).
double sample_stable(const StableParams& p, Stream& rng);

// Cauchy case: shifted Cauchy with location sin(omega) and scale cos(omega).
double cauchy_density(double x, double rho);
// Draw of the Cauchy-case S conditioned on sign; returns |S| (> 0).
double sample_cauchy_conditioned(const StableParams& p, Side side, Stream& rng);

// E[S^q 1{S>0}] for q in (-1, alpha).
double mellin_positive_moment(const StableParams& p, double q);
// E[G^q 1{G>0}] for q in [0, alpha), alpha != 1.
double mellin_G_moment(const StableParams& p, double q);

}  // namespace stablesup
