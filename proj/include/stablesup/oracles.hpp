#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "stablesup/stable_core.hpp"

namespace stablesup {

// ---------------------------------------------------------------- quadrature

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};
// tanh-sinh on (a, b); throws QuadratureFailure if the error estimate exceeds
// abs_tol * max(1, |value|).
QuadResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-10);
// (a, inf) through x = a + t/(1-t).
QuadResult integrate_to_infinity(const std::function<double(double)>& f, double a, double abs_tol = 1e-10);

// ------------------------------------------------------------------ constants

struct AppendixConstants {
  double alpha = 0.0, rho = 0.0;
  double zeta = 0.0;
  double c = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
  double b_rho = 0.0;
  double d(double s) const;        // 2^s max{1, s^s e^{-s}, Gamma(s+1)}
  double d_prime(double u) const;  // max{Gamma(1+u), Gamma(1+u)Gamma(1/alpha), Gamma(u+1/alpha)}
};

AppendixConstants constants(const StableParams& p);

// ------------------------------------------------------------ inequality checks

struct OraclePoint {
  double x = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double quad_error = 0.0;
};

struct OracleReport {
  std::string name;
  std::vector<OraclePoint> points;
  double max_ratio = 0.0;  // max lhs/rhs
  double min_slack = 0.0;  // min rhs - lhs
  bool pass = false;       // rhs - lhs >= -quad_error at every point
};

// E[Y^s exp(-x Y^zeta)] <= c d_s min{1, x^{-delta}}, Y unit exponential.
OracleReport check_exp_moment_bound(const StableParams& p, double s, const std::vector<double>& xs);
// E[exp(-x G) | G > 0] <= min{1, (gamma alpha rho x)^{-1}}.
OracleReport check_G_laplace_bound(const StableParams& p, const std::vector<double>& xs);
// Cauchy case: E[eta_+^s exp(-x eta_+)] against the two-branch bound (s in (0,1)),
// or min{1, (pi cos(omega) rho x)^{-1}} when s == 0.
OracleReport check_cauchy_laplace_bound(double rho, double s, const std::vector<double>& xs);

// int_1^inf x^{p-1} min{1, (bx)^{-q}} dx in closed form; p == 0 uses the log limit.
double tail_integral_P(double b, double p, double q);
double tail_integral_quadrature(double b, double p, double q);

struct SeqReport {
  std::uint64_t trials = 0;
  std::uint64_t violations = 0;
  double min_slack = 0.0;  // over both inequalities
};
SeqReport check_seq_inequalities(std::uint64_t trials, std::uint64_t seed);
// Slack rhs - lhs of the two product-vs-sum inequalities for given data (x, y in [0,1]).
std::pair<double, double> seq_inequality_slacks(double r, const std::vector<double>& x, const std::vector<double>& y);

struct AuxQR {
  double Q = 0.0;
  double R = 0.0;
};
// Requires u in (0,1], p in (0, min{alpha u, 1}), q in (0, min{alpha, 1}), r >= 0.
AuxQR aux_Q_R(double alpha, double p, double q, double r, double u);
double aux_Q(double alpha, double p, double r, double u);
// Partial sum to k = terms of
// sum_k rho(1-rho)^{k-1}(1+r)^{k-1}[(1+r-p/alpha)^{1-k}/(p(1-p)(1-p/alpha)) - (1+r)^{1-k}/p].
double q_series(double alpha, double p, double r, double rho, int terms = 200);

// ----------------------------------------------------------------- rate checks

struct InvMomentExps {
  double p = 0.3, q = 0.3, r = 1.0, u = 0.0, v = 0.0, w = 0.0;
  int j = 1;  // index of E_j
};

struct RateReport {
  std::vector<int> levels;
  std::vector<double> means;
  std::vector<double> stderrs;
  double fitted_rate = 0.0;
  double ceiling = 0.0;
  double margin = 0.05;
  std::vector<int> used_levels;
  bool pass = false;
};

// part 'a': E[l_{n+1}^r E_j^u eta_+^v eta_-^w / (X_{+,n}^p X_{-,n}^q)]
// part 'b': same with X_{-,n}^q moved to the numerator. Ceiling (1+r)^{-1}.
RateReport inverse_moment_rate_check(const StableParams& p, double kappa, const InvMomentExps& e, char part,
                                     int n_lo, int n_hi, std::uint64_t N, std::uint64_t seed,
                                     unsigned workers = 1);

// One level of the part (a)/(b) expectation, for T-scaling checks.
std::pair<double, double> inverse_moment_estimate(const StableParams& p, double kappa, const InvMomentExps& e,
                                                  char part, int n, std::uint64_t N, std::uint64_t seed,
                                                  unsigned workers = 1);

struct ScalingReport {
  double T1 = 1.0, T2 = 2.0;
  double m1 = 0.0, se1 = 0.0, m2 = 0.0, se2 = 0.0;
  double exponent = 0.0;  // predicted: m2/m1 = (T2/T1)^exponent
  double z = 0.0;
  bool pass = false;      // |z| <= 4
};
// Part (a) at level n with independent seeds for the two horizons.
ScalingReport inverse_moment_T_scaling(const StableParams& p, double kappa, const InvMomentExps& e, int n,
                                       std::uint64_t N, std::uint64_t seed, double T2 = 2.0,
                                       unsigned workers = 1);

struct InvBoundExps {
  double p = 0.3, q = 0.3, r = 1.0, s = 1.0;
  Side side = Side::Plus;
};
// E[|Delta_{side,n+1}|^r Z_{n+1}^s / (X_{+,n}^p X_{-,n}^q)] divided by m^{s'},
// ceiling max{(1+r/alpha)^{-1}, kappa^r}.
RateReport inv_bound_rate_check(const StableParams& p, double kappa, const InvBoundExps& e, int n_lo, int n_hi,
                                std::uint64_t N, std::uint64_t seed, unsigned workers = 1);

}  // namespace stablesup
