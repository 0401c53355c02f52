#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "stablesup/errors.hpp"
#include "stablesup/oracles.hpp"

using namespace stablesup;

namespace {
// Frozen oracles from tests/oracles/compute_goldens.py.
constexpr double kExpMomentA = 0.00027573156702210078926;  // alpha 1.5, s 1, x 10
constexpr double kExpMomentB = 3.835964659169029643e-8;    // alpha 0.5, s 0.5, x 100
constexpr double kGLaplace = 0.096477501746505675982;      // alpha 1.5, rho 0.4, x 5
constexpr double kTail2 = 1.4946839739016324882;           // b 0.5, p 0.3, q 2
constexpr double kTail1 = 2.5292591111662680214;           // b 0.5, p 0.3, q 1
constexpr double kQSeries = 3.3630952380952380952;         // alpha 1.5, p 0.3, r 1, rho 0.5

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo * std::pow(hi / lo, double(i) / (n - 1));
  return v;
}
}  // namespace

TEST(Quadrature, SemiInfinite) {
  EXPECT_NEAR(integrate_to_infinity([](double x) { return std::exp(-x); }, 0.0).value, 1.0, 1e-12);
  EXPECT_NEAR(integrate([](double x) { return x * x; }, 0.0, 3.0).value, 9.0, 1e-12);
}

TEST(Constants, StableCases) {
  const AppendixConstants c = constants(validate_params(1.5, 0.5, 1.0));
  EXPECT_NEAR(c.delta, 3.0, 1e-14);
  EXPECT_NEAR(c.gamma, 1.0, 1e-15);
  EXPECT_NEAR(c.b_rho, 1.0 / 0.75, 1e-14);
  const AppendixConstants d = constants(validate_params(0.5, 0.5, 1.0));
  EXPECT_NEAR(d.gamma, std::sqrt(0.5), 1e-14);
  EXPECT_THROW(constants(validate_params(1.0, 0.5, 1.0)), Error);
}

TEST(Constants, DsDominatesGamma) {
  const AppendixConstants c = constants(validate_params(1.5, 0.5, 1.0));
  for (double s : {0.0, 0.5, 1.0, 2.5}) EXPECT_GE(c.d(s), std::tgamma(s + 1));
}

TEST(ExpMomentBound, ZeroAndGoldens) {
  const StableParams p15 = validate_params(1.5, 0.5, 1.0), p05 = validate_params(0.5, 0.5, 1.0);
  const OracleReport r0 = check_exp_moment_bound(p15, 1.5, {0.0});
  EXPECT_NEAR(r0.points[0].lhs, std::tgamma(2.5), 1e-9);
  const OracleReport ra = check_exp_moment_bound(p15, 1.0, {10.0});
  EXPECT_NEAR(ra.points[0].lhs, kExpMomentA, 1e-12);
  EXPECT_TRUE(ra.pass);
  EXPECT_LT(ra.max_ratio, 1.0);
  const OracleReport rb = check_exp_moment_bound(p05, 0.5, {100.0});
  EXPECT_NEAR(rb.points[0].lhs, kExpMomentB, 1e-14);
  EXPECT_TRUE(rb.pass);
}

TEST(ExpMomentBound, LogGrids) {
  for (auto [a, r] : std::vector<std::pair<double, double>>{{1.5, 0.5}, {0.7, 0.6}})
    for (double s : {0.0, 0.5, 2.0})
      EXPECT_TRUE(check_exp_moment_bound(validate_params(a, r, 1.0), s, log_grid(1e-2, 1e4, 10)).pass);
}

TEST(GLaplaceBound, Examples) {
  const StableParams p = validate_params(1.5, 0.4, 1.0);
  const OracleReport r = check_G_laplace_bound(p, {0.0, 5.0});
  EXPECT_NEAR(r.points[0].lhs, 1.0, 1e-12);
  EXPECT_NEAR(r.points[0].rhs, 1.0, 1e-15);
  EXPECT_NEAR(r.points[1].lhs, kGLaplace, 1e-10);
  EXPECT_TRUE(r.pass);
  const AppendixConstants c = constants(p);
  for (const OraclePoint& pt : check_G_laplace_bound(p, {1e2, 1e3, 1e4}).points)
    EXPECT_LE(pt.lhs * pt.x, 1.0 / (c.gamma * p.alpha * p.rho));
  EXPECT_TRUE(check_G_laplace_bound(validate_params(0.7, 0.6, 1.0), log_grid(1e-2, 1e4, 10)).pass);
}

TEST(CauchyLaplaceBound, Examples) {
  const OracleReport r0 = check_cauchy_laplace_bound(0.5, 0.0, {0.0, 3.0});
  EXPECT_NEAR(r0.points[0].lhs, 1.0, 1e-12);
  EXPECT_TRUE(r0.pass);
  EXPECT_TRUE(check_cauchy_laplace_bound(0.3, 0.5, {10.0}).pass);
  EXPECT_TRUE(check_cauchy_laplace_bound(0.7, 0.5, log_grid(1e-2, 1e4, 10)).pass);
}

TEST(TailIntegral, ClosedFormCases) {
  EXPECT_NEAR(tail_integral_P(2.0, 0.3, 1.5), std::pow(2.0, -1.5) / 1.2, 1e-15);
  EXPECT_NEAR(tail_integral_P(0.5, 0.3, 1.0), kTail1, 1e-13);
  EXPECT_NEAR(tail_integral_P(0.5, 0.3, 1.0), std::pow(0.5, -0.3) / (0.3 * 0.7) - 1 / 0.3, 1e-13);
  EXPECT_NEAR(tail_integral_P(0.5, 0.3, 2.0), kTail2, 1e-13);
  EXPECT_NEAR(tail_integral_quadrature(0.5, 0.3, 2.0), kTail2, 1e-8);
  EXPECT_NEAR(tail_integral_P(0.5, 0.0, 2.0), -std::log(0.5) + std::pow(0.5, -2.0) * 0.25 / 2.0, 1e-14);
  EXPECT_THROW(tail_integral_P(0.5, 1.0, 1.0), Error);
}

TEST(TailIntegral, QuadratureGrid) {
  for (double b : {0.1, 0.5, 1.0, 2.0, 7.0})
    for (double p : {-0.5, 0.0, 0.3, 0.7, 0.9})
      for (double q : {1.0, 1.6, 2.0, 3.0, 5.0}) {
        const double v = tail_integral_P(b, p, q);
        EXPECT_NEAR(tail_integral_quadrature(b, p, q), v, 1e-8 * std::max(1.0, std::fabs(v))) << b << " " << p << " " << q;
      }
}

TEST(SeqInequalities, DegenerateSequences) {
  const std::vector<double> ones(7, 1.0), zeros(7, 0.0);
  const auto [s1, s2] = seq_inequality_slacks(0.3, ones, ones);
  EXPECT_NEAR(s1, 0.0, 1e-12);
  EXPECT_GE(s2, -1e-12);
  const auto [z1, z2] = seq_inequality_slacks(0.3, zeros, zeros);
  EXPECT_GE(z1, -1e-12);
  EXPECT_GE(z2, -1e-12);
}

TEST(SeqInequalities, RandomTrials) {
  const SeqReport r = check_seq_inequalities(10000, 17);
  EXPECT_EQ(r.trials, 10000u);
  EXPECT_EQ(r.violations, 0u);
}

TEST(AuxQR, QAtZeroR) {
  const double a = 1.5, p = 0.3;
  EXPECT_NEAR(aux_Q(a, p, 0.0, 1.0), 1.0 / (p * (1 - p) * (1 - p / a)), 1e-13);
}

TEST(AuxQR, SeriesMatchesQMinusOneOverP) {
  EXPECT_NEAR(q_series(1.5, 0.3, 1.0, 0.5), kQSeries, 1e-12);
  EXPECT_NEAR(q_series(1.5, 0.3, 1.0, 0.5), aux_Q(1.5, 0.3, 1.0, 0.5) - 1 / 0.3, 1e-10);
}

TEST(AuxQR, RMatchesDirectEvaluation) {
  const double a = 1.5, p = 0.3, q = 0.4, r = 0.5, u = 0.6;
  const double B = std::tgamma(1 + r - p / a) * std::tgamma(1 - q / a) / std::tgamma(2 + r - p / a - q / a);
  const double want = std::tgamma(1 / a) * B * u * (1 - u) * (1 + r) * (1 + r) * (1 + r - p / a) /
                      (p * q * (1 - p) * (1 - q) * (1 - p / a) * (u * (1 + r) - p / a));
  EXPECT_NEAR(aux_Q_R(a, p, q, r, u).R, want, 1e-13 * want);
}

TEST(AuxQR, RPoleNearAlpha) {
  const double a = 0.7;
  double prev = 0;
  // u = 1 kills the u(1-u) factor, so probe an interior u
  for (double q : {0.3, 0.6, 0.69, 0.699}) {
    const double R = aux_Q_R(a, 0.2, q, 1.0, 0.5).R;
    EXPECT_TRUE(std::isfinite(R));
    EXPECT_GT(R, prev);
    prev = R;
  }
  EXPECT_GT(prev, 100.0);
  EXPECT_THROW(aux_Q_R(a, 0.2, 0.7, 1.0, 0.5), Error);
  EXPECT_EQ(aux_Q_R(a, 0.2, 0.3, 1.0, 1.0).R, 0.0);
}

TEST(InverseMomentRate, ZeroRIsFlat) {
  const StableParams p = validate_params(1.5, 0.5, 1.0);
  InvMomentExps e;
  e.r = 0.0;
  const RateReport r = inverse_moment_rate_check(p, 0.9, e, 'a', 1, 8, 20000, 3);
  EXPECT_NEAR(r.fitted_rate, 1.0, 0.05);
  EXPECT_TRUE(r.pass);
}

TEST(InverseMomentRate, GeometricDecayAtUnitR) {
  const StableParams p = validate_params(1.5, 0.5, 1.0);
  InvMomentExps e;
  e.p = 0.5;
  e.q = 0.5;
  e.r = 1.0;
  const RateReport r = inverse_moment_rate_check(p, 0.9, e, 'a', 1, 10, 50000, 4);
  EXPECT_LE(r.fitted_rate, 0.55);
  EXPECT_TRUE(r.pass);
}

TEST(InverseMomentRate, TScaling) {
  const StableParams p = validate_params(1.5, 0.5, 1.0);
  InvMomentExps e;
  const ScalingReport s = inverse_moment_T_scaling(p, 0.9, e, 3, 100000, 5);
  EXPECT_NEAR(s.exponent, 1.0 - 0.6 / 1.5, 1e-14);
  EXPECT_LE(std::fabs(s.z), 4.0);
}

TEST(InvBoundRate, StandardSetting) {
  const StableParams p = validate_params(1.5, 0.5, 1.0);
  InvBoundExps e;
  const RateReport r = inv_bound_rate_check(p, 0.9, e, 3, 12, 50000, 6);
  EXPECT_TRUE(r.pass) << r.fitted_rate << " vs " << r.ceiling;
}
