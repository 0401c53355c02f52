#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "stablesup/chi.hpp"
#include "stablesup/errors.hpp"
#include "stablesup/stats.hpp"

using namespace stablesup;

namespace {

// X_{+,5}, X_{-,5} for noise (seed 42, stream 0) at alpha 1.5, rho 0.5, T 1,
// kappa 0.9, from straight_line_chi below (long double), frozen.
constexpr double kGoldenXp5 = 1.8537032780336005;
constexpr double kGoldenXm5 = 0.41376700987844905;

// Reference evaluation in long double directly from U, E, V.
std::pair<long double, long double> straight_line_chi(const NoiseRecord& nr, int n, double alpha, double rho,
                                                      double T, double kappa) {
  const long double a = alpha, w = 3.14159265358979323846264338327950288L * (rho - 0.5L);
  const long double zeta = 1.0L - 1.0L / a;
  long double L = T, xp = 0, xm = 0;
  for (int i = 1; i <= n; ++i) {
    const long double v = nr.V(i);
    const long double g = std::sin(a * (v + w)) /
                          (std::pow(std::cos(v), 1.0L / a) * std::pow(std::cos((1.0L - a) * v - a * w), zeta));
    const long double S = std::pow((long double)nr.E(i), zeta) * g;
    const long double ell = L * (1.0L - nr.U(i));
    L *= nr.U(i);
    const long double c = std::pow(ell, 1.0L / a) * std::fabs(S);
    (S > 0 ? xp : xm) += c;
  }
  const long double an = std::pow((long double)T, 1.0L / a) * std::pow((long double)kappa, (long double)n);
  xp += an * std::pow((long double)nr.eta(Side::Plus), zeta);
  xm += an * std::pow((long double)nr.eta(Side::Minus), zeta);
  return {xp, xm};
}

}  // namespace

TEST(CheckKappa, Examples) {
  EXPECT_NO_THROW(check_kappa(0.9, validate_params(1.5, 0.5, 1.0)));
  const StableParams p = validate_params(0.5, 0.5, 1.0);
  EXPECT_NO_THROW(check_kappa(0.5, p));
  try {
    check_kappa(0.2, p);
    FAIL();
  } catch (const KappaError& e) {
    EXPECT_EQ(e.code(), ErrorCode::KappaTooSmall);
    EXPECT_NEAR(e.kappa_min(), std::pow(0.5, 2.0), 1e-15);
  }
}

TEST(CheckKappa, BoundaryIsAdmissible) {
  for (auto [a, r] : std::vector<std::pair<double, double>>{{1.5, 0.4}, {0.7, 0.6}, {1.0, 0.3}}) {
    const StableParams p = validate_params(a, r, 1.0);
    EXPECT_NO_THROW(check_kappa(std::pow(std::max(r, 1 - r), 1.0 / a), p));
    EXPECT_NEAR(kappa_min(p), std::pow(std::max(r, 1 - r), 1.0 / a), 1e-15);
  }
}

TEST(BuildChi, MatchesStraightLineReferenceAndGolden) {
  const StableParams p = validate_params(1.5, 0.5, 1.0);
  NoiseRecord nr(p, 42, 0, 5);
  const ChiApprox c = build_chi(nr, 5, p, 0.9);
  const auto [xp, xm] = straight_line_chi(nr, 5, 1.5, 0.5, 1.0, 0.9);
  EXPECT_NEAR(c.x_plus, (double)xp, 1e-12 * (double)xp);
  EXPECT_NEAR(c.x_minus, (double)xm, 1e-12 * (double)xm);
  EXPECT_NEAR(c.x_plus, kGoldenXp5, 1e-12);
  EXPECT_NEAR(c.x_minus, kGoldenXm5, 1e-12);
}

TEST(BuildChi, StraightLineAgreementOverManyPaths) {
  for (auto [a, r] : std::vector<std::pair<double, double>>{{1.5, 0.4}, {0.7, 0.6}}) {
    const StableParams p = validate_params(a, r, 2.0);
    const double k = default_kappa(p);
    for (int s = 0; s < 200; ++s) {
      NoiseRecord nr(p, 9, s, 12);
      const ChiApprox c = build_chi(nr, 12, p, k);
      const auto [xp, xm] = straight_line_chi(nr, 12, a, r, 2.0, k);
      EXPECT_NEAR(c.x_plus, (double)xp, 1e-11 * (double)xp);
      EXPECT_NEAR(c.x_minus, (double)xm, 1e-11 * (double)xm);
    }
  }
}

TEST(BuildChi, EmptyPositivePartLeavesRemainderOnly) {
  const StableParams p = validate_params(1.5, 0.5, 1.0);
  // all angles at -pi/4 give G < 0 when omega = 0
  const NoiseRecord nr = NoiseRecord::from_values(p, 0.8, 1.3, {0.5, 0.3, 0.9}, {1.0, 2.0, 0.5},
                                                  {-0.7, -0.7, -0.7});
  const ChiApprox c = build_chi(nr, 3, p, 0.9);
  EXPECT_NEAR(c.x_plus, std::pow(0.9, 3) * std::pow(0.8, p.zeta()), 1e-15);
  EXPECT_GT(c.x_minus, c.a_n * std::pow(1.3, p.zeta()));
}

TEST(Extend, AgreesWithFreshSummationAndIncrementFormula) {
  for (double a : {1.5, 0.7, 1.0}) {
    const StableParams p = validate_params(a, 0.5, 1.0);
    const double k = default_kappa(p);
    for (int s = 0; s < 100; ++s) {
      NoiseRecord nr(p, 5, s, 20);
      ChiApprox c = build_chi(nr, 0, p, k);
      for (int n = 1; n <= 20; ++n) {
        const ChiApprox prev = c;
        c = extend(c, nr);
        const ChiApprox fresh = build_chi(nr, n, p, k);
        // rounding scale includes the level-0 remainder, which shrinks by cancellation
        const double sp = fresh.x_plus + std::pow(nr.eta(Side::Plus), p.eta_exponent());
        const double sm = fresh.x_minus + std::pow(nr.eta(Side::Minus), p.eta_exponent());
        EXPECT_NEAR(c.x_plus, fresh.x_plus, 1e-12 * sp);
        EXPECT_NEAR(c.x_minus, fresh.x_minus, 1e-12 * sm);
        const double ez = p.eta_exponent();
        const double da = fresh.a_n - prev.a_n;
        const double S = nr.S(n);
        const double ell = fresh.terms.back().ell;
        const double dplus = (S > 0 ? std::pow(ell, 1 / a) * S : 0.0) + da * std::pow(nr.eta(Side::Plus), ez);
        EXPECT_NEAR(fresh.delta_plus, dplus, 1e-12 * std::max(1.0, std::fabs(dplus)));
        EXPECT_NEAR(fresh.x_plus - prev.x_plus, fresh.delta_plus, 1e-12 * sp);
        if (S < 0) EXPECT_LT(fresh.delta_plus, 0.0);
      }
    }
  }
}

TEST(Extend, MonotoneFloor) {
  const StableParams p = validate_params(1.5, 0.4, 1.0);
  const double k = 0.9;
  int checked = 0;
  for (int s = 0; s < 10000; ++s) {
    NoiseRecord nr(p, 6, s, 10);
    ChiApprox c = build_chi(nr, 0, p, k);
    for (int n = 1; n <= 10; ++n) {
      const ChiApprox next = extend(c, nr);
      EXPECT_GE(next.x_plus / c.x_plus, k * (1 - 1e-14));
      EXPECT_GE(next.x_minus / c.x_minus, k * (1 - 1e-14));
      c = next;
      ++checked;
    }
  }
  EXPECT_EQ(checked, 100000);
}

TEST(SimulateJoint, SupDominatesEndpoint) {
  for (double a : {1.5, 0.7, 1.0}) {
    const StableParams p = validate_params(a, 0.5, 1.0);
    for (int i = 0; i < 5000; ++i) {
      Stream s(8, i);
      const JointSample js = simulate_joint(p, default_kappa(p), 20, s);
      EXPECT_GT(js.sup, 0.0);
      EXPECT_GE(js.sup, js.x_T);
    }
  }
}

namespace {
double ks_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(double(i) / a.size() - double(j) / b.size()));
  }
  return d;
}
// Two-sample KS critical value at level 0.01: 1.628 sqrt(2/N).
double ks_crit(int N) { return 1.628 * std::sqrt(2.0 / N); }
}  // namespace

TEST(SimulateJoint, SelfSimilarity) {
  const int N = 100000;
  const double a = 1.5;
  const StableParams p1 = validate_params(a, 0.4, 1.0), p2 = validate_params(a, 0.4, 2.0);
  std::vector<double> s1(N), s2(N);
  const double scale = std::pow(2.0, 1.0 / a);
  for (int i = 0; i < N; ++i) {
    Stream r1(21, i), r2(22, i);
    s1[i] = scale * simulate_joint(p1, 0.9, 40, r1).sup;
    s2[i] = simulate_joint(p2, 0.9, 40, r2).sup;
  }
  EXPECT_LT(ks_distance(s1, s2), ks_crit(N));
}

TEST(SimulateJoint, SymmetricSidesExchangeable) {
  const int N = 100000;
  const StableParams p = validate_params(1.5, 0.5, 1.0);
  std::vector<double> xp(N), xm(N);
  for (int i = 0; i < N; ++i) {
    Stream r(23, i);
    const JointSample js = simulate_joint(p, 0.9, 40, r);
    xp[i] = js.sup;
    xm[i] = js.sup - js.x_T;
  }
  EXPECT_LT(ks_distance(xp, xm), ks_crit(N));
}

TEST(NoiseRecord, ReproducibleFromJson) {
  const StableParams p = validate_params(0.7, 0.6, 1.0);
  NoiseRecord nr(p, 77, 3, 8);
  const NoiseRecord back = NoiseRecord::from_json(nr.to_json());
  ASSERT_EQ(back.size(), 8);
  for (int i = 1; i <= 8; ++i) {
    EXPECT_EQ(back.U(i), nr.U(i));
    EXPECT_EQ(back.S(i), nr.S(i));
  }
  EXPECT_EQ(back.eta(Side::Plus), nr.eta(Side::Plus));
}

TEST(NoiseRecord, ValueBuiltCannotGrow) {
  const StableParams p = validate_params(1.5, 0.5, 1.0);
  NoiseRecord nr = NoiseRecord::from_values(p, 1, 1, {0.5}, {1.0}, {0.2});
  EXPECT_THROW(nr.ensure(2), Error);
}
