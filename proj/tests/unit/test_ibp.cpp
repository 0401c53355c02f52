#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <tuple>
#include <vector>

#include "stablesup/chi.hpp"
#include "stablesup/errors.hpp"
#include "stablesup/ibp.hpp"
#include "stablesup/identities.hpp"

using namespace stablesup;

namespace {

// Naive second implementation of the weight algebra: polynomials over a flat
// list of variables with double coefficients at a fixed zeta, and D applied by
// the Leibniz rule one variable at a time.
//
// Standard variables: 0 Sigma+, 1 sigma+, 2 Sigma-, 3 sigma-, 4 X+^-1, 5 X-^-1.
// Cauchy variables:   Z+_1..Z+_K, Z-_1..Z-_K, X+^-1, X-^-1.
struct NaiveAlgebra {
  Mode mode;
  double zeta;
  int K;  // Cauchy generators per side

  using Poly = std::map<std::vector<int>, double>;

  int nvars() const { return mode == Mode::Standard ? 6 : 2 * K + 2; }
  int xinv(Side s) const { return nvars() - (s == Side::Plus ? 2 : 1); }
  int zvar(Side s, int k) const { return (s == Side::Plus ? 0 : K) + k - 1; }

  Poly constant(double c) const { return {{std::vector<int>(nvars(), 0), c}}; }
  Poly var(int v, double c = 1.0) const {
    std::vector<int> e(nvars(), 0);
    e[v] = 1;
    return {{e, c}};
  }
  static void add(Poly& a, const Poly& b, double s = 1.0) {
    for (const auto& [e, c] : b) a[e] += s * c;
  }
  static Poly mul(const Poly& a, const Poly& b) {
    Poly out;
    for (const auto& [ea, ca] : a)
      for (const auto& [eb, cb] : b) {
        std::vector<int> e(ea.size());
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
        out[e] += ca * cb;
      }
    return out;
  }

  // D of a single variable.
  Poly d_var(int v, Side s) const {
    if (v == xinv(s)) return var(v, mode == Mode::Standard ? -zeta : -1.0);
    if (mode == Mode::Standard) {
      const int sigma_sum = s == Side::Plus ? 0 : 2;
      if (v == sigma_sum) return var(v);
      return {};
    }
    for (int k = 1; k <= K; ++k)
      if (v == zvar(s, k)) {
        if (k == K) throw std::runtime_error("naive algebra: raise K");
        return var(zvar(s, k + 1));
      }
    return {};
  }

  Poly D(const Poly& p, Side s) const {
    Poly out;
    for (const auto& [e, c] : p)
      for (int v = 0; v < nvars(); ++v) {
        if (e[v] == 0) continue;
        std::vector<int> rest = e;
        rest[v] -= 1;
        Poly t = mul({{rest, c * e[v]}}, d_var(v, s));
        add(out, t);
      }
    return out;
  }

  Poly H(const Poly& p, Side s) const {
    Poly a;
    if (mode == Mode::Standard) {
      add(a, var(s == Side::Plus ? 0 : 2));
      add(a, var(s == Side::Plus ? 1 : 3), -1.0);
      add(a, constant(zeta));
    } else {
      a = var(zvar(s, 1));
    }
    Poly inner = mul(a, p);
    add(inner, D(p, s), -1.0);
    Poly out = mul(var(xinv(s)), inner);
    if (mode == Mode::Standard)
      for (auto& [e, c] : out) c /= zeta;
    return out;
  }

  double eval(const Poly& p, const std::vector<double>& x) const {
    double s = 0;
    for (const auto& [e, c] : p) {
      double t = c;
      for (int v = 0; v < nvars(); ++v) t *= std::pow(x[v], e[v]);
      s += t;
    }
    return s;
  }
};

GeneratorValues to_generators(const NaiveAlgebra& na, const std::vector<double>& x) {
  GeneratorValues g;
  if (na.mode == Mode::Standard) {
    g.plus = {x[0], x[1]};
    g.minus = {x[2], x[3]};
  } else {
    g.plus.assign(x.begin(), x.begin() + na.K);
    g.minus.assign(x.begin() + na.K, x.begin() + 2 * na.K);
  }
  g.xp_inv = x[na.xinv(Side::Plus)];
  g.xm_inv = x[na.xinv(Side::Minus)];
  return g;
}

}  // namespace

TEST(WeightAlgebra, DAnnihilatesConstantsAndOtherSide) {
  EXPECT_TRUE(apply_D(WeightExpr::one(Mode::Standard), Side::Plus).is_zero());
  const WeightExpr s = WeightExpr::generator_sigma_sum(Side::Plus);
  EXPECT_TRUE(apply_D(s * s, Side::Minus).is_zero());
  EXPECT_TRUE(apply_D(WeightExpr::generator_z(Side::Plus, 2), Side::Minus).is_zero());
}

TEST(WeightAlgebra, DOfSigmaOverX) {
  const WeightExpr e = WeightExpr::generator_sigma_sum(Side::Plus) * WeightExpr::x_inverse(Side::Plus, Mode::Standard);
  // D(Sigma X^-1) = (1 - zeta) Sigma X^-1 = (1/alpha) Sigma X^-1
  const WeightExpr expected = (Coefficient(Rational(1)) - Coefficient::zeta_power(1)) * e;
  EXPECT_EQ(apply_D(e, Side::Plus), expected);
}

TEST(WeightAlgebra, FirstStandardWeight) {
  const WeightExpr h = apply_H(WeightExpr::one(Mode::Standard), Side::Plus);
  WeightExpr a = WeightExpr::generator_sigma_sum(Side::Plus) - WeightExpr::generator_sigma_count(Side::Plus);
  WeightExpr z(Mode::Standard);
  z.add_term(Monomial{}, Coefficient::zeta_power(1));
  a += z;
  const WeightExpr expected = Coefficient::zeta_power(-1) * (WeightExpr::x_inverse(Side::Plus, Mode::Standard) * a);
  EXPECT_EQ(h, expected);
  EXPECT_EQ(h.size(), 3u);
}

TEST(WeightAlgebra, FirstCauchyWeight) {
  const WeightExpr h = apply_H(WeightExpr::one(Mode::Cauchy), Side::Plus);
  EXPECT_EQ(h, WeightExpr::x_inverse(Side::Plus, Mode::Cauchy) * WeightExpr::generator_z(Side::Plus, 1));
}

TEST(WeightAlgebra, IterateZeroIsOne) {
  EXPECT_EQ(iterate_H(0, 0, Mode::Standard), WeightExpr::one(Mode::Standard));
  EXPECT_EQ(iterate_H(0, 0, Mode::Cauchy), WeightExpr::one(Mode::Cauchy));
}

TEST(WeightAlgebra, MixedOrderIsProductOfOneSidedWeights) {
  for (Mode m : {Mode::Standard, Mode::Cauchy})
    EXPECT_EQ(iterate_H(1, 1, m), iterate_H(1, 0, m) * iterate_H(0, 1, m));
}

// Hand derivation: with A = Sigma - sigma + zeta,
// H^+(H^+(1)) = zeta^-2 X^-2 (A^2 + zeta A - Sigma)
//             = zeta^-2 X^-2 (Sigma^2 - 2 Sigma sigma + sigma^2 + (3 zeta - 1) Sigma - 3 zeta sigma + 2 zeta^2).
TEST(WeightAlgebra, SecondStandardWeightByHand) {
  const WeightExpr h2 = iterate_H(2, 0, Mode::Standard);
  EXPECT_EQ(h2.size(), 6u);
  for (double alpha : {1.5, 0.7, 1.9}) {
    const double z = 1 - 1 / alpha;
    const CompiledWeight cw(h2, z);
    for (auto [S, s, xi] : std::vector<std::tuple<double, double, double>>{{2.3, 3, 0.7}, {0.4, 1, 2.0}, {5.0, 2, 0.1}}) {
      GeneratorValues g;
      g.plus = {S, s};
      g.minus = {1.0, 1.0};
      g.xp_inv = xi;
      const double hand = xi * xi / (z * z) *
                          (S * S - 2 * S * s + s * s + (3 * z - 1) * S - 3 * z * s + 2 * z * z);
      EXPECT_NEAR(cw.eval(g), hand, 1e-12 * std::max(1.0, std::fabs(hand)));
    }
  }
}

TEST(WeightAlgebra, AgreesWithNaiveRewriter) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (Mode mode : {Mode::Standard, Mode::Cauchy}) {
    const double alpha = 1.5;
    NaiveAlgebra na{mode, mode == Mode::Standard ? 1 - 1 / alpha : 0.0, 6};
    for (int kp = 0; kp <= 3; ++kp)
      for (int km = 0; km <= 3; ++km) {
        NaiveAlgebra::Poly p = na.constant(1.0);
        for (int i = 0; i < km; ++i) p = na.H(p, Side::Minus);
        for (int i = 0; i < kp; ++i) p = na.H(p, Side::Plus);
        const CompiledWeight cw(iterate_H(kp, km, mode), na.zeta);
        for (int t = 0; t < 20; ++t) {
          std::vector<double> x(na.nvars());
          for (double& v : x) v = u(gen);
          const double ref = na.eval(p, x);
          const double got = cw.eval(to_generators(na, x));
          EXPECT_NEAR(got, ref, 1e-10 * std::max(1.0, std::fabs(ref))) << kp << "," << km;
        }
      }
  }
}

TEST(WeightAlgebra, MixedWeightsCommute) {
  for (Mode m : {Mode::Standard, Mode::Cauchy})
    for (int k = 0; k <= 3; ++k)
      for (int j = 0; j <= 3; ++j) EXPECT_TRUE(weights_commute(k, j, m)) << k << "," << j;
  const WeightExpr a = apply_H(apply_H(WeightExpr::one(Mode::Standard), Side::Plus), Side::Minus);
  const WeightExpr b = apply_H(apply_H(WeightExpr::one(Mode::Standard), Side::Minus), Side::Plus);
  EXPECT_EQ(a, b);
}

TEST(WeightAlgebra, XPowersMatchOrders) {
  for (Mode m : {Mode::Standard, Mode::Cauchy})
    for (int kp = 0; kp <= 3; ++kp)
      for (int km = 0; km <= 3; ++km) {
        const WeightExpr w = iterate_H(kp, km, m);
        for (const auto& [mono, c] : w.terms()) {
          EXPECT_EQ(mono.xp, kp);
          EXPECT_EQ(mono.xm, km);
        }
      }
}

TEST(QRational, FirstMemberLimitsAndZero) {
  const RationalFn q1 = q_rational(1, Side::Plus);
  for (double mu : {0.0, 0.3, -0.5}) {
    EXPECT_NEAR(q1.eval(1e8, mu), 2.0, 1e-7);
    EXPECT_EQ(q1.eval(0.0, mu), 0.0);
    const double y = 1.7, gam2 = 1 - mu * mu;
    EXPECT_NEAR(q1.eval(y, mu), 2 * y * (y - mu) / (gam2 + (y - mu) * (y - mu)), 1e-14);
  }
}

TEST(QRational, RecursionByFiniteDifference) {
  for (Side s : {Side::Plus, Side::Minus})
    for (int k = 1; k <= 4; ++k) {
      const RationalFn qk = q_rational(k, s), qk1 = q_rational(k + 1, s);
      for (double mu : {0.2, -0.4})
        for (double y : {0.3, 1.1, 2.5}) {
          const double h = 1e-6 * y;
          const double fd = y * (qk.eval(y + h, mu) - qk.eval(y - h, mu)) / (2 * h);
          EXPECT_NEAR(qk1.eval(y, mu), fd, 1e-6 * std::max(1.0, std::fabs(fd)));
        }
    }
}

TEST(QRational, TableMatchesSymbolicForm) {
  const double mu = std::sin(kPi * (0.3 - 0.5));
  const CauchyQTable tab(mu, 4);
  for (Side s : {Side::Plus, Side::Minus})
    for (int k = 1; k <= 4; ++k)
      for (double y : {0.1, 1.0, 3.0}) EXPECT_NEAR(tab.eval(s, k, y), q_rational(k, s).eval(y, mu), 1e-12);
}

TEST(EvalWeight, UnitWeightIsOne) {
  const StableParams p = validate_params(1.5, 0.5, 1.0);
  NoiseRecord nr(p, 1, 0, 4);
  const ChiApprox c = build_chi(nr, 3, p, 0.9);
  EXPECT_EQ(eval_weight(WeightExpr::one(Mode::Standard), c, nr, 4), 1.0);
}

TEST(EvalWeight, FirstWeightFromNoise) {
  const StableParams p = validate_params(1.5, 0.5, 1.0);
  NoiseRecord nr(p, 2, 0, 6);
  const ChiApprox c = build_chi(nr, 4, p, 0.9);
  double S = nr.eta(Side::Plus), s = 1;
  for (int i = 1; i <= 6; ++i)
    if (nr.G(i) > 0) S += nr.E(i), s += 1;
  const double z = p.zeta();
  const double expected = (S - s + z) / (z * c.x_plus);
  EXPECT_NEAR(eval_weight(iterate_H(1, 0, Mode::Standard), c, nr, 6), expected, 1e-12 * std::fabs(expected));
}

TEST(VerifyIbp, ConstantFunctionHasZeroLeftSide) {
  const StableParams p = validate_params(1.5, 0.5, 1.0);
  TestFunction f{[](double, double) { return 1.0; }, [](double, double) { return 0.0; },
                 [](double, double) { return 0.0; }};
  const IbpReport r = verify_ibp_identity(f, Side::Plus, 3, 3, p, 0.9, 100000, 5);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_LE(std::fabs(r.rhs), 4 * r.rhs_stderr);
}

TEST(VerifyIbp, ExponentialTestFunctionStandardMode) {
  const StableParams p = validate_params(1.5, 0.5, 1.0);
  TestFunction f{[](double x, double y) { return std::exp(-x - y); },
                 [](double x, double y) { return -std::exp(-x - y); },
                 [](double x, double y) { return -std::exp(-x - y); }};
  for (Side s : {Side::Plus, Side::Minus}) {
    const IbpReport r = verify_ibp_identity(f, s, 3, 3, p, 0.9, 200000, 6);
    EXPECT_LE(std::fabs(r.z), 4.0);
  }
}

TEST(VerifyIbp, CauchyModeWithFunctionVanishingOnAxes) {
  const StableParams p = validate_params(1.0, 0.5, 1.0);
  auto g = [](double x) { return std::exp(-x) - std::exp(-2 * x); };
  auto dg = [](double x) { return -std::exp(-x) + 2 * std::exp(-2 * x); };
  TestFunction f{[=](double x, double y) { return g(x) * g(y); }, [=](double x, double y) { return dg(x) * g(y); },
                 [=](double x, double y) { return g(x) * dg(y); }};
  const IbpReport r = verify_ibp_identity(f, Side::Plus, 3, 3, p, 0.9, 200000, 7);
  EXPECT_LE(std::fabs(r.z), 4.0);
}
