#include "stablesup/oracles.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>

#include "stablesup/chi.hpp"
#include "stablesup/errors.hpp"
#include "stablesup/ibp.hpp"
#include "stablesup/parallel.hpp"
#include "stablesup/rng.hpp"
#include "stablesup/stats.hpp"

namespace stablesup {

// ---------------------------------------------------------------- quadrature

QuadResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol) {
  boost::math::quadrature::tanh_sinh<double> ts(15);
  QuadResult r;
  double l1 = 0.0;
  try {
    r.value = ts.integrate(f, a, b, 1e-13, &r.error, &l1);
  } catch (const std::exception& e) {
    throw Error(ErrorCode::QuadratureFailure, std::string("quadrature failed: ") + e.what());
  }
  if (!std::isfinite(r.value) || r.error > abs_tol * std::max(1.0, std::fabs(r.value)))
    throw Error(ErrorCode::QuadratureFailure, "quadrature error estimate " + std::to_string(r.error) + " value " + std::to_string(r.value) +
                                                  " above tolerance on (" + std::to_string(a) + ", " +
                                                  std::to_string(b) + ")");
  return r;
}

QuadResult integrate_to_infinity(const std::function<double(double)>& f, double a, double abs_tol) {
  auto g = [&](double t) {
    const double om = 1.0 - t;
    const double x = a + t / om;
    if (!(om > 0.0) || !std::isfinite(x)) return 0.0;
    const double v = f(x);
    return v == 0.0 ? 0.0 : v / (om * om);
  };
  return integrate(g, 0.0, 1.0, abs_tol);
}

// ------------------------------------------------------------------ constants

double AppendixConstants::d(double s) const {
  if (s < 0) throw Error(ErrorCode::DomainError, "d_s needs s >= 0");
  return std::pow(2.0, s) * std::max({1.0, std::pow(s, s) * std::exp(-s), std::tgamma(s + 1)});
}

double AppendixConstants::d_prime(double u) const {
  if (u < 0) throw Error(ErrorCode::DomainError, "d'_u needs u >= 0");
  const double g = std::tgamma(1 + u);
  return std::max({g, g * std::tgamma(1 / alpha), std::tgamma(u + 1 / alpha)});
}

AppendixConstants constants(const StableParams& p) {
  if (p.cauchy()) throw Error(ErrorCode::CauchyMode, "auxiliary constants need alpha != 1");
  AppendixConstants k;
  k.alpha = p.alpha;
  k.rho = p.rho;
  k.zeta = 1.0 - 1.0 / p.alpha;
  if (p.alpha > 1) {
    const double z = k.zeta;
    const double I = integrate_to_infinity([z](double y) { return std::exp(-std::pow(y, z)); }, 0.0).value;
    k.c = std::max(1.0, I);
    k.delta = 1.0 / z;
    k.gamma = 1.0;
  } else {
    k.c = (2.0 + 1.0 / std::fabs(k.zeta)) * std::max(1.0, std::pow(2.0 * std::exp(-1.0) / p.alpha, 1.0 / p.alpha));
    k.delta = 1.0;
    const double base = std::min(std::cos(kPi * (0.5 - p.rho)), std::cos(kPi * (0.5 - p.alpha * p.rho)));
    k.gamma = std::pow(base, 1.0 / p.alpha - 1.0);
  }
  k.b_rho = 1.0 / (k.gamma * p.alpha * p.rho);
  return k;
}

// ------------------------------------------------------------ inequality checks

namespace {

void finish(OracleReport& r) {
  r.pass = true;
  r.max_ratio = 0.0;
  r.min_slack = std::numeric_limits<double>::infinity();
  for (const OraclePoint& pt : r.points) {
    const double slack = pt.rhs - pt.lhs;
    r.min_slack = std::min(r.min_slack, slack);
    if (pt.rhs > 0) r.max_ratio = std::max(r.max_ratio, pt.lhs / pt.rhs);
    if (slack < -pt.quad_error) r.pass = false;
  }
}

}  // namespace

OracleReport check_exp_moment_bound(const StableParams& p, double s, const std::vector<double>& xs) {
  if (s < 0) throw Error(ErrorCode::DomainError, "need s >= 0");
  const AppendixConstants k = constants(p);
  OracleReport rep;
  rep.name = "exp_moment";
  for (double x : xs) {
    if (x < 0) throw Error(ErrorCode::DomainError, "need x >= 0");
    const double z = k.zeta;
    auto f = [=](double y) {
      if (y <= 0) return 0.0;
      const double e = x * std::pow(y, z) + y;
      return std::isfinite(e) ? std::pow(y, s) * std::exp(-e) : 0.0;
    };
    const QuadResult q = integrate_to_infinity(f, 0.0);
    const double rhs = k.c * k.d(s) * (x > 0 ? std::min(1.0, std::pow(x, -k.delta)) : 1.0);
    rep.points.push_back({x, q.value, rhs, q.error});
  }
  finish(rep);
  return rep;
}

OracleReport check_G_laplace_bound(const StableParams& p, const std::vector<double>& xs) {
  const AppendixConstants k = constants(p);
  OracleReport rep;
  rep.name = "G_laplace";
  const double lo = kPi * (0.5 - p.rho), hi = kPi / 2;
  for (double x : xs) {
    if (x < 0) throw Error(ErrorCode::DomainError, "need x >= 0");
    auto f = [&](double v) {
      if (!(v > lo && v < hi)) return 0.0;
      const double g = cms_g(v, p);
      return std::isfinite(g) ? std::exp(-x * g) : 0.0;
    };
    const QuadResult q = integrate(f, lo, hi);
    const double w = 1.0 / (hi - lo);
    const double rhs = x > 0 ? std::min(1.0, 1.0 / (k.gamma * p.alpha * p.rho * x)) : 1.0;
    rep.points.push_back({x, q.value * w, rhs, q.error * w});
  }
  finish(rep);
  return rep;
}

OracleReport check_cauchy_laplace_bound(double rho, double s, const std::vector<double>& xs) {
  if (!(rho > 0 && rho < 1)) throw Error(ErrorCode::OutOfRange, "rho must be in (0,1)");
  if (!(s >= 0 && s < 1)) throw Error(ErrorCode::DomainError, "need s in [0,1)");
  const double om = kPi * (rho - 0.5);
  const double mu = std::sin(om), ga = std::cos(om);
  const double pref = ga / (kPi * rho);
  auto kernel = [=](double y) { return 1.0 / (ga * ga + (y - mu) * (y - mu)); };
  const double I0 = s > 0 ? integrate_to_infinity([&](double y) { return std::pow(y, s) * kernel(y); }, 0.0).value : 0.0;
  OracleReport rep;
  rep.name = "cauchy_laplace";
  for (double x : xs) {
    if (x < 0) throw Error(ErrorCode::DomainError, "need x >= 0");
    auto f = [&](double y) { return y <= 0 ? 0.0 : pref * std::pow(y, s) * std::exp(-x * y) * kernel(y); };
    const QuadResult q = integrate_to_infinity(f, 0.0);
    double rhs;
    if (s == 0.0) {
      rhs = x > 0 ? std::min(1.0, 1.0 / (kPi * ga * rho * x)) : 1.0;
    } else {
      const double second = x > 0 ? std::tgamma(s + 1) / (ga * ga * std::pow(x, s + 1))
                                  : std::numeric_limits<double>::infinity();
      rhs = pref * std::min(I0, second);
    }
    rep.points.push_back({x, q.value, rhs, q.error});
  }
  finish(rep);
  return rep;
}

double tail_integral_P(double b, double p, double q) {
  if (!(b > 0)) throw Error(ErrorCode::DomainError, "need b > 0");
  if (!(q > p)) throw Error(ErrorCode::DivergentIntegral, "need q > p");
  const double bm = std::min(b, 1.0);
  // ((b^1)^{-p} - 1)/p -> -log(b^1) as p -> 0
  const double first = p == 0.0 ? -std::log(bm) : (std::pow(bm, -p) - 1.0) / p;
  return first + std::pow(b, -q) * std::pow(bm, q - p) / (q - p);
}

double tail_integral_quadrature(double b, double p, double q) {
  if (!(b > 0)) throw Error(ErrorCode::DomainError, "need b > 0");
  if (!(q > p)) throw Error(ErrorCode::DivergentIntegral, "need q > p");
  // x = e^u turns the algebraic tail into exp((p - q) u)
  const double lb = -std::log(b);
  auto f = [=](double u) { return std::exp(p * u + std::min(0.0, -q * (u - lb))); };
  if (lb <= 0.0) return integrate_to_infinity(f, 0.0, 1e-10).value;
  return integrate(f, 0.0, lb, 1e-10).value + integrate_to_infinity(f, lb, 1e-10).value;
}

std::pair<double, double> seq_inequality_slacks(double r, const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n == 0 || y.size() != n) throw Error(ErrorCode::InvalidArgument, "need n >= 1 and |x| == |y|");
  double prod1 = 1.0, prod2 = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    prod1 *= (1 - r) + r * x[k];
    prod2 *= (1 - r) * y[k] + r * x[k];
  }
  double rhs1 = std::pow(1 - r, static_cast<double>(n));
  for (std::size_t k = 1; k <= n; ++k) rhs1 += r * std::pow(1 - r, static_cast<double>(k - 1)) * x[k - 1];
  double rhs2 = std::pow(r, static_cast<double>(n)) + std::pow(1 - r, static_cast<double>(n));
  for (std::size_t k = 2; k <= n; ++k) {
    rhs2 += r * std::pow(1 - r, static_cast<double>(k - 1)) * x[k - 1] * y[0];
    rhs2 += (1 - r) * std::pow(r, static_cast<double>(k - 1)) * x[0] * y[k - 1];
  }
  return {rhs1 - prod1, rhs2 - prod2};
}

SeqReport check_seq_inequalities(std::uint64_t trials, std::uint64_t seed) {
  SeqReport rep;
  rep.trials = trials;
  rep.min_slack = std::numeric_limits<double>::infinity();
  std::vector<double> x, y;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Stream rng(seed, t);
    const int n = 1 + static_cast<int>(rng.bits() % 20);
    // mix in the endpoints of [0,1], where the inequalities are tight
    auto draw = [&]() {
      const std::uint64_t c = rng.bits() % 8;
      return c == 0 ? 0.0 : c == 1 ? 1.0 : rng.uniform();
    };
    const double r = draw();
    x.resize(n);
    y.resize(n);
    for (int k = 0; k < n; ++k) {
      x[k] = draw();
      y[k] = draw();
    }
    const auto [s1, s2] = seq_inequality_slacks(r, x, y);
    rep.min_slack = std::min({rep.min_slack, s1, s2});
    if (s1 < -1e-12 || s2 < -1e-12) ++rep.violations;
  }
  return rep;
}

double aux_Q(double alpha, double p, double r, double u) {
  if (!(u > 0 && u <= 1)) throw Error(ErrorCode::DomainError, "Q_p needs u in (0,1]");
  if (!(p > 0 && p < std::min(alpha * u, 1.0))) throw Error(ErrorCode::DomainError, "Q_p needs p in (0, min{alpha u, 1})");
  if (!(r >= 0)) throw Error(ErrorCode::DomainError, "Q_p needs r >= 0");
  return (alpha * u * (1 + r) - u * p) / (p * (1 - p) * (alpha * u * (1 + r) - p) * (1 - p / alpha));
}

AuxQR aux_Q_R(double alpha, double p, double q, double r, double u) {
  AuxQR out;
  out.Q = aux_Q(alpha, p, r, u);
  if (!(q > 0 && q < std::min(alpha, 1.0))) throw Error(ErrorCode::DomainError, "R needs q in (0, min{alpha, 1})");
  const double B = std::beta(1 + r - p / alpha, 1 - q / alpha);
  const double num = std::max(std::tgamma(1 / alpha), 1.0) * B * u * (1 - u) * (1 + r) * (1 + r) * (1 + r - p / alpha);
  const double den = p * q * (1 - p) * (1 - q) * (1 - p / alpha) * (u * (1 + r) - p / alpha);
  out.R = num / den;
  return out;
}

double q_series(double alpha, double p, double r, double rho, int terms) {
  double s = 0.0;
  const double c = 1.0 / (p * (1 - p) * (1 - p / alpha));
  for (int k = 1; k <= terms; ++k) {
    const double w = rho * std::pow(1 - rho, k - 1) * std::pow(1 + r, k - 1);
    s += w * (std::pow(1 + r - p / alpha, 1 - k) * c - std::pow(1 + r, 1 - k) / p);
  }
  return s;
}

// ----------------------------------------------------------------- rate checks

namespace {

void require_standard(const StableParams& p) {
  if (p.cauchy()) throw Error(ErrorCode::CauchyMode, "inverse-moment checks need alpha != 1");
}

void check_inv_exps(const StableParams& p, const InvMomentExps& e, char part) {
  if (part != 'a' && part != 'b') throw Error(ErrorCode::InvalidArgument, "part must be 'a' or 'b'");
  if (!(e.p > 0 && e.p < p.alpha * p.rho)) throw Error(ErrorCode::DomainError, "need p in (0, alpha rho)");
  if (part == 'a' && !(e.q >= 0 && e.q < p.alpha * (1 - p.rho)))
    throw Error(ErrorCode::DomainError, "need q in [0, alpha(1-rho))");
  if (part == 'b' && !(e.q > 0 && e.q < p.alpha)) throw Error(ErrorCode::DomainError, "need q in (0, alpha)");
  if (e.r < 0 || e.u < 0 || e.v < 0 || e.w < 0) throw Error(ErrorCode::DomainError, "need r, u, v, w >= 0");
  if (e.j < 1) throw Error(ErrorCode::InvalidArgument, "need j >= 1");
}

// l_i = L_{i-1}(1 - U_i), L_i = L_{i-1} U_i, L_0 = T
double ell_at(const NoiseRecord& rec, double T, int i) {
  double rem = T;
  for (int k = 1; k < i; ++k) rem *= rec.U(k);
  return rem * (1 - rec.U(i));
}

double inv_moment_sample(const NoiseRecord& rec, const PathLevels& lv, const StableParams& p,
                         const InvMomentExps& e, char part, int n) {
  const double ell = ell_at(rec, p.T, n + 1);
  double v = std::pow(ell, e.r) * std::pow(rec.E(e.j), e.u) * std::pow(rec.eta(Side::Plus), e.v) *
             std::pow(rec.eta(Side::Minus), e.w) * std::pow(lv.xp[n], -e.p);
  v *= part == 'a' ? std::pow(lv.xm[n], -e.q) : std::pow(lv.xm[n], e.q);
  return v;
}

AccumulatorVec inv_moment_levels(const StableParams& p, double kappa, const InvMomentExps& e, char part,
                                 int n_lo, int n_hi, std::uint64_t N, std::uint64_t seed, unsigned workers) {
  const int L = std::max(n_hi + 1, e.j);
  const CauchyQTable none;
  const std::size_t nl = static_cast<std::size_t>(n_hi - n_lo + 1);
  auto body = [&](std::uint64_t b, std::uint64_t end, AccumulatorVec& acc) {
    NoiseRecord rec(p, seed, b);
    PathLevels lv;
    for (std::uint64_t i = b; i < end; ++i) {
      rec.reset(seed, i);
      rec.ensure(L);
      compute_path_levels(rec, p, kappa, L, 0, &none, lv);
      for (int n = n_lo; n <= n_hi; ++n) acc.acc[n - n_lo].add(inv_moment_sample(rec, lv, p, e, part, n));
    }
  };
  return chunked_reduce(N, workers, AccumulatorVec(nl), body);
}

RateReport make_rate_report(int n_lo, int n_hi, const AccumulatorVec& a, double power, double ceiling) {
  RateReport r;
  for (int n = n_lo; n <= n_hi; ++n) {
    r.levels.push_back(n);
    r.means.push_back(a.acc[n - n_lo].mean);
    r.stderrs.push_back(a.acc[n - n_lo].stderr_());
  }
  const RateFit f = fit_geometric_rate(r.levels, r.means, r.stderrs, power);
  r.fitted_rate = f.rate;
  r.used_levels = f.used_levels;
  r.ceiling = ceiling;
  r.pass = f.used_levels.size() >= 3 && std::isfinite(f.rate) && f.rate <= r.ceiling + r.margin;
  return r;
}

}  // namespace

RateReport inverse_moment_rate_check(const StableParams& p, double kappa, const InvMomentExps& e, char part,
                                     int n_lo, int n_hi, std::uint64_t N, std::uint64_t seed, unsigned workers) {
  require_standard(p);
  check_inv_exps(p, e, part);
  check_kappa(kappa, p);
  if (n_lo < 1 || n_hi - n_lo + 1 < 3) throw Error(ErrorCode::InvalidArgument, "need n_lo >= 1 and >= 3 levels");
  const AccumulatorVec a = inv_moment_levels(p, kappa, e, part, n_lo, n_hi, N, seed, workers);
  return make_rate_report(n_lo, n_hi, a, 0.0, 1.0 / (1.0 + e.r));
}

std::pair<double, double> inverse_moment_estimate(const StableParams& p, double kappa, const InvMomentExps& e,
                                                  char part, int n, std::uint64_t N, std::uint64_t seed,
                                                  unsigned workers) {
  require_standard(p);
  check_inv_exps(p, e, part);
  check_kappa(kappa, p);
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "need n >= 1");
  const AccumulatorVec a = inv_moment_levels(p, kappa, e, part, n, n, N, seed, workers);
  return {a.acc[0].mean, a.acc[0].stderr_()};
}

ScalingReport inverse_moment_T_scaling(const StableParams& p, double kappa, const InvMomentExps& e, int n,
                                       std::uint64_t N, std::uint64_t seed, double T2, unsigned workers) {
  ScalingReport r;
  r.T1 = p.T;
  r.T2 = T2;
  StableParams p2 = validate_params(p.alpha, p.rho, T2);
  std::tie(r.m1, r.se1) = inverse_moment_estimate(p, kappa, e, 'a', n, N, seed, workers);
  std::tie(r.m2, r.se2) = inverse_moment_estimate(p2, kappa, e, 'a', n, N, seed + 0x9E3779B97F4A7C15ULL, workers);
  r.exponent = e.r - (e.p + e.q) / p.alpha;
  const double f = std::pow(T2 / p.T, r.exponent);
  const double se = std::sqrt(r.se2 * r.se2 + f * f * r.se1 * r.se1);
  r.z = se > 0 ? (r.m2 - f * r.m1) / se : 0.0;
  r.pass = std::fabs(r.z) <= 4.0;
  return r;
}

RateReport inv_bound_rate_check(const StableParams& p, double kappa, const InvBoundExps& e, int n_lo, int n_hi,
                                std::uint64_t N, std::uint64_t seed, unsigned workers) {
  require_standard(p);
  check_kappa(kappa, p);
  if (!(e.p >= 0 && e.p < p.alpha * p.rho)) throw Error(ErrorCode::DomainError, "need p in [0, alpha rho)");
  if (!(e.q >= 0 && e.q < p.alpha * (1 - p.rho))) throw Error(ErrorCode::DomainError, "need q in [0, alpha(1-rho))");
  if (!(e.r >= 0 && e.r < p.alpha)) throw Error(ErrorCode::DomainError, "need r in [0, alpha)");
  if (e.s < 0) throw Error(ErrorCode::DomainError, "need s >= 0");
  if (n_lo < 1 || n_hi - n_lo + 1 < 3) throw Error(ErrorCode::InvalidArgument, "need n_lo >= 1 and >= 3 levels");
  const int L = n_hi + 1;
  const CauchyQTable none;
  const std::size_t nl = static_cast<std::size_t>(n_hi - n_lo + 1);
  auto body = [&](std::uint64_t b, std::uint64_t end, AccumulatorVec& acc) {
    NoiseRecord rec(p, seed, b);
    PathLevels lv;
    for (std::uint64_t i = b; i < end; ++i) {
      rec.reset(seed, i);
      rec.ensure(L);
      compute_path_levels(rec, p, kappa, L, 0, &none, lv);
      double Z = rec.eta(Side::Plus) + rec.eta(Side::Minus);
      for (int k = 1; k <= n_lo; ++k) Z += rec.E(k);
      for (int n = n_lo; n <= n_hi; ++n) {
        Z += rec.E(n + 1);  // Z_m with m = n + 1
        const auto& x = e.side == Side::Plus ? lv.xp : lv.xm;
        const double delta = std::fabs(x[n + 1] - x[n]);
        const double v = std::pow(delta, e.r) * std::pow(Z, e.s) * std::pow(lv.xp[n], -e.p) * std::pow(lv.xm[n], -e.q);
        acc.acc[n - n_lo].add(v);
      }
    }
  };
  const AccumulatorVec a = chunked_reduce(N, workers, AccumulatorVec(nl), body);
  // divide by m^{s'} with m = n + 1; fit_geometric_rate divides by n^power,
  // so rescale the means by (n/(n+1))^{s'} first
  const double sp = e.s > 0 ? std::max(e.s, 1.0) : 0.0;
  AccumulatorVec scaled = a;
  for (int n = n_lo; n <= n_hi; ++n) {
    Accumulator& ac = scaled.acc[n - n_lo];
    const double f = std::pow(static_cast<double>(n) / (n + 1), sp);
    ac.mean *= f;
    ac.m2 *= f * f;
  }
  const double ceiling = std::max(1.0 / (1.0 + e.r / p.alpha), std::pow(kappa, e.r));
  return make_rate_report(n_lo, n_hi, scaled, sp, ceiling);
}

}  // namespace stablesup
