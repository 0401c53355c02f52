#include "stablesup/identities.hpp"

#include <algorithm>
#include <cmath>

#include "stablesup/errors.hpp"

namespace stablesup {

namespace {

void check_levels(int n, int m) {
  if (n < 1) throw Error(ErrorCode::LevelOrder, "need n >= 1");
  if (m < n) throw Error(ErrorCode::LevelOrder, "need m >= n");
}

double side_value(const ChiApprox& c, Side s) { return s == Side::Plus ? c.x_plus : c.x_minus; }

double magnitude(const WeightExpr& expr, const ChiApprox& chi, const NoiseRecord& noise, int m) {
  const int K = std::max(expr.max_generator(Side::Plus), expr.max_generator(Side::Minus));
  GeneratorValues g = generator_values(noise, m, K);
  g.xp_inv = 1.0 / chi.x_plus;
  g.xm_inv = 1.0 / chi.x_minus;
  return CompiledWeight(expr, chi.params.zeta()).eval_magnitude(g);
}

}  // namespace

FdReport reg_fd_check(const StableParams& p, double kappa, int n, int m, double power, Side side,
                      std::uint64_t samples, std::uint64_t seed, double h) {
  check_levels(n, m);
  if (power == 0.0) throw Error(ErrorCode::InvalidArgument, "power must be nonzero");
  const Side other = side == Side::Plus ? Side::Minus : Side::Plus;
  FdReport rep;
  rep.samples = samples;
  for (std::uint64_t i = 0; i < samples; ++i) {
    NoiseRecord rec(p, seed, i, m);
    const ChiApprox c0 = build_chi(rec, n, p, kappa);
    const ChiApprox cu = build_chi(rec.perturbed(side, m, h), n, p, kappa);
    const ChiApprox cd = build_chi(rec.perturbed(side, m, -h), n, p, kappa);
    const double x0 = side_value(c0, side);
    const double fd = (std::pow(side_value(cu, side), power) - std::pow(side_value(cd, side), power)) / (2 * h);
    const double exact = p.eta_exponent() * power * std::pow(x0, power);
    const double e1 = std::fabs(fd - exact) / std::fabs(exact);
    const double y0 = side_value(c0, other);
    const double e2 = std::fabs(side_value(cu, other) - side_value(cd, other)) / (2 * h * y0);
    rep.max_rel_error = std::max({rep.max_rel_error, e1, e2});
  }
  return rep;
}

FdReport d_operator_fd_check(const WeightExpr& expr, Side side, const StableParams& p, double kappa, int n,
                             int m, std::uint64_t samples, std::uint64_t seed, double h) {
  check_levels(n, m);
  const WeightExpr dexpr = apply_D(expr, side);
  FdReport rep;
  rep.samples = samples;
  for (std::uint64_t i = 0; i < samples; ++i) {
    NoiseRecord rec(p, seed, i, m);
    const NoiseRecord up = rec.perturbed(side, m, h), dn = rec.perturbed(side, m, -h);
    const ChiApprox c0 = build_chi(rec, n, p, kappa);
    const double exact = eval_weight(dexpr, c0, rec, m);
    const double fd = (eval_weight(expr, build_chi(up, n, p, kappa), up, m) -
                       eval_weight(expr, build_chi(dn, n, p, kappa), dn, m)) /
                      (2 * h);
    // the difference quotient loses digits in proportion to |expr|'s term sum
    const double scale = std::max({std::fabs(exact), magnitude(dexpr, c0, rec, m), magnitude(expr, c0, rec, m)});
    if (scale > 0) rep.max_rel_error = std::max(rep.max_rel_error, std::fabs(fd - exact) / scale);
  }
  return rep;
}

FdReport level_shift_check(int k_plus, int k_minus, const StableParams& p, double kappa, int n, int m,
                           std::uint64_t samples, std::uint64_t seed) {
  check_levels(n, m);
  if (m <= n) throw Error(ErrorCode::LevelOrder, "level shift needs m > n");
  const WeightExpr w = iterate_H(k_plus, k_minus, p.mode());
  const CompiledWeight cw(w, p.zeta());
  const int K = std::max(k_plus, k_minus);
  const CauchyQTable qtab = p.cauchy() ? CauchyQTable(p.mu(), std::max(K, 1)) : CauchyQTable();
  FdReport rep;
  rep.samples = samples;
  PathLevels lv;
  for (std::uint64_t i = 0; i < samples; ++i) {
    NoiseRecord rec(p, seed, i, m);
    compute_path_levels(rec, p, kappa, m, K, &qtab, lv);
    auto scaled = [&](int lvl, bool mag) {
      const GeneratorValues g = lv.at(lvl, m);
      return (mag ? cw.eval_magnitude(g) : cw.eval(g)) * std::pow(lv.xp[lvl], k_plus) * std::pow(lv.xm[lvl], k_minus);
    };
    const double a = scaled(n, false), b = scaled(n + 1, false);
    const double scale = std::max({std::fabs(a), std::fabs(b), scaled(n, true)});
    if (scale > 0) rep.max_rel_error = std::max(rep.max_rel_error, std::fabs(a - b) / scale);
  }
  return rep;
}

bool weights_commute(int k, int j, Mode mode) {
  if (k < 0 || j < 0) throw Error(ErrorCode::InvalidArgument, "orders must be >= 0");
  WeightExpr a = WeightExpr::one(mode);
  for (int i = 0; i < k; ++i) a = apply_H(a, Side::Plus);
  for (int i = 0; i < j; ++i) a = apply_H(a, Side::Minus);
  return a == iterate_H(k, j, mode);
}

}  // namespace stablesup
