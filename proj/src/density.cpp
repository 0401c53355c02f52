#include "stablesup/density.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "stablesup/errors.hpp"
#include "stablesup/parallel.hpp"
#include "stablesup/stats.hpp"

namespace stablesup {

namespace {

constexpr std::uint64_t kBootstrapSalt = 0xB0075743A9E1C6D1ULL;
constexpr int kBootstrapResamples = 500;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

Ramp primitive_hat_F(Point pt) {
  if (!(pt.x_plus > 0.0 && pt.x_minus > 0.0))
    throw Error(ErrorCode::OutsideSupport, "ramp corner must be in the open quadrant");
  return Ramp{pt.x_plus, pt.x_minus};
}

// -------------------------------------------------------------- SeriesSampler

SeriesSampler::SeriesSampler(const StableParams& p, double kappa, SeriesConfig cfg,
                             std::vector<Orders> orders)
    : p_(p), kappa_(kappa), cfg_(cfg), orders_(std::move(orders)) {
  if (cfg_.n0 < 1 || cfg_.J < 0) throw Error(ErrorCode::InvalidArgument, "need n0 >= 1 and J >= 0");
  check_kappa(kappa_, p_);
  const int shift = cfg_.primitive == Primitive::Ramp ? 1 : 0;
  for (const Orders& o : orders_) {
    if (o.k_plus < 0 || o.k_minus < 0) throw Error(ErrorCode::InvalidArgument, "orders must be >= 0");
    weights_.emplace_back(iterate_H(o.k_plus + shift, o.k_minus + shift, p_.mode()), p_.zeta());
    K_ = std::max({K_, o.k_plus + shift, o.k_minus + shift});
  }
  if (p_.cauchy()) qtab_ = CauchyQTable(p_.mu(), K_);
  same_.assign(orders_.size(), std::vector<double>(cfg_.J + 1));
  cross_.assign(orders_.size(), std::vector<double>(cfg_.J));
}

void SeriesSampler::load(NoiseRecord& noise) {
  const int L = max_level();
  noise.ensure(L);
  compute_path_levels(noise, p_, kappa_, L, K_, &qtab_, lv_);
  const int n0 = cfg_.n0;
  for (std::size_t o = 0; o < orders_.size(); ++o) {
    const CompiledWeight& w = weights_[o];
    for (int n = n0; n <= L; ++n)
      same_[o][n - n0] = w.eval_at(lv_.gens[n], 1.0 / lv_.xp[n], 1.0 / lv_.xm[n]);
    for (int i = n0; i < L; ++i)
      cross_[o][i - n0] = w.eval_at(lv_.gens[i + 1], 1.0 / lv_.xp[i], 1.0 / lv_.xm[i]);
  }
}

double SeriesSampler::value(std::size_t idx, Point pt, std::vector<SeriesTerm>* terms) const {
  const Ramp ramp{pt.x_plus, pt.x_minus};
  const bool step = cfg_.primitive == Primitive::Step;
  auto F = [&](double x, double y) {
    if (step) return (x > pt.x_plus && y > pt.x_minus) ? 1.0 : 0.0;
    return ramp(x, y);
  };
  const int n0 = cfg_.n0, L = max_level();
  const auto& same = same_[idx];
  const auto& cross = cross_[idx];
  double f_prev = F(lv_.xp[n0], lv_.xm[n0]);
  double v = same[0] * f_prev;
  if (terms) terms->clear();
  for (int i = n0; i < L; ++i) {
    const double f_next = F(lv_.xp[i + 1], lv_.xm[i + 1]);
    const double next = same[i + 1 - n0] * f_next;
    const double prev = cross[i - n0] * f_prev;
    v += next - prev;
    if (terms) terms->push_back(SeriesTerm{i, next, prev, next - prev});
    f_prev = f_next;
  }
  const Orders& o = orders_[idx];
  return ((o.k_plus + o.k_minus) % 2 ? -v : v);
}

double sample_series(Point pt, Orders orders, int n0, int J, const StableParams& p, double kappa,
                     Stream& rng, std::vector<SeriesTerm>* terms) {
  SeriesSampler s(p, kappa, SeriesConfig{n0, J}, {orders});
  NoiseRecord rec(p, rng.bits(), 0);
  s.load(rec);
  return s.value(0, pt, terms);
}

// ------------------------------------------------------------------ estimates

namespace {

struct Strata {
  std::uint64_t n_plus = 0, n_minus = 0;
};

Strata strata_for(const StableParams& p, std::uint64_t N, bool stratify) {
  if (!stratify) return {N, 0};
  Strata s;
  s.n_plus = static_cast<std::uint64_t>(std::llround(p.rho * static_cast<double>(N)));
  s.n_plus = std::clamp<std::uint64_t>(s.n_plus, 1, N - 1);
  s.n_minus = N - s.n_plus;
  return s;
}

// Runs `per_sample(sampler, out)` over one stratum and accumulates the query values.
AccumulatorVec run_stratum(const SeriesSampler& proto, const std::vector<std::vector<std::pair<std::size_t, QueryTerm>>>& plan,
                           const StableParams& p, std::uint64_t seed, std::uint64_t begin,
                           std::uint64_t count, int first_sign, unsigned workers) {
  auto body = [&](std::uint64_t b, std::uint64_t e, AccumulatorVec& acc) {
    SeriesSampler s = proto;
    NoiseRecord rec(p, seed, begin + b, 0, first_sign);
    for (std::uint64_t i = b; i < e; ++i) {
      rec.reset(seed, begin + i, first_sign);
      s.load(rec);
      for (std::size_t q = 0; q < plan.size(); ++q) {
        double v = 0.0;
        for (const auto& [idx, t] : plan[q]) v += t.coef * s.value(idx, t.point);
        acc.acc[q].add(v);
      }
    }
  };
  return chunked_reduce(count, workers, AccumulatorVec(plan.size()), body);
}

struct Plan {
  std::vector<Orders> orders;
  std::vector<std::vector<std::pair<std::size_t, QueryTerm>>> terms;
};

Plan make_plan(const std::vector<Query>& queries) {
  Plan pl;
  for (const Query& q : queries) {
    std::vector<std::pair<std::size_t, QueryTerm>> row;
    for (const QueryTerm& t : q) {
      auto it = std::find(pl.orders.begin(), pl.orders.end(), t.orders);
      std::size_t idx = static_cast<std::size_t>(it - pl.orders.begin());
      if (it == pl.orders.end()) pl.orders.push_back(t.orders);
      row.emplace_back(idx, t);
    }
    pl.terms.push_back(std::move(row));
  }
  return pl;
}

}  // namespace

std::vector<QueryResult> estimate_queries(const std::vector<Query>& queries, SeriesConfig cfg,
                                          std::uint64_t N, const StableParams& p, double kappa,
                                          std::uint64_t seed, const EstimatorOptions& opt) {
  if (N < 2) throw Error(ErrorCode::InvalidArgument, "need N >= 2");
  const Plan pl = make_plan(queries);
  const SeriesSampler proto(p, kappa, cfg, pl.orders);
  const Strata st = strata_for(p, N, opt.stratify_first_sign);
  std::vector<QueryResult> out(queries.size());
  if (!opt.stratify_first_sign) {
    const AccumulatorVec a = run_stratum(proto, pl.terms, p, seed, 0, N, 0, opt.workers);
    for (std::size_t q = 0; q < out.size(); ++q) out[q] = {a.acc[q].mean, a.acc[q].stderr_()};
    return out;
  }
  const AccumulatorVec ap = run_stratum(proto, pl.terms, p, seed, 0, st.n_plus, +1, opt.workers);
  const AccumulatorVec am = run_stratum(proto, pl.terms, p, seed, st.n_plus, st.n_minus, -1, opt.workers);
  const double r = p.rho;
  for (std::size_t q = 0; q < out.size(); ++q) {
    const Accumulator& x = ap.acc[q];
    const Accumulator& y = am.acc[q];
    out[q].value = r * x.mean + (1 - r) * y.mean;
    out[q].stderr_ = std::sqrt(r * r * x.variance() / x.n + (1 - r) * (1 - r) * y.variance() / y.n);
  }
  return out;
}

std::vector<DensityEstimate> estimate_density_grid(const std::vector<Point>& pts, Orders orders,
                                                   SeriesConfig cfg, std::uint64_t N,
                                                   const StableParams& p, double kappa,
                                                   std::uint64_t seed, const EstimatorOptions& opt) {
  if (orders.k_plus < 1 || orders.k_minus < 1)
    throw Error(ErrorCode::InvalidArgument, "density orders must be >= (1,1)");
  std::vector<Query> qs;
  qs.reserve(pts.size());
  for (const Point& pt : pts) {
    primitive_hat_F(pt);
    qs.push_back({QueryTerm{orders, pt, 1.0}});
  }
  const auto res = estimate_queries(qs, cfg, N, p, kappa, seed, opt);
  std::vector<DensityEstimate> out;
  out.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    DensityEstimate d;
    d.point = pts[i];
    d.orders = orders;
    d.value = res[i].value;
    d.stderr_ = res[i].stderr_;
    d.samples = N;
    d.n0 = cfg.n0;
    d.J = cfg.J;
    d.params = p;
    d.kappa = kappa;
    d.seed = seed;
    out.push_back(d);
  }
  return out;
}

namespace {
struct ValueList {
  std::vector<double> v;
  void merge(const ValueList& o) { v.insert(v.end(), o.v.begin(), o.v.end()); }
};

std::vector<double> collect(const SeriesSampler& proto, Point pt, const StableParams& p,
                            std::uint64_t seed, std::uint64_t begin, std::uint64_t count,
                            int first_sign, unsigned workers) {
  auto body = [&](std::uint64_t b, std::uint64_t e, ValueList& acc) {
    SeriesSampler s = proto;
    NoiseRecord rec(p, seed, begin + b, 0, first_sign);
    acc.v.reserve(e - b);
    for (std::uint64_t i = b; i < e; ++i) {
      rec.reset(seed, begin + i, first_sign);
      s.load(rec);
      acc.v.push_back(s.value(0, pt));
    }
  };
  return chunked_reduce(count, workers, ValueList{}, body).v;
}

Accumulator summarize(const std::vector<double>& v) {
  Accumulator a;
  for (double x : v) a.add(x);
  return a;
}
}  // namespace

DensityEstimate estimate_density(Point pt, Orders orders, SeriesConfig cfg, std::uint64_t N,
                                 const StableParams& p, double kappa, std::uint64_t seed,
                                 const EstimatorOptions& opt) {
  if (orders.k_plus < 1 || orders.k_minus < 1)
    throw Error(ErrorCode::InvalidArgument, "density orders must be >= (1,1)");
  if (N < 2) throw Error(ErrorCode::InvalidArgument, "need N >= 2");
  primitive_hat_F(pt);
  const SeriesSampler proto(p, kappa, cfg, {orders});
  const Strata st = strata_for(p, N, opt.stratify_first_sign);
  const std::vector<double> vp = collect(proto, pt, p, seed, 0, st.n_plus, opt.stratify_first_sign ? 1 : 0, opt.workers);
  const std::vector<double> vm = opt.stratify_first_sign
                                     ? collect(proto, pt, p, seed, st.n_plus, st.n_minus, -1, opt.workers)
                                     : std::vector<double>{};
  const double r = opt.stratify_first_sign ? p.rho : 1.0;
  auto combine = [&](const Accumulator& a, const Accumulator& b) {
    return r * a.mean + (vm.empty() ? 0.0 : (1 - r) * b.mean);
  };
  const Accumulator ap = summarize(vp), am = summarize(vm);

  DensityEstimate d;
  d.point = pt;
  d.orders = orders;
  d.value = combine(ap, am);
  d.stderr_ = vm.empty() ? ap.stderr_()
                         : std::sqrt(r * r * ap.variance() / ap.n + (1 - r) * (1 - r) * am.variance() / am.n);
  d.samples = N;
  d.n0 = cfg.n0;
  d.J = cfg.J;
  d.params = p;
  d.kappa = kappa;
  d.seed = seed;

  if (opt.bootstrap && N >= 10000) {
    Stream rs(seed ^ kBootstrapSalt, N);
    std::vector<double> stats;
    stats.reserve(kBootstrapResamples);
    auto resample_mean = [&](const std::vector<double>& v) {
      if (v.empty()) return 0.0;
      double s = 0.0;
      for (std::size_t k = 0; k < v.size(); ++k) s += v[rs.bits() % v.size()];
      return s / static_cast<double>(v.size());
    };
    for (int b = 0; b < kBootstrapResamples; ++b) {
      const double mp = resample_mean(vp);
      const double mm = resample_mean(vm);
      stats.push_back(r * mp + (vm.empty() ? 0.0 : (1 - r) * mm));
    }
    std::sort(stats.begin(), stats.end());
    const auto at = [&](double q) {
      const double pos = q * (stats.size() - 1);
      const std::size_t lo = static_cast<std::size_t>(pos);
      const double fr = pos - lo;
      return lo + 1 < stats.size() ? stats[lo] * (1 - fr) + stats[lo + 1] * fr : stats[lo];
    };
    d.ci99 = std::make_pair(at(0.005), at(0.995));
  }
  return d;
}

// ------------------------------------------------------------ coordinate change

Query xy_query(int n, int m, double x, double y) {
  if (n < 1 || m < 1) throw Error(ErrorCode::InvalidArgument, "need n, m >= 1");
  if (!(y > std::max(x, 0.0))) throw Error(ErrorCode::OutsideSupport, "need y > max(x, 0)");
  Query q;
  const double sign = (n - 1) % 2 ? -1.0 : 1.0;
  for (int i = 0; i <= m - 1; ++i)
    q.push_back(QueryTerm{Orders{m - i, n + i}, Point{y, y - x}, sign * binom(m - 1, i)});
  return q;
}

double to_xy_derivatives(const std::map<Orders, double>& g, int n, int m, double x, double y) {
  double s = 0.0;
  for (const QueryTerm& t : xy_query(n, m, x, y)) {
    auto it = g.find(t.orders);
    if (it == g.end())
      throw Error(ErrorCode::MissingOrder, "missing order (" + std::to_string(t.orders.k_plus) + "," +
                                               std::to_string(t.orders.k_minus) + ")");
    s += t.coef * it->second;
  }
  return s;
}

// ------------------------------------------------------------------- survival

SurvivalEstimate estimate_survival(Point pt, std::uint64_t N, const StableParams& p, double kappa,
                                   int n_truncation, std::uint64_t seed, unsigned workers) {
  if (n_truncation < 1) throw Error(ErrorCode::InvalidArgument, "need n_truncation >= 1");
  check_kappa(kappa, p);
  const CauchyQTable none;
  auto body = [&](std::uint64_t b, std::uint64_t e, Accumulator& acc) {
    NoiseRecord rec(p, seed, b);
    PathLevels lv;
    for (std::uint64_t i = b; i < e; ++i) {
      rec.reset(seed, i);
      rec.ensure(n_truncation);
      compute_path_levels(rec, p, kappa, n_truncation, 0, &none, lv);
      acc.add(lv.xp[n_truncation] > pt.x_plus && lv.xm[n_truncation] > pt.x_minus ? 1.0 : 0.0);
    }
  };
  const Accumulator a = chunked_reduce(N, workers, Accumulator{}, body);
  return {a.mean, a.stderr_()};
}

// ---------------------------------------------------------------------- decay

double decay_ceiling(const StableParams& p, double kappa, double s) {
  return std::max(1.0 / (1.0 + s / p.alpha), std::pow(kappa, s));
}

DecayReport decay_rate_check(Orders wo, const StableParams& p, double kappa, int n_lo, int n_hi,
                             std::uint64_t N, std::uint64_t seed, double alpha_prime, double p_moment,
                             Point pt, unsigned workers) {
  if (n_lo < 1 || n_hi - n_lo + 1 < 6) throw Error(ErrorCode::InvalidArgument, "level range must span >= 6 levels");
  if (!(alpha_prime >= 0.0 && alpha_prime < p.alpha))
    throw Error(ErrorCode::InvalidArgument, "need alpha' in [0, alpha)");
  check_kappa(kappa, p);
  const CompiledWeight w(iterate_H(wo.k_plus, wo.k_minus, p.mode()), p.zeta());
  const int K = std::max(wo.k_plus, wo.k_minus);
  const CauchyQTable qtab = p.cauchy() ? CauchyQTable(p.mu(), std::max(K, 1)) : CauchyQTable();
  const Ramp F = primitive_hat_F(pt);
  const int L = n_hi + 1;
  const std::size_t nl = static_cast<std::size_t>(n_hi - n_lo + 1);

  auto body = [&](std::uint64_t b, std::uint64_t e, AccumulatorVec& acc) {
    NoiseRecord rec(p, seed, b);
    PathLevels lv;
    for (std::uint64_t i = b; i < e; ++i) {
      rec.reset(seed, i);
      rec.ensure(L);
      compute_path_levels(rec, p, kappa, L, K, &qtab, lv);
      for (int n = n_lo; n <= n_hi; ++n) {
        const double next = w.eval_at(lv.gens[n + 1], 1.0 / lv.xp[n + 1], 1.0 / lv.xm[n + 1]) *
                            F(lv.xp[n + 1], lv.xm[n + 1]);
        const double prev = w.eval_at(lv.gens[n + 1], 1.0 / lv.xp[n], 1.0 / lv.xm[n]) * F(lv.xp[n], lv.xm[n]);
        acc.acc[n - n_lo].add(std::pow(std::fabs(next - prev), p_moment));
      }
    }
  };
  const AccumulatorVec a = chunked_reduce(N, workers, AccumulatorVec(nl), body);

  DecayReport r;
  for (int n = n_lo; n <= n_hi; ++n) {
    r.levels.push_back(n);
    r.means.push_back(a.acc[n - n_lo].mean);
    r.stderrs.push_back(a.acc[n - n_lo].stderr_());
  }
  r.s = std::min(p_moment, alpha_prime);
  r.p_prime = std::max(p_moment * (wo.k_plus + wo.k_minus), 1.0) + std::max(alpha_prime - 1.0, 0.0) +
              std::max(alpha_prime - r.s - 1.0, 0.0);
  r.ceiling = decay_ceiling(p, kappa, r.s);
  const RateFit f = fit_geometric_rate(r.levels, r.means, r.stderrs, r.p_prime);
  r.fitted_rate = f.rate;
  r.used_levels = f.used_levels;
  r.pass = std::isfinite(f.rate) && f.rate <= r.ceiling + r.margin;
  return r;
}

void write_density_csv(std::ostream& os, const std::vector<DensityEstimate>& rows) {
  os << "x_plus,x_minus,k_plus,k_minus,value,stderr,n0,J,N,seed\n";
  for (const auto& d : rows) {
    os << fmt17(d.point.x_plus) << ',' << fmt17(d.point.x_minus) << ',' << d.orders.k_plus << ','
       << d.orders.k_minus << ',' << fmt17(d.value) << ',' << fmt17(d.stderr_) << ',' << d.n0 << ','
       << d.J << ',' << d.samples << ',' << d.seed << '\n';
  }
}

}  // namespace stablesup
