// stablesup command-line front end.
//
// Exit codes: 0 ok, 1 a check failed, 2 usage, validation or IO error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "stablesup/bounds.hpp"
#include "stablesup/chi.hpp"
#include "stablesup/density.hpp"
#include "stablesup/errors.hpp"
#include "stablesup/oracles.hpp"
#include "stablesup/parallel.hpp"
#include "stablesup/stable_core.hpp"
#include "stablesup/stats.hpp"
#include "stablesup/verify.hpp"

namespace ss = stablesup;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ------------------------------------------------------------------ config

struct GridSpec {
  bool xs = false;  // false: (x_plus, x_minus); true: (x, y) = (X_T level, sup level)
  bool log = false;
  double a0 = 0.1, a1 = 4.0;
  int na = 20;
  double b0 = 0.1, b1 = 4.0;
  int nb = 20;
};

struct RunConfig {
  double alpha = 1.5;
  double rho = 0.5;
  double T = 1.0;
  std::optional<double> kappa;
  int n0 = 4;
  int J = 12;
  std::uint64_t N = 100000;
  std::string orders = "1,1";
  std::string grid = "pm:lin:0.1:4:20:0.1:4:20";
  std::optional<std::uint64_t> seed;
  unsigned workers = 1;
  std::string out;
  std::string suite;
  bool timing = false;
  int levels = 40;
  std::optional<double> alpha_prime;
  double C = 1.0;
  bool bounds = false;
  bool estimates = false;
  std::string primitive = "step";
  // rate-check
  std::string kind = "decay";
  int n_lo = 3;
  int n_hi = 12;
  double ep = 0.3, eq = 0.3, er = 1.0, es = 1.0, eu = 0.0, ev = 0.0, ew = 0.0;
  std::string side = "plus";
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

double to_double(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string("bad number for ") + what + ": '" + s + "'");
  }
}

int to_int(const std::string& s, const char* what) {
  const double v = to_double(s, what);
  if (v != std::floor(v)) throw UsageError(std::string(what) + " must be an integer");
  return static_cast<int>(v);
}

// SYSTEM:SPACING:a0:a1:na:b0:b1:nb with SYSTEM in {pm, xs}, SPACING in {lin, log}.
GridSpec parse_grid(const std::string& text) {
  const auto f = split(text, ':');
  if (f.size() != 8) throw UsageError("grid must be SYSTEM:SPACING:a0:a1:na:b0:b1:nb");
  GridSpec g;
  if (f[0] == "pm") g.xs = false;
  else if (f[0] == "xs") g.xs = true;
  else throw UsageError("grid system must be pm or xs");
  if (f[1] == "lin") g.log = false;
  else if (f[1] == "log") g.log = true;
  else throw UsageError("grid spacing must be lin or log");
  g.a0 = to_double(f[2], "grid a0");
  g.a1 = to_double(f[3], "grid a1");
  g.na = to_int(f[4], "grid na");
  g.b0 = to_double(f[5], "grid b0");
  g.b1 = to_double(f[6], "grid b1");
  g.nb = to_int(f[7], "grid nb");
  if (g.na < 1 || g.nb < 1) throw UsageError("grid must be nonempty");
  if (!(g.a1 > g.a0) || !(g.b1 > g.b0)) throw UsageError("grid ranges must be increasing");
  if (g.log && (g.a0 <= 0 || g.b0 <= 0)) throw UsageError("log spacing needs positive ranges");
  return g;
}

// Cell midpoints (geometric midpoints for log spacing).
std::vector<double> axis(double lo, double hi, int n, bool log) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) {
    const double t = (i + 0.5) / n;
    v[i] = log ? std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))) : lo + t * (hi - lo);
  }
  return v;
}

std::pair<int, int> parse_orders(const std::string& s) {
  const auto f = split(s, ',');
  if (f.size() != 2) throw UsageError("orders must be A,B");
  return {to_int(f[0], "orders"), to_int(f[1], "orders")};
}

ss::Side parse_side(const std::string& s) {
  if (s == "plus" || s == "+") return ss::Side::Plus;
  if (s == "minus" || s == "-") return ss::Side::Minus;
  throw UsageError("side must be plus or minus");
}

std::uint64_t resolve_seed(const RunConfig& c) {
  if (c.seed) return *c.seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

struct Resolved {
  ss::StableParams p;
  double kappa = 0.0;
  std::uint64_t seed = 0;
};

Resolved resolve(const RunConfig& c) {
  Resolved r;
  r.p = ss::validate_params(c.alpha, c.rho, c.T);
  r.kappa = c.kappa ? *c.kappa : ss::default_kappa(r.p);
  ss::check_kappa(r.kappa, r.p);
  r.seed = resolve_seed(c);
  return r;
}

void echo_metadata(const std::string& cmd, const Resolved& r) {
  std::cerr << "# " << cmd << " alpha=" << fmt17(r.p.alpha) << " rho=" << fmt17(r.p.rho)
            << " T=" << fmt17(r.p.T) << " kappa=" << fmt17(r.kappa) << " seed=" << r.seed << '\n';
}

void emit(const RunConfig& c, const std::string& text) {
  if (c.out.empty() || c.out == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw UsageError("cannot open " + c.out + " for writing");
  f << text;
  if (!f) throw UsageError("write failed for " + c.out);
}

// ----------------------------------------------------------------- commands

int cmd_sample(const RunConfig& c) {
  const Resolved r = resolve(c);
  if (c.levels < 1) throw UsageError("levels must be >= 1");
  echo_metadata("sample", r);
  std::vector<ss::JointSample> rows(c.N);
  struct Nothing {
    void merge(const Nothing&) {}
  };
  ss::chunked_reduce(c.N, c.workers, Nothing{}, [&](std::uint64_t b, std::uint64_t e, Nothing&) {
    for (std::uint64_t i = b; i < e; ++i) {
      ss::Stream s(r.seed, i);
      rows[i] = ss::simulate_joint(r.p, r.kappa, c.levels, s);
    }
  });
  std::string out = "x_T,sup\n";
  for (const auto& s : rows) out += fmt17(s.x_T) + ',' + fmt17(s.sup) + '\n';
  emit(c, out);
  return kExitOk;
}

ss::SeriesConfig series_config(const RunConfig& c) {
  ss::SeriesConfig cfg;
  cfg.n0 = c.n0;
  cfg.J = c.J;
  if (c.primitive == "step") cfg.primitive = ss::Primitive::Step;
  else if (c.primitive == "ramp") cfg.primitive = ss::Primitive::Ramp;
  else throw UsageError("primitive must be step or ramp");
  return cfg;
}

ss::BoundQuery bound_query(const RunConfig& c, const ss::StableParams& p, int n, int m) {
  ss::BoundQuery q = ss::default_bound_query(p);
  if (c.alpha_prime) q.alpha_prime = *c.alpha_prime;
  q.n = n;
  q.m = m;
  q.C = c.C;
  ss::validate_bound_query(q);
  return q;
}

// Grid points in (x_plus, x_minus). In xs mode a point (x, y) maps to (y, y - x).
std::vector<ss::Point> grid_points(const GridSpec& g) {
  const auto A = axis(g.a0, g.a1, g.na, g.log);
  const auto B = axis(g.b0, g.b1, g.nb, g.log);
  std::vector<ss::Point> pts;
  pts.reserve(A.size() * B.size());
  for (double a : A)
    for (double b : B) pts.push_back(g.xs ? ss::Point{b, b - a} : ss::Point{a, b});
  return pts;
}

int cmd_density_grid(const RunConfig& c) {
  const Resolved r = resolve(c);
  const GridSpec g = parse_grid(c.grid);
  const auto [oa, ob] = parse_orders(c.orders);
  const ss::SeriesConfig cfg = series_config(c);
  ss::EstimatorOptions opt;
  opt.workers = c.workers;
  opt.bootstrap = false;
  echo_metadata("density-grid", r);
  std::ostringstream os;

  if (!g.xs) {
    const auto pts = grid_points(g);
    const auto est = ss::estimate_density_grid(pts, {oa, ob}, cfg, c.N, r.p, r.kappa, r.seed, opt);
    if (c.bounds) {
      const ss::BoundQuery q = bound_query(c, r.p, oa, ob);
      ss::write_bounds_csv(os, pts, q, &est);
    } else {
      ss::write_density_csv(os, est);
    }
    emit(c, os.str());
    return kExitOk;
  }

  // xs: derivatives of the joint CDF of (X_T, sup); zero outside y > max(x, 0).
  if (c.bounds) throw UsageError("--bounds is only available on the pm grid");
  const auto X = axis(g.a0, g.a1, g.na, g.log);
  const auto Y = axis(g.b0, g.b1, g.nb, g.log);
  std::vector<ss::Query> qs;
  std::vector<int> slot;
  for (double x : X)
    for (double y : Y) {
      if (y > std::max(x, 0.0)) {
        slot.push_back(static_cast<int>(qs.size()));
        qs.push_back(ss::xy_query(oa, ob, x, y));
      } else {
        slot.push_back(-1);
      }
    }
  std::vector<ss::QueryResult> res;
  if (!qs.empty()) res = ss::estimate_queries(qs, cfg, c.N, r.p, r.kappa, r.seed, opt);
  os << "x,y,n,m,value,stderr,n0,J,N,seed\n";
  std::size_t k = 0;
  for (double x : X)
    for (double y : Y) {
      const int s = slot[k++];
      const double v = s >= 0 ? res[s].value : 0.0;
      const double e = s >= 0 ? res[s].stderr_ : 0.0;
      os << fmt17(x) << ',' << fmt17(y) << ',' << oa << ',' << ob << ',' << fmt17(v) << ',' << fmt17(e) << ','
         << cfg.n0 << ',' << cfg.J << ',' << c.N << ',' << r.seed << '\n';
    }
  emit(c, os.str());
  return kExitOk;
}

int cmd_bounds_grid(const RunConfig& c) {
  const GridSpec g = parse_grid(c.grid);
  const auto [oa, ob] = parse_orders(c.orders);
  std::ostringstream os;
  auto pts = grid_points(g);
  if (g.xs) {
    std::erase_if(pts, [](const ss::Point& p) { return !(p.x_plus > 0 && p.x_minus > 0); });
    if (pts.empty()) throw UsageError("no grid point with y > max(x, 0)");
  }
  if (!c.estimates) {
    const ss::StableParams p = ss::validate_params(c.alpha, c.rho, c.T);
    ss::write_bounds_csv(os, pts, bound_query(c, p, oa, ob));
    emit(c, os.str());
    return kExitOk;
  }
  const Resolved r = resolve(c);
  echo_metadata("bounds-grid", r);
  ss::EstimatorOptions opt;
  opt.workers = c.workers;
  opt.bootstrap = false;
  const auto est = ss::estimate_density_grid(pts, {oa, ob}, series_config(c), c.N, r.p, r.kappa, r.seed, opt);
  ss::write_bounds_csv(os, pts, bound_query(c, r.p, oa, ob), &est);
  emit(c, os.str());
  return kExitOk;
}

int cmd_verify(const RunConfig& c) {
  if (c.suite.empty()) throw UsageError("--suite is required (fast, full, appendix, ibp, rates)");
  bool known = false;
  for (const auto& s : ss::suite_names()) known = known || s == c.suite;
  if (!known) throw UsageError("unknown suite '" + c.suite + "'");
  ss::VerifyOptions opt;
  if (c.seed) opt.seed = *c.seed;
  opt.workers = c.workers;
  opt.timing = c.timing;
  const auto recs = ss::run_suite(c.suite, opt);
  emit(c, ss::report_json(c.suite, opt, recs) + "\n");
  for (const auto& rec : recs)
    if (!rec.pass) return kExitCheckFailed;
  return kExitOk;
}

int cmd_rate_check(const RunConfig& c) {
  const Resolved r = resolve(c);
  if (r.p.cauchy()) throw UsageError("rate checks are implemented for alpha != 1 only");
  echo_metadata("rate-check", r);
  std::vector<int> levels, used;
  std::vector<double> means, ses;
  double rate = 0, ceiling = 0, margin = 0.05;
  bool pass = false;
  if (c.kind == "decay") {
    const auto [oa, ob] = parse_orders(c.orders);
    const double ap = c.alpha_prime ? *c.alpha_prime : 0.8 * r.p.alpha;
    const auto d = ss::decay_rate_check({oa, ob}, r.p, r.kappa, c.n_lo, c.n_hi, c.N, r.seed, ap, 1.0, {1.0, 1.0},
                                        c.workers);
    levels = d.levels, means = d.means, ses = d.stderrs, used = d.used_levels;
    rate = d.fitted_rate, ceiling = d.ceiling, margin = d.margin, pass = d.pass;
  } else if (c.kind == "inv-mom-a" || c.kind == "inv-mom-b") {
    ss::InvMomentExps e;
    e.p = c.ep, e.q = c.eq, e.r = c.er, e.u = c.eu, e.v = c.ev, e.w = c.ew;
    const auto d = ss::inverse_moment_rate_check(r.p, r.kappa, e, c.kind.back(), c.n_lo, c.n_hi, c.N, r.seed,
                                                 c.workers);
    levels = d.levels, means = d.means, ses = d.stderrs, used = d.used_levels;
    rate = d.fitted_rate, ceiling = d.ceiling, margin = d.margin, pass = d.pass;
  } else if (c.kind == "inv-bound") {
    ss::InvBoundExps e;
    e.p = c.ep, e.q = c.eq, e.r = c.er, e.s = c.es, e.side = parse_side(c.side);
    const auto d = ss::inv_bound_rate_check(r.p, r.kappa, e, c.n_lo, c.n_hi, c.N, r.seed, c.workers);
    levels = d.levels, means = d.means, ses = d.stderrs, used = d.used_levels;
    rate = d.fitted_rate, ceiling = d.ceiling, margin = d.margin, pass = d.pass;
  } else {
    throw UsageError("kind must be decay, inv-mom-a, inv-mom-b or inv-bound");
  }
  nlohmann::ordered_json j;
  j["kind"] = c.kind;
  j["alpha"] = r.p.alpha;
  j["rho"] = r.p.rho;
  j["T"] = r.p.T;
  j["kappa"] = r.kappa;
  j["N"] = c.N;
  j["seed"] = r.seed;
  auto rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < levels.size(); ++i)
    rows.push_back({{"n", levels[i]}, {"mean", means[i]}, {"stderr", ses[i]}});
  j["levels"] = rows;
  j["used_levels"] = used;
  j["fitted_rate"] = std::isfinite(rate) ? nlohmann::ordered_json(rate) : nlohmann::ordered_json(nullptr);
  j["ceiling"] = ceiling;
  j["margin"] = margin;
  j["status"] = pass ? "pass" : "fail";
  emit(c, j.dump(2) + "\n");
  return pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and verification tools for a stable process and its running supremum"};
  app.set_config("--config", "", "key=value config file; command-line flags override it");
  app.require_subcommand(1);
  RunConfig c;

  auto common = [&c](CLI::App* s) {
    s->add_option("--alpha", c.alpha, "stability index");
    s->add_option("--rho", c.rho, "positivity parameter P(X_1 > 0)");
    s->add_option("--T", c.T, "time horizon");
    s->add_option("--kappa", c.kappa, "geometric remainder parameter (default: smallest admissible + 0.01)");
    s->add_option("--seed", c.seed, "master seed (generated and echoed when absent)");
    s->add_option("--workers", c.workers, "worker threads (0 = hardware concurrency)");
    s->add_option("--out", c.out, "output file (default stdout)");
    s->add_option("--N", c.N, "Monte Carlo samples");
  };
  auto series = [&c](CLI::App* s) {
    s->add_option("--n0", c.n0, "first level of the series");
    s->add_option("--J", c.J, "number of telescoping terms");
    s->add_option("--orders", c.orders, "derivative orders A,B");
    s->add_option("--grid", c.grid, "SYSTEM:SPACING:a0:a1:na:b0:b1:nb, SYSTEM pm|xs, SPACING lin|log");
    s->add_option("--primitive", c.primitive, "test function: step or ramp");
    s->add_option("--alpha-prime", c.alpha_prime, "alpha' for the bound shape (default 0.9 alpha)");
    s->add_option("--C", c.C, "bound constant");
  };

  auto* sample = app.add_subcommand("sample", "draw (X_T, sup X) pairs from the stick-breaking approximation");
  common(sample);
  sample->add_option("--levels", c.levels, "number of sticks");

  auto* dgrid = app.add_subcommand("density-grid", "estimate mixed derivatives of the joint law on a grid");
  common(dgrid);
  series(dgrid);
  dgrid->add_flag("--bounds", c.bounds, "append the bound columns");

  auto* bgrid = app.add_subcommand("bounds-grid", "evaluate the density bounds on a grid");
  common(bgrid);
  series(bgrid);
  bgrid->add_flag("--estimates", c.estimates, "also estimate the derivatives at each point");

  auto* verify = app.add_subcommand("verify", "run a verification suite and print a JSON report");
  verify->add_option("--suite", c.suite, "fast, full, appendix, ibp or rates");
  verify->add_option("--seed", c.seed, "master seed (default 20240601)");
  verify->add_option("--workers", c.workers, "worker threads");
  verify->add_option("--out", c.out, "output file (default stdout)");
  verify->add_flag("--timing", c.timing, "include per-check runtimes (breaks byte reproducibility)");

  auto* rate = app.add_subcommand("rate-check", "fit a geometric decay rate across levels");
  common(rate);
  rate->add_option("--kind", c.kind, "decay, inv-mom-a, inv-mom-b or inv-bound");
  rate->add_option("--orders", c.orders, "weight orders for kind=decay");
  rate->add_option("--alpha-prime", c.alpha_prime, "alpha' for kind=decay (default 0.8 alpha)");
  rate->add_option("--n-lo", c.n_lo, "first level");
  rate->add_option("--n-hi", c.n_hi, "last level");
  rate->add_option("--p", c.ep, "power of X_{+,n}^{-1}");
  rate->add_option("--q", c.eq, "power of X_{-,n} (denominator in part a, numerator in part b)");
  rate->add_option("--r", c.er, "power of the next stick length, or of the increment for inv-bound");
  rate->add_option("--s", c.es, "power of Z_{n+1} (inv-bound)");
  rate->add_option("--u", c.eu, "power of E_j");
  rate->add_option("--v", c.ev, "power of eta_+");
  rate->add_option("--w", c.ew, "power of eta_-");
  rate->add_option("--side", c.side, "plus or minus (kind=inv-bound)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*sample) return cmd_sample(c);
    if (*dgrid) return cmd_density_grid(c);
    if (*bgrid) return cmd_bounds_grid(c);
    if (*verify) return cmd_verify(c);
    if (*rate) return cmd_rate_check(c);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ss::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
