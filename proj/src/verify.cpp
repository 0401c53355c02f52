#include "stablesup/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <json.hpp>
#include <limits>

#include "stablesup/density.hpp"
#include "stablesup/errors.hpp"
#include "stablesup/identities.hpp"
#include "stablesup/oracles.hpp"

namespace stablesup {

namespace {

using Clock = std::chrono::steady_clock;

struct Ctx {
  VerifyOptions opt;
  std::vector<CheckRecord> out;

  void run(const std::string& name, const std::string& ref, const std::function<std::pair<bool, double>()>& fn) {
    const auto t0 = Clock::now();
    CheckRecord r;
    r.name = name;
    r.ref = ref;
    try {
      std::tie(r.pass, r.max_slack_or_z) = fn();
    } catch (const std::exception& e) {
      r.error = e.what();
      r.pass = false;
      r.max_slack_or_z = std::numeric_limits<double>::quiet_NaN();
    }
    if (opt.timing) r.runtime = std::chrono::duration<double>(Clock::now() - t0).count();
    out.push_back(r);
  }
};

std::vector<double> log_grid(double lo_exp, double hi_exp, int n) {
  std::vector<double> xs;
  for (int i = 0; i < n; ++i) xs.push_back(std::pow(10.0, lo_exp + (hi_exp - lo_exp) * i / (n - 1)));
  return xs;
}

std::string fmt(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%g", v);
  return b;
}

// ---------------------------------------------------------------- appendix

void appendix_checks(Ctx& c, bool include_raw_series) {
  const std::vector<std::pair<double, double>> settings = {{1.5, 0.5}, {0.5, 0.5}};
  const std::vector<double> xs = log_grid(-2, 4, 10);
  for (auto [a, r] : settings) {
    const StableParams p = validate_params(a, r, 1.0);
    const std::string tag = "alpha=" + fmt(a) + ",rho=" + fmt(r);
    c.run("constants[" + tag + "]", "auxiliary bound constants", [&] {
      const AppendixConstants k = constants(p);
      const bool ok = k.b_rho >= 1.0 && k.gamma > 0.0 && k.gamma <= 1.0 && k.c >= 1.0 &&
                      (a > 1 ? std::fabs(k.delta - 1.0 / k.zeta) < 1e-12 : k.delta == 1.0);
      return std::make_pair(ok, k.b_rho - 1.0);
    });
    for (double s : {0.0, 0.5, 1.0})
      c.run("exp_moment_bound[" + tag + ",s=" + fmt(s) + "]", "exponential moment bound", [&] {
        const OracleReport rep = check_exp_moment_bound(p, s, xs);
        return std::make_pair(rep.pass, rep.min_slack);
      });
    c.run("G_laplace_bound[" + tag + "]", "Laplace bound for G", [&] {
      const OracleReport rep = check_G_laplace_bound(p, xs);
      return std::make_pair(rep.pass, rep.min_slack);
    });
  }
  for (auto [r, s] : std::vector<std::pair<double, double>>{{0.5, 0.0}, {0.3, 0.5}})
    c.run("cauchy_laplace_bound[rho=" + fmt(r) + ",s=" + fmt(s) + "]", "Cauchy Laplace bound", [&] {
      const OracleReport rep = check_cauchy_laplace_bound(r, s, xs);
      return std::make_pair(rep.pass, rep.min_slack);
    });
  c.run("tail_integral_P[5x5x5]", "tail integral closed form", [&] {
    double worst = 0.0;
    for (double b : {0.1, 0.5, 1.0, 2.0, 7.0})
      for (double p : {-0.5, 0.0, 0.3, 0.7, 0.9})
        for (double q : {1.0, 1.6, 2.0, 3.0, 5.0}) {
          const double P = tail_integral_P(b, p, q);
          worst = std::max(worst, std::fabs(P - tail_integral_quadrature(b, p, q)) / std::fabs(P));
        }
    return std::make_pair(worst <= 1e-8, worst);
  });
  c.run("seq_inequalities[1e4]", "product-vs-sum inequalities", [&] {
    const SeqReport rep = check_seq_inequalities(10000, c.opt.seed);
    return std::make_pair(rep.violations == 0, rep.min_slack);
  });
  const double alpha = 1.5, pp = 0.3, rr = 1.0, rho = 0.5;
  if (include_raw_series)
    c.run("Q_series_identity", "series for Q_p", [&] {
      const double err = std::fabs(q_series(alpha, pp, rr, rho) - aux_Q(alpha, pp, rr, rho));
      return std::make_pair(err <= 1e-10, err);
    });
  c.run("Q_series_plus_inverse_p", "series for Q_p, with 1/p restored", [&] {
    const double err = std::fabs(q_series(alpha, pp, rr, rho) + 1.0 / pp - aux_Q(alpha, pp, rr, rho));
    return std::make_pair(err <= 1e-10, err);
  });
}

// --------------------------------------------------------------------- ibp

TestFunction exp_fn() {
  return {[](double x, double y) { return std::exp(-x - y); }, [](double x, double y) { return -std::exp(-x - y); },
          [](double x, double y) { return -std::exp(-x - y); }};
}

// vanishes on both axes
TestFunction axis_fn() {
  auto g = [](double x) { return std::exp(-x) - std::exp(-2 * x); };
  auto dg = [](double x) { return -std::exp(-x) + 2 * std::exp(-2 * x); };
  return {[=](double x, double y) { return g(x) * g(y); }, [=](double x, double y) { return dg(x) * g(y); },
          [=](double x, double y) { return g(x) * dg(y); }};
}

void ibp_checks(Ctx& c, std::uint64_t N, std::vector<int> levels, bool cauchy_exp) {
  const StableParams ps = validate_params(1.5, 0.5, 1.0);
  const StableParams pc = validate_params(1.0, 0.5, 1.0);
  auto ibp = [&](const std::string& name, const TestFunction& f, const StableParams& p, int n, Side s) {
    c.run(name, "finite-n integration by parts", [&, n, s] {
      const IbpReport r = verify_ibp_identity(f, s, n, n, p, 0.9, N, c.opt.seed + n, c.opt.workers);
      return std::make_pair(std::fabs(r.z) <= 4.0, r.z);
    });
  };
  for (int n : levels)
    for (Side s : {Side::Plus, Side::Minus}) {
      const std::string side = s == Side::Plus ? "+" : "-";
      ibp("ibp_standard[exp,n=" + std::to_string(n) + ",side=" + side + "]", exp_fn(), ps, n, s);
      if (cauchy_exp) ibp("ibp_cauchy[exp,n=" + std::to_string(n) + ",side=" + side + "]", exp_fn(), pc, n, s);
      ibp("ibp_cauchy[axis,n=" + std::to_string(n) + ",side=" + side + "]", axis_fn(), pc, n, s);
    }
}

void operator_checks(Ctx& c, std::uint64_t samples) {
  for (double a : {1.5, 0.7, 1.0}) {
    const StableParams p = validate_params(a, 0.5, 1.0);
    const double k = default_kappa(p);
    const std::string tag = "alpha=" + fmt(a);
    c.run("reg_fd[" + tag + "]", "regenerative D identity", [&] {
      double worst = 0.0;
      for (Side s : {Side::Plus, Side::Minus})
        for (double pw : {-2.0, -0.5, 1.0}) worst = std::max(worst, reg_fd_check(p, k, 3, 5, pw, s, samples / 10, c.opt.seed).max_rel_error);
      return std::make_pair(worst <= 1e-5, worst);
    });
    c.run("level_shift[" + tag + "]", "weights times X^k do not depend on n", [&] {
      double worst = 0.0;
      for (auto [kp, km] : std::vector<std::pair<int, int>>{{1, 1}, {2, 1}, {2, 2}})
        worst = std::max(worst, level_shift_check(kp, km, p, k, 3, 6, samples, c.opt.seed).max_rel_error);
      return std::make_pair(worst <= 1e-10, worst);
    });
    c.run("commute[" + tag + "]", "H+ and H- commute", [&] {
      bool ok = true;
      for (int i = 0; i <= 3; ++i)
        for (int j = 0; j <= 3; ++j) ok = ok && weights_commute(i, j, p.mode());
      return std::make_pair(ok, 0.0);
    });
  }
}

// ------------------------------------------------------------------- rates

void rate_checks(Ctx& c, std::uint64_t N) {
  const StableParams p15 = validate_params(1.5, 0.5, 1.0);
  const StableParams p07 = validate_params(0.7, 0.6, 1.0);
  auto slack = [](double rate, double ceiling, double margin) { return ceiling + margin - rate; };
  c.run("decay[(2,2),kappa=0.9]", "multilevel decay", [&] {
    const DecayReport r = decay_rate_check({2, 2}, p15, 0.9, 3, 12, N, c.opt.seed, 1.2, 1.0, {1.0, 1.0}, c.opt.workers);
    return std::make_pair(r.pass, slack(r.fitted_rate, r.ceiling, r.margin));
  });
  struct Inv {
    const StableParams* p;
    double kappa;
    InvMomentExps e;
    char part;
    std::string tag;
  };
  const std::vector<Inv> inv = {{&p15, 0.9, {0.3, 0.3, 1.0, 0, 0, 0, 1}, 'a', "a,alpha=1.5"},
                                {&p07, 0.6, {0.2, 0.1, 0.5, 0, 0, 0, 1}, 'a', "a,alpha=0.7"},
                                {&p15, 0.9, {0.3, 0.3, 1.0, 0, 0, 0, 1}, 'b', "b,alpha=1.5"}};
  for (const Inv& t : inv)
    c.run("inverse_moment[" + t.tag + "]", "inverse moments", [&] {
      const RateReport r = inverse_moment_rate_check(*t.p, t.kappa, t.e, t.part, 1, 10, N, c.opt.seed, c.opt.workers);
      return std::make_pair(r.pass, slack(r.fitted_rate, r.ceiling, r.margin));
    });
  c.run("inverse_moment_T_scaling[alpha=1.5]", "inverse moments, T scaling", [&] {
    const ScalingReport r = inverse_moment_T_scaling(p15, 0.9, {0.3, 0.3, 1.0, 0, 0, 0, 1}, 3, N, c.opt.seed, 2.0, c.opt.workers);
    return std::make_pair(r.pass, r.z);
  });
  const std::vector<std::tuple<const StableParams*, double, InvBoundExps, std::string>> ib = {
      {&p15, 0.9, {0.3, 0.3, 1.0, 1.0, Side::Plus}, "alpha=1.5"},
      {&p07, 0.6, {0.2, 0.1, 0.5, 0.0, Side::Minus}, "alpha=0.7"}};
  for (const auto& [p, k, e, tag] : ib)
    c.run("increment_moment[" + tag + "]", "increment moments", [&] {
      const RateReport r = inv_bound_rate_check(*p, k, e, 3, 12, N, c.opt.seed, c.opt.workers);
      return std::make_pair(r.pass, slack(r.fitted_rate, r.ceiling, r.margin));
    });
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"fast", "full", "appendix", "ibp", "rates"};
  return names;
}

std::vector<CheckRecord> run_suite(const std::string& suite, const VerifyOptions& opt) {
  Ctx c{opt, {}};
  if (suite == "fast") {
    appendix_checks(c, false);
    operator_checks(c, 1000);
    ibp_checks(c, 100000, {3}, false);
    rate_checks(c, 20000);
  } else if (suite == "appendix") {
    appendix_checks(c, true);
  } else if (suite == "ibp") {
    operator_checks(c, 10000);
    ibp_checks(c, 1000000, {1, 3, 6}, true);
  } else if (suite == "rates") {
    rate_checks(c, 100000);
  } else if (suite == "full") {
    appendix_checks(c, true);
    operator_checks(c, 10000);
    ibp_checks(c, 1000000, {1, 3, 6}, true);
    rate_checks(c, 100000);
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown suite '" + suite + "'");
  }
  return c.out;
}

std::string report_json(const std::string& suite, const VerifyOptions& opt, const std::vector<CheckRecord>& recs) {
  nlohmann::ordered_json j;
  j["suite"] = suite;
  j["seed"] = opt.seed;
  auto& arr = j["checks"] = nlohmann::ordered_json::array();
  int passed = 0;
  for (const CheckRecord& r : recs) {
    nlohmann::ordered_json e;
    e["name"] = r.name;
    e["ref"] = r.ref;
    e["status"] = r.pass ? "pass" : "fail";
    if (std::isfinite(r.max_slack_or_z))
      e["max_slack_or_z"] = r.max_slack_or_z;
    else
      e["max_slack_or_z"] = nullptr;
    if (r.runtime) e["runtime"] = *r.runtime;
    if (!r.error.empty()) e["error"] = r.error;
    arr.push_back(e);
    passed += r.pass ? 1 : 0;
  }
  j["passed"] = passed;
  j["failed"] = static_cast<int>(recs.size()) - passed;
  return j.dump(2) + "\n";
}

}  // namespace stablesup
