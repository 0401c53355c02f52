#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "stablesup/bounds.hpp"
#include "stablesup/chi.hpp"
#include "stablesup/density.hpp"
#include "stablesup/errors.hpp"
#include "stablesup/ibp.hpp"
#include "stablesup/oracles.hpp"
#include "stablesup/parallel.hpp"
#include "stablesup/stable_core.hpp"
#include "stablesup/stick.hpp"
#include "stablesup/verify.hpp"

namespace py = pybind11;
using namespace stablesup;

namespace {

StableParams params(double alpha, double rho, double T) { return validate_params(alpha, rho, T); }

double kappa_or_default(std::optional<double> kappa, const StableParams& p) {
  return kappa ? *kappa : default_kappa(p);
}

Primitive parse_primitive(const std::string& s) {
  if (s == "step") return Primitive::Step;
  if (s == "ramp") return Primitive::Ramp;
  throw Error(ErrorCode::InvalidArgument, "primitive must be 'step' or 'ramp'");
}

py::dict estimate_dict(const DensityEstimate& e) {
  py::dict d;
  d["x_plus"] = e.point.x_plus;
  d["x_minus"] = e.point.x_minus;
  d["orders"] = py::make_tuple(e.orders.k_plus, e.orders.k_minus);
  d["value"] = e.value;
  d["stderr"] = e.stderr_;
  d["N"] = e.samples;
  d["n0"] = e.n0;
  d["J"] = e.J;
  d["kappa"] = e.kappa;
  d["seed"] = e.seed;
  if (e.ci99) d["ci99"] = py::make_tuple(e.ci99->first, e.ci99->second);
  return d;
}

py::dict rate_dict(const std::vector<int>& levels, const std::vector<double>& means, const std::vector<double>& ses,
                   double rate, double ceiling, double margin, const std::vector<int>& used, bool pass) {
  py::dict d;
  d["levels"] = levels;
  d["means"] = means;
  d["stderrs"] = ses;
  d["fitted_rate"] = rate;
  d["ceiling"] = ceiling;
  d["margin"] = margin;
  d["used_levels"] = used;
  d["pass"] = pass;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Supremum of a stable process: samplers, density estimator, bounds and checks";

  py::register_exception<Error>(m, "StableSupError", PyExc_ValueError);

  py::class_<StableParams>(m, "StableParams")
      .def_readonly("alpha", &StableParams::alpha)
      .def_readonly("rho", &StableParams::rho)
      .def_readonly("omega", &StableParams::omega)
      .def_readonly("T", &StableParams::T)
      .def_property_readonly("cauchy", &StableParams::cauchy)
      .def_property_readonly("zeta", &StableParams::zeta)
      .def("__repr__", [](const StableParams& p) {
        return "StableParams(alpha=" + std::to_string(p.alpha) + ", rho=" + std::to_string(p.rho) +
               ", T=" + std::to_string(p.T) + ")";
      });

  m.def("validate_params", &params, py::arg("alpha"), py::arg("rho"), py::arg("T") = 1.0);
  m.def("kappa_min", [](double a, double r) { return kappa_min(params(a, r, 1.0)); }, py::arg("alpha"), py::arg("rho"));
  m.def("default_kappa", [](double a, double r) { return default_kappa(params(a, r, 1.0)); }, py::arg("alpha"),
        py::arg("rho"));

  // ------------------------------------------------------------- stable core
  m.def("cms_g", [](double x, double a, double r) { return cms_g(x, params(a, r, 1.0)); }, py::arg("x"),
        py::arg("alpha"), py::arg("rho"));
  m.def(
      "sample_stable",
      [](double a, double r, std::uint64_t N, std::uint64_t seed) {
        const StableParams p = params(a, r, 1.0);
        py::array_t<double> out(static_cast<py::ssize_t>(N));
        auto v = out.mutable_unchecked<1>();
        for (std::uint64_t i = 0; i < N; ++i) {
          Stream s(seed, i);
          v(static_cast<py::ssize_t>(i)) = sample_stable(p, s);
        }
        return out;
      },
      py::arg("alpha"), py::arg("rho"), py::arg("N"), py::arg("seed"), "N draws of S_1; draw i uses stream (seed, i)");
  m.def("mellin_positive_moment", [](double a, double r, double q) { return mellin_positive_moment(params(a, r, 1.0), q); },
        py::arg("alpha"), py::arg("rho"), py::arg("q"));
  m.def("mellin_G_moment", [](double a, double r, double q) { return mellin_G_moment(params(a, r, 1.0), q); },
        py::arg("alpha"), py::arg("rho"), py::arg("q"));
  m.def("cauchy_density", &cauchy_density, py::arg("x"), py::arg("rho"));

  // ----------------------------------------------------------- stick-breaking
  m.def(
      "sample_stick",
      [](double T, int n, std::uint64_t seed, std::uint64_t stream) {
        Stream s(seed, stream);
        const StickPath p = sample_stick(T, n, s);
        return py::make_tuple(p.lengths, p.remainder);
      },
      py::arg("T"), py::arg("n"), py::arg("seed"), py::arg("stream") = 0, "(lengths, remainder)");
  m.def("stick_moment", &stick_moment, py::arg("T"), py::arg("q"), py::arg("k"));
  m.def(
      "stick_moment_triple",
      [](double T, double p, double q, double r, int j, int k, int n) {
        const TripleMoment t = stick_moment_triple(T, p, q, r, j, k, n);
        return py::make_tuple(t.exact, t.bound_shape, t.theta);
      },
      py::arg("T"), py::arg("p"), py::arg("q"), py::arg("r"), py::arg("j"), py::arg("k"), py::arg("n"),
      "(exact, bound_shape, theta)");

  // ------------------------------------------------------------ chi and joint
  m.def(
      "build_chi",
      [](double a, double r, double T, int n, std::optional<double> kappa, std::uint64_t seed, std::uint64_t stream) {
        const StableParams p = params(a, r, T);
        NoiseRecord nr(p, seed, stream, n);
        const ChiApprox c = build_chi(nr, n, p, kappa_or_default(kappa, p));
        return py::make_tuple(c.x_plus, c.x_minus);
      },
      py::arg("alpha"), py::arg("rho"), py::arg("T"), py::arg("n"), py::arg("kappa") = py::none(), py::arg("seed") = 0,
      py::arg("stream") = 0, "(X_plus_n, X_minus_n) on the path of stream (seed, stream)");
  m.def(
      "simulate_joint",
      [](double a, double r, double T, std::uint64_t N, std::uint64_t seed, int levels, std::optional<double> kappa,
         unsigned workers) {
        const StableParams p = params(a, r, T);
        const double k = kappa_or_default(kappa, p);
        std::vector<double> xs(N), sups(N);
        {
          py::gil_scoped_release nogil;
          struct Nop {
            void merge(const Nop&) {}
          };
          chunked_reduce(N, workers, Nop{}, [&](std::uint64_t b, std::uint64_t e, Nop&) {
            for (std::uint64_t i = b; i < e; ++i) {
              Stream s(seed, i);
              const JointSample js = simulate_joint(p, k, levels, s);
              xs[i] = js.x_T;
              sups[i] = js.sup;
            }
          });
        }
        return py::make_tuple(py::array_t<double>(xs.size(), xs.data()), py::array_t<double>(sups.size(), sups.data()));
      },
      py::arg("alpha"), py::arg("rho"), py::arg("T"), py::arg("N"), py::arg("seed"), py::arg("levels") = 40,
      py::arg("kappa") = py::none(), py::arg("workers") = 1, "(X_T, sup) arrays");

  // ------------------------------------------------------------------ weights
  m.def(
      "weight_expression",
      [](int kp, int km, bool cauchy) { return iterate_H(kp, km, cauchy ? Mode::Cauchy : Mode::Standard).to_string(); },
      py::arg("k_plus"), py::arg("k_minus"), py::arg("cauchy") = false, "canonical text form of H^{+,k+}H^{-,k-}(1)");
  m.def(
      "weight_term_count",
      [](int kp, int km, bool cauchy) { return iterate_H(kp, km, cauchy ? Mode::Cauchy : Mode::Standard).size(); },
      py::arg("k_plus"), py::arg("k_minus"), py::arg("cauchy") = false);

  // ------------------------------------------------------------------ density
  m.def(
      "estimate_density",
      [](double xp, double xm, double a, double r, double T, std::pair<int, int> orders, std::uint64_t N,
         std::uint64_t seed, std::optional<double> kappa, int n0, int J, const std::string& primitive,
         unsigned workers) {
        const StableParams p = params(a, r, T);
        const SeriesConfig cfg{n0, J, parse_primitive(primitive)};
        EstimatorOptions opt;
        opt.workers = workers;
        DensityEstimate e;
        {
          py::gil_scoped_release nogil;
          e = estimate_density({xp, xm}, {orders.first, orders.second}, cfg, N, p, kappa_or_default(kappa, p), seed, opt);
        }
        return estimate_dict(e);
      },
      py::arg("x_plus"), py::arg("x_minus"), py::arg("alpha"), py::arg("rho"), py::arg("T") = 1.0,
      py::arg("orders") = std::make_pair(1, 1), py::arg("N") = 100000, py::arg("seed") = 0,
      py::arg("kappa") = py::none(), py::arg("n0") = 4, py::arg("J") = 12, py::arg("primitive") = "step",
      py::arg("workers") = 1, "d_+^a d_-^b of P(sup > x_+, sup - X_T > x_-) at one point");
  m.def(
      "estimate_density_grid",
      [](const std::vector<std::pair<double, double>>& pts, double a, double r, double T, std::pair<int, int> orders,
         std::uint64_t N, std::uint64_t seed, std::optional<double> kappa, int n0, int J,
         const std::string& primitive, unsigned workers) {
        const StableParams p = params(a, r, T);
        const SeriesConfig cfg{n0, J, parse_primitive(primitive)};
        std::vector<Point> points;
        for (auto [x, y] : pts) points.push_back({x, y});
        EstimatorOptions opt;
        opt.workers = workers;
        std::vector<DensityEstimate> g;
        {
          py::gil_scoped_release nogil;
          g = estimate_density_grid(points, {orders.first, orders.second}, cfg, N, p, kappa_or_default(kappa, p), seed,
                                    opt);
        }
        py::list out;
        for (const auto& e : g) out.append(estimate_dict(e));
        return out;
      },
      py::arg("points"), py::arg("alpha"), py::arg("rho"), py::arg("T") = 1.0, py::arg("orders") = std::make_pair(1, 1),
      py::arg("N") = 100000, py::arg("seed") = 0, py::arg("kappa") = py::none(), py::arg("n0") = 4, py::arg("J") = 12,
      py::arg("primitive") = "step", py::arg("workers") = 1, "common random numbers across all points");
  m.def(
      "estimate_xy",
      [](double x, double y, int n, int mm, double a, double r, double T, std::uint64_t N, std::uint64_t seed,
         std::optional<double> kappa, unsigned workers) {
        const StableParams p = params(a, r, T);
        EstimatorOptions opt;
        opt.workers = workers;
        const Query q = xy_query(n, mm, x, y);
        std::vector<QueryResult> res;
        {
          py::gil_scoped_release nogil;
          res = estimate_queries({q}, SeriesConfig{}, N, p, kappa_or_default(kappa, p), seed, opt);
        }
        return py::make_tuple(res[0].value, res[0].stderr_);
      },
      py::arg("x"), py::arg("y"), py::arg("n"), py::arg("m"), py::arg("alpha"), py::arg("rho"), py::arg("T") = 1.0,
      py::arg("N") = 100000, py::arg("seed") = 0, py::arg("kappa") = py::none(), py::arg("workers") = 1,
      "(value, stderr) of d_x^n d_y^m of the joint CDF of (X_T, sup)");
  m.def(
      "decay_rate_check",
      [](double a, double r, double kappa, std::pair<int, int> orders, int n_lo, int n_hi, std::uint64_t N,
         std::uint64_t seed, double alpha_prime, unsigned workers) {
        const StableParams p = params(a, r, 1.0);
        DecayReport d;
        {
          py::gil_scoped_release nogil;
          d = decay_rate_check({orders.first, orders.second}, p, kappa, n_lo, n_hi, N, seed, alpha_prime, 1.0,
                               {1.0, 1.0}, workers);
        }
        py::dict out = rate_dict(d.levels, d.means, d.stderrs, d.fitted_rate, d.ceiling, d.margin, d.used_levels, d.pass);
        out["p_prime"] = d.p_prime;
        return out;
      },
      py::arg("alpha"), py::arg("rho"), py::arg("kappa"), py::arg("orders") = std::make_pair(2, 2), py::arg("n_lo") = 3,
      py::arg("n_hi") = 12, py::arg("N") = 100000, py::arg("seed") = 0, py::arg("alpha_prime") = 1.2,
      py::arg("workers") = 1);

  // ------------------------------------------------------------------- bounds
  py::class_<BoundQuery>(m, "BoundQuery")
      .def(py::init([](double a, double r, double T, std::optional<double> ap, int n, int mm, double C) {
             BoundQuery q;
             q.alpha = a, q.rho = r, q.T = T, q.alpha_prime = ap ? *ap : 0.9 * a, q.n = n, q.m = mm, q.C = C;
             validate_bound_query(q);
             return q;
           }),
           py::arg("alpha"), py::arg("rho"), py::arg("T") = 1.0, py::arg("alpha_prime") = py::none(), py::arg("n") = 1,
           py::arg("m") = 1, py::arg("C") = 1.0)
      .def_readonly("alpha", &BoundQuery::alpha)
      .def_readonly("rho", &BoundQuery::rho)
      .def_readonly("T", &BoundQuery::T)
      .def_readonly("alpha_prime", &BoundQuery::alpha_prime)
      .def_readonly("n", &BoundQuery::n)
      .def_readonly("m", &BoundQuery::m)
      .def_readonly("C", &BoundQuery::C);
  m.def("f_ij", &f_ij, py::arg("i"), py::arg("j"), py::arg("query"), py::arg("x"), py::arg("y"));
  m.def("joint_bound", &joint_bound, py::arg("query"), py::arg("x"), py::arg("y"));
  m.def("refl_bound", &refl_bound, py::arg("query"), py::arg("x_plus"), py::arg("x_minus"));
  m.def(
      "classify_region",
      [](double x, double y, double T, double a, double r) { return to_string(classify_region(x, y, T, a, r)); },
      py::arg("x"), py::arg("y"), py::arg("T"), py::arg("alpha"), py::arg("rho"));
  m.def("sup_density_bound", &sup_density_bound, py::arg("query"), py::arg("y"), py::arg("n"));
  m.def("passage_time_bound", &passage_time_bound, py::arg("query"), py::arg("y0"), py::arg("n"), py::arg("T"));
  m.def("joint_tail_bound", &joint_tail_bound, py::arg("query"), py::arg("x0"), py::arg("y0"), py::arg("T"),
        py::arg("t_exponent") = py::none());

  // ------------------------------------------------------------------ oracles
  m.def("tail_integral_P", &tail_integral_P, py::arg("b"), py::arg("p"), py::arg("q"));
  m.def("tail_integral_quadrature", &tail_integral_quadrature, py::arg("b"), py::arg("p"), py::arg("q"));
  m.def(
      "aux_Q_R",
      [](double a, double p, double q, double r, double u) {
        const AuxQR x = aux_Q_R(a, p, q, r, u);
        return py::make_tuple(x.Q, x.R);
      },
      py::arg("alpha"), py::arg("p"), py::arg("q"), py::arg("r"), py::arg("u"));
  m.def("q_series", &q_series, py::arg("alpha"), py::arg("p"), py::arg("r"), py::arg("rho"), py::arg("terms") = 200);

  // ------------------------------------------------------------------- verify
  m.def("suite_names", &suite_names);
  m.def(
      "verify",
      [](const std::string& suite, std::uint64_t seed, unsigned workers) {
        VerifyOptions opt;
        opt.seed = seed;
        opt.workers = workers;
        std::vector<CheckRecord> recs;
        {
          py::gil_scoped_release nogil;
          recs = run_suite(suite, opt);
        }
        return report_json(suite, opt, recs);
      },
      py::arg("suite"), py::arg("seed") = 20240601, py::arg("workers") = 1, "JSON report of a verification suite");
}
