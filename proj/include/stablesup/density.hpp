#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "stablesup/chi.hpp"
#include "stablesup/ibp.hpp"
#include "stablesup/stable_core.hpp"

namespace stablesup {

struct Point {
  double x_plus = 1.0;
  double x_minus = 1.0;
};

// Orders (a,b) of the mixed derivative d_+^a d_-^b G, where
// G(x_+, x_-) = P(X_+ > x_+, X_- > x_-). The joint density is (1,1).
struct Orders {
  int k_plus = 1;
  int k_minus = 1;
  auto operator<=>(const Orders&) const = default;
};

// Test function fed to the series. Ramp: F(x,y) = [x-x_+]^+[y-x_-]^+ with IBP
// weight orders (a+1, b+1). Step: 1{x > x_+, y > x_-} (the mixed derivative of
// the ramp) with weight orders (a, b).
enum class Primitive { Ramp, Step };

struct SeriesConfig {
  int n0 = 4;
  int J = 12;
  Primitive primitive = Primitive::Step;
};

struct DensityEstimate {
  Point point;
  Orders orders;
  double value = 0.0;
  double stderr_ = 0.0;
  std::uint64_t samples = 0;
  int n0 = 0;
  int J = 0;
  StableParams params{};
  double kappa = 0.0;
  std::uint64_t seed = 0;
  std::optional<std::pair<double, double>> ci99;  // bootstrap interval
};

struct SeriesTerm {
  int level = 0;
  double theta_next = 0.0;  // Theta_{i+1,i+1}
  double theta_prev = 0.0;  // Theta_{i,i+1}
  double tilde = 0.0;
};

// F(x,y) = [x - x_+]^+ [y - x_-]^+.
struct Ramp {
  double a = 0.0, b = 0.0;
  double operator()(double x, double y) const noexcept {
    return (x > a ? x - a : 0.0) * (y > b ? y - b : 0.0);
  }
};
Ramp primitive_hat_F(Point pt);

struct EstimatorOptions {
  unsigned workers = 1;
  // Split samples by the sign of S_1 in proportions (rho, 1-rho).
  bool stratify_first_sign = false;
  // 99% percentile bootstrap (500 resamples) for single-point estimates with N >= 1e4.
  bool bootstrap = true;
};

// Precomputed weights for a set of derivative orders; evaluates the
// truncated telescoping series on one noise record.
class SeriesSampler {
 public:
  SeriesSampler(const StableParams& p, double kappa, SeriesConfig cfg, std::vector<Orders> orders);

  // Loads one path: levels up to n0+J and all weight values.
  void load(NoiseRecord& noise);
  // Series value for orders[idx] at pt on the loaded path. Orders (0,0) give
  // the survival function G itself.
  double value(std::size_t idx, Point pt, std::vector<SeriesTerm>* terms = nullptr) const;

  const std::vector<Orders>& orders() const noexcept { return orders_; }
  const SeriesConfig& config() const noexcept { return cfg_; }
  int max_level() const noexcept { return cfg_.n0 + cfg_.J; }

 private:
  StableParams p_;
  double kappa_;
  SeriesConfig cfg_;
  std::vector<Orders> orders_;
  std::vector<CompiledWeight> weights_;
  int K_ = 0;
  CauchyQTable qtab_;
  PathLevels lv_;
  // per order: same[n - n0] = W(n,n), cross[i - n0] = W(i,i+1)
  std::vector<std::vector<double>> same_, cross_;
};

// One realization of the truncated series on a fresh noise record drawn from rng.
double sample_series(Point pt, Orders orders, int n0, int J, const StableParams& p, double kappa,
                     Stream& rng, std::vector<SeriesTerm>* terms = nullptr);

DensityEstimate estimate_density(Point pt, Orders orders, SeriesConfig cfg, std::uint64_t N,
                                 const StableParams& p, double kappa, std::uint64_t seed,
                                 const EstimatorOptions& opt = {});

// All points share the same noise records (common random numbers).
std::vector<DensityEstimate> estimate_density_grid(const std::vector<Point>& pts, Orders orders,
                                                   SeriesConfig cfg, std::uint64_t N,
                                                   const StableParams& p, double kappa,
                                                   std::uint64_t seed, const EstimatorOptions& opt = {});

// Linear combination of d_+^a d_-^b G values at one point.
struct QueryTerm {
  Orders orders;
  Point point;
  double coef = 1.0;
};
using Query = std::vector<QueryTerm>;

struct QueryResult {
  double value = 0.0;
  double stderr_ = 0.0;
};

// Per-sample combination of series values, so stderr accounts for the coupling.
std::vector<QueryResult> estimate_queries(const std::vector<Query>& queries, SeriesConfig cfg,
                                          std::uint64_t N, const StableParams& p, double kappa,
                                          std::uint64_t seed, const EstimatorOptions& opt = {});

// d_x^n d_y^m F(x,y), F the joint CDF of (X_T, sup X), as a combination of
// d_+^a d_-^b G at (y, y - x).
Query xy_query(int n, int m, double x, double y);
double to_xy_derivatives(const std::map<Orders, double>& g_at_point, int n, int m, double x, double y);

struct SurvivalEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
};
// Plain Monte Carlo of P(X_{+,n} > x_+, X_{-,n} > x_-).
SurvivalEstimate estimate_survival(Point pt, std::uint64_t N, const StableParams& p, double kappa,
                                   int n_truncation, std::uint64_t seed, unsigned workers = 1);

struct DecayReport {
  std::vector<int> levels;
  std::vector<double> means;    // E|tilde Theta_n|
  std::vector<double> stderrs;
  double p_prime = 0.0;
  double s = 0.0;
  double fitted_rate = 0.0;
  double ceiling = 0.0;
  double margin = 0.05;
  std::vector<int> used_levels;
  bool pass = false;
};

// Geometric decay of E|tilde Theta_n| for IBP weight orders `weight_orders`
// (both >= 2 in the decay statement), ramp test function at pt, moment power p.
DecayReport decay_rate_check(Orders weight_orders, const StableParams& p, double kappa, int n_lo,
                             int n_hi, std::uint64_t N, std::uint64_t seed, double alpha_prime,
                             double p_moment = 1.0, Point pt = {1.0, 1.0}, unsigned workers = 1);

double decay_ceiling(const StableParams& p, double kappa, double s);

// CSV with the fixed header of the density grid contract (17 significant digits).
void write_density_csv(std::ostream& os, const std::vector<DensityEstimate>& rows);

}  // namespace stablesup
