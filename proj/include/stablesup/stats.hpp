#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace stablesup {

// Running mean/variance (Welford). merge() uses the pairwise update of
// Chan et al.; merging in a fixed order gives bit-identical results.
struct Accumulator {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) noexcept {
    ++n;
    const double d = x - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (x - mean);
  }
  void merge(const Accumulator& o) noexcept {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
    const double nt = na + nb;
    const double d = o.mean - mean;
    mean += d * nb / nt;
    m2 += o.m2 + d * d * na * nb / nt;
    n += o.n;
  }
  double variance() const noexcept { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
  double stderr_() const noexcept {
    return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
  }
};

// Vector of accumulators merged elementwise.
struct AccumulatorVec {
  std::vector<Accumulator> acc;
  AccumulatorVec() = default;
  explicit AccumulatorVec(std::size_t k) : acc(k) {}
  void merge(const AccumulatorVec& o) {
    if (acc.empty()) acc.resize(o.acc.size());
    for (std::size_t i = 0; i < o.acc.size(); ++i) acc[i].merge(o.acc[i]);
  }
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  std::size_t points = 0;
};

// Ordinary least squares y = intercept + slope * x.
LineFit ols(std::span<const double> x, std::span<const double> y);

struct RateFit {
  double rate = NAN;       // exp(slope) of log(mean) - log(n^power) vs n
  double rate_stderr = NAN;
  std::vector<int> used_levels;
  std::vector<int> dropped_levels;
};

// Geometric rate of means[i] over levels[i] after dividing by levels^power.
// Levels with relative standard error above max_rel_stderr (or nonpositive
// mean) are discarded before the fit.
RateFit fit_geometric_rate(std::span<const int> levels, std::span<const double> means,
                           std::span<const double> stderrs, double power,
                           double max_rel_stderr = 0.2);

}  // namespace stablesup
