#include "stablesup/stats.hpp"

#include <cmath>

namespace stablesup {

LineFit ols(std::span<const double> x, std::span<const double> y) {
  LineFit f;
  const std::size_t n = std::min(x.size(), y.size());
  f.points = n;
  if (n < 2) return f;
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double rss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - f.intercept - f.slope * x[i];
      rss += r * r;
    }
    f.slope_stderr = std::sqrt(rss / static_cast<double>(n - 2) / sxx);
  }
  return f;
}

RateFit fit_geometric_rate(std::span<const int> levels, std::span<const double> means,
                           std::span<const double> stderrs, double power, double max_rel_stderr) {
  RateFit out;
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const double m = means[i];
    if (!(m > 0.0) || !(stderrs[i] / m <= max_rel_stderr)) {
      out.dropped_levels.push_back(levels[i]);
      continue;
    }
    out.used_levels.push_back(levels[i]);
    xs.push_back(levels[i]);
    ys.push_back(std::log(m) - power * std::log(static_cast<double>(levels[i])));
  }
  if (xs.size() < 2) return out;
  const LineFit f = ols(xs, ys);
  out.rate = std::exp(f.slope);
  out.rate_stderr = out.rate * f.slope_stderr;
  return out;
}

}  // namespace stablesup
