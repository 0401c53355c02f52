#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "stablesup/density.hpp"

namespace stablesup {

// Orders (n, m) are the x- and y-derivative orders for joint_bound, and
// (k_plus, k_minus) for refl_bound. C defaults to 1 (bound shape only).
struct BoundQuery {
  double alpha = 1.5;
  double rho = 0.5;
  double T = 1.0;
  double alpha_prime = 0.9 * 1.5;
  int n = 1;
  int m = 1;
  double C = 1.0;
};

// alpha' = 0.9 alpha, orders (1,1), C = 1.
BoundQuery default_bound_query(const StableParams& p);
void validate_bound_query(const BoundQuery& q);

double f_ij(int i, int j, const BoundQuery& q, double x, double y);
double joint_bound(const BoundQuery& q, double x, double y);
double refl_bound(const BoundQuery& q, double x_plus, double x_minus);

enum class Region { R00, R01, R10, R11 };
std::string to_string(Region r);
// Argmin of f^{ij}_alpha; values within a relative 1e-12 count as ties and go
// to the lower index pair (00 < 01 < 10 < 11).
Region classify_region(double x, double y, double T, double alpha, double rho);

double sup_density_bound(const BoundQuery& q, double y, int n);
double passage_time_bound(const BoundQuery& q, double y0, int n, double T);

// C T^{e} y0^{-a'} min{y0^{-a'}, (-x0)^{-a'}} with e = 2 a'/a unless overridden.
double joint_tail_bound(const BoundQuery& q, double x0, double y0, double T,
                        std::optional<double> t_exponent = std::nullopt);

struct ConstantFit {
  double C_fit = 0.0;
  Point argmax;
  double estimate_at_max = 0.0;
  double stderr_at_max = 0.0;
  double bound_at_max = 0.0;
};

// sup over the grid of (|estimate| - 2 stderr)^+ / refl_bound with C = 1, using
// the estimate's orders as (k_plus, k_minus).
ConstantFit fit_constant(const std::vector<DensityEstimate>& grid, const BoundQuery& q);

// One row per point: both coordinate pairs ((x, y) = (x_+ - x_-, x_+)), refl_bound,
// joint_bound, the four f^{ij} at alpha', and the Figure-style region at
// alpha' = alpha. With estimates (same order as pts) value and stderr follow.
void write_bounds_csv(std::ostream& os, const std::vector<Point>& pts, const BoundQuery& q,
                      const std::vector<DensityEstimate>* estimates = nullptr);

}  // namespace stablesup
