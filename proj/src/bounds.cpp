#include "stablesup/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "stablesup/errors.hpp"

namespace stablesup {

namespace {

constexpr double kTieTol = 1e-12;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void require_xy(double x, double y) {
  if (!(y > std::max(x, 0.0))) throw Error(ErrorCode::OutsideSupport, "need y > max(x, 0)");
}

// log f^{ij} at alpha', avoids overflow in the tails
double log_f_ij(int i, int j, double ap, double a, double rho, double T, double x, double y) {
  const double te = (ap / a) * (i * (2 - rho) + j * (1 + rho) - 1);
  const double e1 = ap * (1 - rho) - i * ap * (2 - rho);
  const double e2 = ap * rho - j * ap * (1 + rho);
  return te * std::log(T) + e1 * std::log(y - x) + e2 * std::log(y);
}

}  // namespace

BoundQuery default_bound_query(const StableParams& p) {
  BoundQuery q;
  q.alpha = p.alpha;
  q.rho = p.rho;
  q.T = p.T;
  q.alpha_prime = 0.9 * p.alpha;
  return q;
}

void validate_bound_query(const BoundQuery& q) {
  if (!(q.alpha > 0 && q.alpha < 2)) throw Error(ErrorCode::OutOfRange, "alpha must be in (0,2)");
  if (!(q.rho > 0 && q.rho < 1)) throw Error(ErrorCode::OutOfRange, "rho must be in (0,1)");
  if (!(q.T > 0)) throw Error(ErrorCode::NonPositiveT, "T must be positive");
  if (!(q.alpha_prime >= 0 && q.alpha_prime < q.alpha))
    throw Error(ErrorCode::OutOfRange, "alpha' must be in [0, alpha)");
  if (q.n < 1 || q.m < 1) throw Error(ErrorCode::InvalidArgument, "orders must be >= 1");
  if (!(q.C > 0)) throw Error(ErrorCode::InvalidArgument, "C must be positive");
}

double f_ij(int i, int j, const BoundQuery& q, double x, double y) {
  if ((i != 0 && i != 1) || (j != 0 && j != 1)) throw Error(ErrorCode::InvalidArgument, "i, j must be 0 or 1");
  require_xy(x, y);
  return std::exp(log_f_ij(i, j, q.alpha_prime, q.alpha, q.rho, q.T, x, y));
}

double joint_bound(const BoundQuery& q, double x, double y) {
  require_xy(x, y);
  double fmin = f_ij(0, 0, q, x, y);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) fmin = std::min(fmin, f_ij(i, j, q, x, y));
  const double pre = std::pow(y, -q.m) * std::pow(y - x, 1 - q.n - q.m) * std::pow(2 * y - x, q.m - 1);
  return q.C * pre * fmin;
}

double refl_bound(const BoundQuery& q, double xp, double xm) {
  if (!(xp > 0 && xm > 0)) throw Error(ErrorCode::OutsideSupport, "need x_+, x_- > 0");
  const double r = q.alpha_prime / q.alpha;
  const double mx = std::min(std::pow(q.T, r) * std::pow(xp, -q.alpha_prime),
                             std::pow(q.T, -r * q.rho) * std::pow(xp, q.alpha_prime * q.rho));
  const double my = std::min(std::pow(q.T, r) * std::pow(xm, -q.alpha_prime),
                             std::pow(q.T, -r * (1 - q.rho)) * std::pow(xm, q.alpha_prime * (1 - q.rho)));
  return q.C * std::pow(xp, -q.n) * std::pow(xm, -q.m) * mx * my;
}

std::string to_string(Region r) {
  switch (r) {
    case Region::R00: return "00";
    case Region::R01: return "01";
    case Region::R10: return "10";
    case Region::R11: return "11";
  }
  return "?";
}

Region classify_region(double x, double y, double T, double alpha, double rho) {
  require_xy(x, y);
  int best = 0;
  double best_v = log_f_ij(0, 0, alpha, alpha, rho, T, x, y);
  for (int k = 1; k < 4; ++k) {
    const double v = log_f_ij(k / 2, k % 2, alpha, alpha, rho, T, x, y);
    // compare on the value scale: exp(v) < exp(best) by more than the tie tolerance
    if (v - best_v < std::log1p(-kTieTol)) {
      best = k;
      best_v = v;
    }
  }
  return static_cast<Region>(best);
}

double sup_density_bound(const BoundQuery& q, double y, int n) {
  if (!(y > 0)) throw Error(ErrorCode::OutsideSupport, "need y > 0");
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "need n >= 1");
  const double r = q.alpha_prime / q.alpha;
  return q.C * std::pow(y, -n) *
         std::min(std::pow(q.T, r) * std::pow(y, -q.alpha_prime),
                  std::pow(q.T, -r * q.rho) * std::pow(y, q.alpha_prime * q.rho));
}

double passage_time_bound(const BoundQuery& q, double y0, int n, double T) {
  if (!(y0 > 0)) throw Error(ErrorCode::OutsideSupport, "need y0 > 0");
  if (!(T > 0)) throw Error(ErrorCode::NonPositiveT, "T must be positive");
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "need n >= 1");
  return q.C * std::pow(T, -1.0 / q.alpha - n) *
         std::min(std::pow(T, q.alpha_prime / q.alpha) * std::pow(y0, -q.alpha_prime), 1.0);
}

double joint_tail_bound(const BoundQuery& q, double x0, double y0, double T, std::optional<double> t_exponent) {
  if (!(T > 0)) throw Error(ErrorCode::NonPositiveT, "T must be positive");
  if (!(x0 <= 0.0)) throw Error(ErrorCode::PreconditionViolated, "need x0 <= 0");
  if (!(y0 >= std::pow(T, 1.0 / q.alpha))) throw Error(ErrorCode::PreconditionViolated, "need y0 >= T^{1/alpha}");
  if (!(q.alpha_prime > 0)) throw Error(ErrorCode::PreconditionViolated, "need alpha' > 0");
  const double e = t_exponent.value_or(2.0 * q.alpha_prime / q.alpha);
  const double ap = q.alpha_prime;
  const double tail = x0 < 0 ? std::min(std::pow(y0, -ap), std::pow(-x0, -ap)) : std::pow(y0, -ap);
  return q.C * std::pow(T, e) * std::pow(y0, -ap) * tail;
}

ConstantFit fit_constant(const std::vector<DensityEstimate>& grid, const BoundQuery& q0) {
  if (grid.empty()) throw Error(ErrorCode::EmptyGrid, "empty density grid");
  ConstantFit fit;
  bool first = true;
  for (const DensityEstimate& d : grid) {
    BoundQuery q = q0;
    q.C = 1.0;
    q.n = d.orders.k_plus;
    q.m = d.orders.k_minus;
    const double b = refl_bound(q, d.point.x_plus, d.point.x_minus);
    const double num = std::max(std::fabs(d.value) - 2.0 * d.stderr_, 0.0);
    const double ratio = num / b;
    if (first || ratio > fit.C_fit) {
      fit.C_fit = ratio;
      fit.argmax = d.point;
      fit.estimate_at_max = d.value;
      fit.stderr_at_max = d.stderr_;
      fit.bound_at_max = b;
      first = false;
    }
  }
  return fit;
}

void write_bounds_csv(std::ostream& os, const std::vector<Point>& pts, const BoundQuery& q,
                      const std::vector<DensityEstimate>* est) {
  if (est && est->size() != pts.size()) throw Error(ErrorCode::InvalidArgument, "estimates must match points");
  os << "x_plus,x_minus,x,y,k_plus,k_minus,refl_bound,joint_bound,f00,f01,f10,f11,region";
  if (est) os << ",value,stderr";
  os << '\n';
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const Point& pt = pts[k];
    const double x = pt.x_plus - pt.x_minus, y = pt.x_plus;
    os << fmt17(pt.x_plus) << ',' << fmt17(pt.x_minus) << ',' << fmt17(x) << ',' << fmt17(y) << ',' << q.n
       << ',' << q.m << ',' << fmt17(refl_bound(q, pt.x_plus, pt.x_minus)) << ','
       << fmt17(joint_bound(q, x, y));
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) os << ',' << fmt17(f_ij(i, j, q, x, y));
    os << ',' << to_string(classify_region(x, y, q.T, q.alpha, q.rho));
    if (est) os << ',' << fmt17((*est)[k].value) << ',' << fmt17((*est)[k].stderr_);
    os << '\n';
  }
}

}  // namespace stablesup
