#include "stablesup/stable_core.hpp"

#include <cmath>
#include <string>

#include "stablesup/errors.hpp"

namespace stablesup {

namespace {
constexpr double kRhoTol = 1e-12;
constexpr double kEdge = 1e-12;
}  // namespace

double StableParams::mu() const { return std::sin(omega); }
double StableParams::gam() const { return std::cos(omega); }

StableParams validate_params(double alpha, double rho, double T) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw Error(ErrorCode::OutOfRange, "alpha must lie in (0,2), got " + std::to_string(alpha));
  if (!(T > 0.0) || !std::isfinite(T))
    throw Error(ErrorCode::NonPositiveT, "T must be positive, got " + std::to_string(T));
  const double lo = 1.0 - 1.0 / alpha, hi = 1.0 / alpha;
  if (!(rho > 0.0 && rho < 1.0) || rho < lo - kRhoTol || rho > hi + kRhoTol)
    throw Error(ErrorCode::DegenerateRho,
                "rho=" + std::to_string(rho) + " outside [1-1/alpha,1/alpha] and (0,1)");
  StableParams p;
  p.alpha = alpha;
  p.rho = rho;
  p.omega = kPi * (rho - 0.5);
  p.T = T;
  return p;
}

double cms_g(double x, const StableParams& p) {
  if (p.cauchy()) throw Error(ErrorCode::CauchyMode, "cms_g is undefined for alpha=1");
  if (!(std::fabs(x) < kPi / 2)) throw Error(ErrorCode::DomainError, "|x| must be < pi/2");
  const double lim = kPi / 2 - kEdge;
  if (x > lim) x = lim;
  if (x < -lim) x = -lim;
  const double a = p.alpha;
  const double num = std::sin(a * (x + p.omega));
  const double c1 = std::cos(x);
  const double c2 = std::cos((1.0 - a) * x - a * p.omega);
  return num / (std::pow(c1, 1.0 / a) * std::pow(c2, 1.0 - 1.0 / a));
}

double sample_stable(const StableParams& p, Stream& rng) {
  if (p.cauchy()) {
    // location + scale * tan(theta), theta uniform on (-pi/2, pi/2)
    const double th = rng.uniform(-kPi / 2, kPi / 2);
    return p.mu() + p.gam() * std::tan(th);
  }
  const double e = rng.exponential();
  const double v = rng.uniform(-kPi / 2, kPi / 2);
  return std::pow(e, p.zeta()) * cms_g(v, p);
}

double cauchy_density(double x, double rho) {
  const double w = kPi * (rho - 0.5);
  const double c = std::cos(w), s = std::sin(w);
  return (c / kPi) / (c * c + (x - s) * (x - s));
}

double sample_cauchy_conditioned(const StableParams& p, Side side, Stream& rng) {
  // S = sin(phi)/cos(phi - omega) with phi = theta + omega; S > 0 iff phi > 0.
  // Drawing phi directly keeps the result strictly positive.
  const double u = rng.uniform();
  if (side == Side::Plus) {
    const double phi = (kPi / 2 + p.omega) * u;
    return std::sin(phi) / std::cos(phi - p.omega);
  }
  const double phi = -(kPi / 2 - p.omega) * u;
  return -std::sin(phi) / std::cos(phi - p.omega);
}

double mellin_positive_moment(const StableParams& p, double q) {
  if (!(q > -1.0 && q < p.alpha))
    throw Error(ErrorCode::MomentDoesNotExist, "need q in (-1, alpha)");
  const double r = p.rho;
  return r * std::tgamma(1.0 + q) * std::tgamma(1.0 - q / p.alpha) /
         (std::tgamma(1.0 + q * r) * std::tgamma(1.0 - q * r));
}

double mellin_G_moment(const StableParams& p, double q) {
  if (p.cauchy()) throw Error(ErrorCode::CauchyMode, "G is undefined for alpha=1");
  if (!(q >= 0.0 && q < p.alpha)) throw Error(ErrorCode::MomentDoesNotExist, "need q in [0, alpha)");
  return mellin_positive_moment(p, q) / std::tgamma(q * p.zeta() + 1.0);
}

}  // namespace stablesup
