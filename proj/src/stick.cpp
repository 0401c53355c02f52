#include "stablesup/stick.hpp"

#include <algorithm>
#include <cmath>

#include "stablesup/errors.hpp"

namespace stablesup {

StickPath sample_stick(double T, int n, Stream& rng) {
  if (!(T > 0.0)) throw Error(ErrorCode::NonPositiveT, "stick length must be positive");
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "need n >= 1");
  StickPath s;
  s.T = T;
  s.uniforms.reserve(n);
  s.lengths.reserve(n);
  double L = T;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    s.uniforms.push_back(u);
    s.lengths.push_back(L * (1.0 - u));
    L *= u;
  }
  s.remainder = L;
  return s;
}

double stick_moment(double T, double q, int k) {
  if (!(q > -1.0)) throw Error(ErrorCode::MomentDoesNotExist, "need q > -1");
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "need k >= 1");
  return std::pow(T, q) * std::pow(1.0 + q, -k);
}

double joint_stick_moment(double T, std::span<const double> p) {
  const std::size_t n = p.size();
  if (n == 0) return 1.0;
  // tail[k] = sum_{i>k} p_i (0-based)
  std::vector<double> tail(n, 0.0);
  for (std::size_t k = n - 1; k-- > 0;) tail[k] = tail[k + 1] + p[k + 1];
  double q0 = 0.0;
  for (double v : p) q0 += v;
  double out = std::pow(T, q0);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(p[k] > -1.0) || !(tail[k] > -1.0))
      throw Error(ErrorCode::MomentDoesNotExist, "exponent or tail sum <= -1");
    out *= std::beta(1.0 + p[k], 1.0 + tail[k]);
  }
  return out;
}

TripleMoment stick_moment_triple(double T, double p, double q, double r, int j, int k, int n) {
  if (!(1 <= j && j <= k && k <= n)) throw Error(ErrorCode::IndexOrder, "need 1 <= j <= k <= n");
  if (p < 0 || q < 0 || r < 0) throw Error(ErrorCode::InvalidArgument, "need p,q,r >= 0");
  const double s = p + q + r;
  const double qr = 1.0 + q + r;
  double v;
  if (j < k && k < n) {
    // expanding the beta integrals gives (1+q+r)^{j-k+1} on the middle stretch
    v = std::beta(1.0 + p, qr) * std::pow(qr, j - k + 1) * std::beta(1.0 + q, 1.0 + r) *
        std::pow(1.0 + s, 1 - j);
  } else if (j < k && k == n) {
    v = std::pow(1.0 + s, 1 - j) * std::beta(1.0 + p, qr) * std::pow(qr, j - k);
  } else if (j == k && k < n) {
    v = std::pow(1.0 + s, 1 - j) * std::beta(1.0 + p + q, 1.0 + r) * std::pow(qr, j - k);
  } else {
    v = std::pow(1.0 + s, -j) * std::pow(qr, j - k);
  }
  TripleMoment out;
  out.exact = std::pow(T, s) * std::pow(1.0 + r, k - n) * v;
  out.theta = (1.0 + r + std::max(p, q)) / (1.0 + r + p + q);
  out.bound_shape = std::pow(T, s) * std::pow(out.theta, p + q) * std::pow(1.0 + r, -n);
  return out;
}

double stick_remainder_bound(double T, double p, double q, double r, int k) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "need k >= 2");
  return std::pow(T, p + q + r) * std::beta(1.0 + p + q, 1.0 + r) / (1.0 + q) *
         std::pow(1.0 + p + q, 2 - k);
}

}  // namespace stablesup
