#include "stablesup/chi.hpp"

#include <algorithm>
#include <cmath>
#include "json.hpp"

#include "stablesup/errors.hpp"

namespace stablesup {

namespace {
constexpr double kAngleEdge = 1e-12;

int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }
}  // namespace

NoiseRecord::NoiseRecord(const StableParams& p, std::uint64_t seed, std::uint64_t stream,
                         int capacity, int first_sign)
    : params_(p) {
  reset(seed, stream, first_sign);
  if (capacity > 0) ensure(capacity);
}

void NoiseRecord::reset(std::uint64_t seed, std::uint64_t stream, int first_sign) {
  seed_ = seed;
  index_ = stream;
  first_sign_ = first_sign;
  stream_.emplace(seed, stream);
  U_.clear();
  E_.clear();
  V_.clear();
  G_.clear();
  S_.clear();
  if (params_.cauchy()) {
    eta_p_ = sample_cauchy_conditioned(params_, Side::Plus, *stream_);
    eta_m_ = sample_cauchy_conditioned(params_, Side::Minus, *stream_);
  } else {
    eta_p_ = stream_->exponential();
    eta_m_ = stream_->exponential();
  }
}

NoiseRecord NoiseRecord::from_values(const StableParams& p, double eta_plus, double eta_minus,
                                     std::vector<double> U, std::vector<double> E,
                                     std::vector<double> s_or_v) {
  NoiseRecord r;
  r.params_ = p;
  r.eta_p_ = eta_plus;
  r.eta_m_ = eta_minus;
  if (s_or_v.size() != U.size() || (!p.cauchy() && E.size() != U.size()))
    throw Error(ErrorCode::InvalidArgument, "noise vectors must have equal length");
  r.U_ = std::move(U);
  if (p.cauchy()) {
    r.S_ = std::move(s_or_v);
    r.E_.assign(r.U_.size(), 1.0);
    r.V_.assign(r.U_.size(), 0.0);
    r.G_ = r.S_;
  } else {
    r.E_ = std::move(E);
    r.V_ = std::move(s_or_v);
    r.G_.resize(r.U_.size());
    r.S_.resize(r.U_.size());
    for (int i = 1; i <= r.size(); ++i) {
      r.G_[i - 1] = cms_g(r.V_[i - 1], p);
      r.recompute_entry(i);
    }
  }
  return r;
}

void NoiseRecord::draw_entry() {
  Stream& rs = *stream_;
  const bool first = U_.empty();
  U_.push_back(rs.uniform());
  if (params_.cauchy()) {
    double s;
    if (first && first_sign_ > 0)
      s = sample_cauchy_conditioned(params_, Side::Plus, rs);
    else if (first && first_sign_ < 0)
      s = -sample_cauchy_conditioned(params_, Side::Minus, rs);
    else
      s = sample_stable(params_, rs);
    E_.push_back(1.0);
    V_.push_back(0.0);
    G_.push_back(s);
    S_.push_back(s);
    return;
  }
  const double e = rs.exponential();
  const double h = kPi / 2;
  double v;
  // G > 0 exactly when V > -omega.
  if (first && first_sign_ > 0)
    v = rs.uniform(-params_.omega, h);
  else if (first && first_sign_ < 0)
    v = rs.uniform(-h, -params_.omega);
  else
    v = rs.uniform(-h, h);
  v = std::clamp(v, -h + kAngleEdge, h - kAngleEdge);
  E_.push_back(e);
  V_.push_back(v);
  G_.push_back(cms_g(v, params_));
  S_.push_back(0.0);
  recompute_entry(size());
}

void NoiseRecord::recompute_entry(int i) {
  if (params_.cauchy()) return;
  S_[i - 1] = std::pow(E_[i - 1], params_.zeta()) * G_[i - 1];
}

void NoiseRecord::ensure(int n) {
  if (n <= size()) return;
  if (!stream_) throw Error(ErrorCode::CapacityExceeded, "value-built noise record cannot grow");
  U_.reserve(n);
  E_.reserve(n);
  V_.reserve(n);
  G_.reserve(n);
  S_.reserve(n);
  while (size() < n) draw_entry();
}

NoiseRecord NoiseRecord::perturbed(Side side, int m, double t) const {
  NoiseRecord r = *this;
  r.stream_.reset();
  const double f = std::exp(t);
  const int want = side == Side::Plus ? 1 : -1;
  if (side == Side::Plus)
    r.eta_p_ *= f;
  else
    r.eta_m_ *= f;
  const int lim = std::min(m, size());
  for (int i = 1; i <= lim; ++i) {
    if (sign_of(G_[i - 1]) != want) continue;
    if (params_.cauchy()) {
      r.S_[i - 1] *= f;
      r.G_[i - 1] = r.S_[i - 1];
    } else {
      r.E_[i - 1] *= f;
      r.recompute_entry(i);
    }
  }
  return r;
}

std::string NoiseRecord::to_json() const {
  if (!stream_backed())
    throw Error(ErrorCode::InvalidArgument, "only stream-backed records have a provenance form");
  nlohmann::ordered_json j;
  j["alpha"] = params_.alpha;
  j["rho"] = params_.rho;
  j["T"] = params_.T;
  j["seed"] = seed_;
  j["stream"] = index_;
  j["size"] = size();
  j["first_sign"] = first_sign_;
  return j.dump();
}

NoiseRecord NoiseRecord::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  const StableParams p =
      validate_params(j.at("alpha").get<double>(), j.at("rho").get<double>(), j.at("T").get<double>());
  return NoiseRecord(p, j.at("seed").get<std::uint64_t>(), j.at("stream").get<std::uint64_t>(),
                     j.at("size").get<int>(), j.value("first_sign", 0));
}

double kappa_min(const StableParams& p) {
  return std::pow(std::max(p.rho, 1.0 - p.rho), 1.0 / p.alpha);
}

double default_kappa(const StableParams& p) { return std::min(kappa_min(p) + 0.01, 0.999); }

void check_kappa(double kappa, const StableParams& p) {
  const double kmin = kappa_min(p);
  if (!(kappa > 0.0 && kappa < 1.0))
    throw KappaError(kmin, "kappa must lie in (0,1)");
  // Equality is admissible; compare kappa^alpha against max(rho,1-rho) with
  // a relative 1e-12 allowance so the boundary value itself passes.
  if (std::pow(kappa, p.alpha) < std::max(p.rho, 1.0 - p.rho) * (1.0 - 1e-12))
    throw KappaError(kmin, "kappa^alpha < max(rho,1-rho); minimal kappa is " + std::to_string(kmin));
}

ChiApprox build_chi(const NoiseRecord& noise, int n, const StableParams& p, double kappa) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "level must be >= 0");
  if (noise.size() < n) throw Error(ErrorCode::CapacityExceeded, "noise record shorter than level");
  ChiApprox c;
  c.n = n;
  c.params = p;
  c.kappa = kappa;
  c.terms.reserve(n);
  const double inv_a = 1.0 / p.alpha;
  const double ez = p.eta_exponent();
  const double T1 = std::pow(p.T, inv_a);
  double L = p.T, sp = 0.0, sm = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double ell = L * (1.0 - noise.U(i));
    L *= noise.U(i);
    ChiTerm t;
    t.ell = ell;
    t.S = noise.S(i);
    t.side = sign_of(t.S);
    t.contribution = std::pow(ell, inv_a) * std::fabs(t.S);
    if (t.side > 0) sp += t.contribution;
    if (t.side < 0) sm += t.contribution;
    c.terms.push_back(t);
  }
  c.L_n = L;
  c.a_n = T1 * std::pow(kappa, n);
  const double ep = std::pow(noise.eta(Side::Plus), ez);
  const double em = std::pow(noise.eta(Side::Minus), ez);
  c.x_plus = sp + c.a_n * ep;
  c.x_minus = sm + c.a_n * em;
  if (n >= 1) {
    const ChiTerm& last = c.terms.back();
    const double da = c.a_n - T1 * std::pow(kappa, n - 1);
    c.delta_plus = (last.side > 0 ? last.contribution : 0.0) + da * ep;
    c.delta_minus = (last.side < 0 ? last.contribution : 0.0) + da * em;
  }
  return c;
}

ChiApprox extend(const ChiApprox& chi, const NoiseRecord& noise) {
  const int n1 = chi.n + 1;
  if (noise.size() < n1) throw Error(ErrorCode::CapacityExceeded, "noise record shorter than level");
  const StableParams& p = chi.params;
  ChiApprox c = chi;
  c.n = n1;
  ChiTerm t;
  t.ell = chi.L_n * (1.0 - noise.U(n1));
  t.S = noise.S(n1);
  t.side = sign_of(t.S);
  t.contribution = std::pow(t.ell, 1.0 / p.alpha) * std::fabs(t.S);
  c.terms.push_back(t);
  c.L_n = chi.L_n * noise.U(n1);
  c.a_n = std::pow(p.T, 1.0 / p.alpha) * std::pow(chi.kappa, n1);
  const double da = c.a_n - chi.a_n;
  const double ez = p.eta_exponent();
  c.delta_plus = (t.side > 0 ? t.contribution : 0.0) + da * std::pow(noise.eta(Side::Plus), ez);
  c.delta_minus = (t.side < 0 ? t.contribution : 0.0) + da * std::pow(noise.eta(Side::Minus), ez);
  c.x_plus = chi.x_plus + c.delta_plus;
  c.x_minus = chi.x_minus + c.delta_minus;
  const double tol = 1.0 - 1e-12;
  if (!(c.x_plus >= chi.kappa * chi.x_plus * tol) || !(c.x_minus >= chi.kappa * chi.x_minus * tol))
    throw Error(ErrorCode::PreconditionViolated, "kappa floor X_{n+1} >= kappa X_n violated");
  return c;
}

JointSample simulate_joint(const StableParams& p, double kappa, int n, Stream& rng) {
  NoiseRecord rec(p, rng.bits(), 0, n);
  const ChiApprox c = build_chi(rec, n, p, kappa);
  return {c.x_plus - c.x_minus, c.x_plus};
}

}  // namespace stablesup
