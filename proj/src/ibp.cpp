#include "stablesup/ibp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stablesup/errors.hpp"
#include "stablesup/parallel.hpp"
#include "stablesup/stats.hpp"

namespace stablesup {

namespace {

double ipow(double x, int k) {
  double r = 1.0;
  for (; k > 0; --k) r *= x;
  return r;
}

std::string rat_str(const Rational& r) {
  std::ostringstream os;
  os << r.numerator();
  if (r.denominator() != 1) os << "/" << r.denominator();
  return os.str();
}

std::vector<int>& side_vec(Monomial& m, Side s) { return s == Side::Plus ? m.plus : m.minus; }
int& x_exp(Monomial& m, Side s) { return s == Side::Plus ? m.xp : m.xm; }
const char* side_char(Side s) { return s == Side::Plus ? "+" : "-"; }

void add_vec(std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() < b.size()) a.resize(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
}

}  // namespace

// ---------------------------------------------------------------- Coefficient

Coefficient Coefficient::zeta_power(int k, Rational c) {
  Coefficient out;
  if (c.numerator() != 0) out.terms_[k] = c;
  return out;
}

Coefficient& Coefficient::operator+=(const Coefficient& o) {
  for (const auto& [k, c] : o.terms_) {
    Rational v = terms_[k] + c;
    if (v.numerator() == 0)
      terms_.erase(k);
    else
      terms_[k] = v;
  }
  return *this;
}

Coefficient& Coefficient::operator-=(const Coefficient& o) {
  for (const auto& [k, c] : o.terms_) {
    Rational v = terms_[k] - c;
    if (v.numerator() == 0)
      terms_.erase(k);
    else
      terms_[k] = v;
  }
  return *this;
}

Coefficient operator*(const Coefficient& a, const Coefficient& b) {
  Coefficient out;
  for (const auto& [ka, ca] : a.terms_)
    for (const auto& [kb, cb] : b.terms_) out += Coefficient::zeta_power(ka + kb, ca * cb);
  return out;
}

double Coefficient::eval(double zeta) const {
  double s = 0.0;
  for (const auto& [k, c] : terms_)
    s += boost::rational_cast<double>(c) * std::pow(zeta, k);
  return s;
}

std::string Coefficient::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, c] : terms_) {
    Rational v = c;
    if (!first) {
      os << (v.numerator() < 0 ? " - " : " + ");
      if (v.numerator() < 0) v = -v;
    }
    first = false;
    if (k == 0) {
      os << rat_str(v);
    } else {
      if (v != Rational(1)) os << rat_str(v) << "*";
      os << "z";
      if (k != 1) os << "^" << k;
    }
  }
  return os.str();
}

// ------------------------------------------------------------------- Monomial

void Monomial::normalize() {
  while (!plus.empty() && plus.back() == 0) plus.pop_back();
  while (!minus.empty() && minus.back() == 0) minus.pop_back();
}

int Monomial::side_exponent(Side s, std::size_t g) const {
  const auto& v = s == Side::Plus ? plus : minus;
  return g < v.size() ? v[g] : 0;
}

// ----------------------------------------------------------------- WeightExpr

WeightExpr WeightExpr::one(Mode mode) {
  WeightExpr e(mode);
  e.add_term(Monomial{}, Coefficient(Rational(1)));
  return e;
}

WeightExpr WeightExpr::generator_sigma_sum(Side s) {
  WeightExpr e(Mode::Standard);
  Monomial m;
  side_vec(m, s) = {1};
  e.add_term(m, Coefficient(Rational(1)));
  return e;
}

WeightExpr WeightExpr::generator_sigma_count(Side s) {
  WeightExpr e(Mode::Standard);
  Monomial m;
  side_vec(m, s) = {0, 1};
  e.add_term(m, Coefficient(Rational(1)));
  return e;
}

WeightExpr WeightExpr::generator_z(Side s, int k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "Z index starts at 1");
  WeightExpr e(Mode::Cauchy);
  Monomial m;
  side_vec(m, s).assign(k, 0);
  side_vec(m, s)[k - 1] = 1;
  e.add_term(m, Coefficient(Rational(1)));
  return e;
}

WeightExpr WeightExpr::x_inverse(Side s, Mode mode) {
  WeightExpr e(mode);
  Monomial m;
  x_exp(m, s) = 1;
  e.add_term(m, Coefficient(Rational(1)));
  return e;
}

void WeightExpr::add_term(Monomial m, const Coefficient& c) {
  if (c.is_zero()) return;
  m.normalize();
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(std::move(m), c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) terms_.erase(it);
}

WeightExpr& WeightExpr::operator+=(const WeightExpr& o) {
  if (o.mode_ != mode_) throw Error(ErrorCode::CauchyModeMismatch, "adding expressions of different modes");
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

WeightExpr& WeightExpr::operator-=(const WeightExpr& o) {
  if (o.mode_ != mode_) throw Error(ErrorCode::CauchyModeMismatch, "subtracting expressions of different modes");
  for (const auto& [m, c] : o.terms_) add_term(m, Coefficient() - c);
  return *this;
}

WeightExpr operator*(const WeightExpr& a, const WeightExpr& b) {
  if (a.mode_ != b.mode_) throw Error(ErrorCode::CauchyModeMismatch, "multiplying expressions of different modes");
  WeightExpr out(a.mode_);
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m = ma;
      m.xp += mb.xp;
      m.xm += mb.xm;
      add_vec(m.plus, mb.plus);
      add_vec(m.minus, mb.minus);
      out.add_term(std::move(m), ca * cb);
    }
  return out;
}

WeightExpr operator*(const Coefficient& c, const WeightExpr& a) {
  WeightExpr out(a.mode_);
  for (const auto& [m, ca] : a.terms_) out.add_term(m, c * ca);
  return out;
}

int WeightExpr::max_generator(Side s) const {
  int k = 0;
  for (const auto& [m, c] : terms_) k = std::max<int>(k, static_cast<int>((s == Side::Plus ? m.plus : m.minus).size()));
  return k;
}

std::string WeightExpr::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << "\n+ ";
    first = false;
    os << "(" << c.to_string() << ")";
    for (Side s : {Side::Plus, Side::Minus}) {
      const auto& v = s == Side::Plus ? m.plus : m.minus;
      for (std::size_t g = 0; g < v.size(); ++g) {
        if (v[g] == 0) continue;
        if (mode_ == Mode::Standard)
          os << "*" << (g == 0 ? "Sigma" : "sigma") << side_char(s);
        else
          os << "*Z" << side_char(s) << "_" << (g + 1);
        if (v[g] != 1) os << "^" << v[g];
      }
    }
    if (m.xp) os << "*X+^-" << m.xp;
    if (m.xm) os << "*X-^-" << m.xm;
  }
  return os.str();
}

// ------------------------------------------------------------------ operators

WeightExpr apply_D(const WeightExpr& expr, Side side) {
  WeightExpr out(expr.mode());
  for (const auto& [m, c] : expr.terms()) {
    const int p = side == Side::Plus ? m.xp : m.xm;
    if (expr.mode() == Mode::Standard) {
      // D Sigma = Sigma, D sigma = 0, D X^{-p} = -p zeta X^{-p}: diagonal.
      const int a = m.side_exponent(side, 0);
      out.add_term(m, c * (Coefficient(Rational(a)) - Coefficient::zeta_power(1, Rational(p))));
      continue;
    }
    if (p != 0) out.add_term(m, c * Coefficient(Rational(-p)));
    const auto& v = side == Side::Plus ? m.plus : m.minus;
    for (std::size_t g = 0; g < v.size(); ++g) {
      if (v[g] == 0) continue;
      Monomial n = m;
      auto& w = side_vec(n, side);
      w[g] -= 1;
      if (w.size() < g + 2) w.resize(g + 2, 0);
      w[g + 1] += 1;
      out.add_term(std::move(n), c * Coefficient(Rational(v[g])));
    }
  }
  return out;
}

WeightExpr apply_H(const WeightExpr& expr, Side side) {
  const Mode mode = expr.mode();
  const WeightExpr xinv = WeightExpr::x_inverse(side, mode);
  if (mode == Mode::Standard) {
    WeightExpr a = WeightExpr::generator_sigma_sum(side) - WeightExpr::generator_sigma_count(side);
    WeightExpr z(Mode::Standard);
    z.add_term(Monomial{}, Coefficient::zeta_power(1));
    a += z;
    return Coefficient::zeta_power(-1) * (xinv * (a * expr - apply_D(expr, side)));
  }
  return xinv * (WeightExpr::generator_z(side, 1) * expr - apply_D(expr, side));
}

WeightExpr iterate_H(int k_plus, int k_minus, Mode mode) {
  if (k_plus < 0 || k_minus < 0) throw Error(ErrorCode::InvalidArgument, "orders must be >= 0");
  WeightExpr e = WeightExpr::one(mode);
  for (int i = 0; i < k_minus; ++i) e = apply_H(e, Side::Minus);
  for (int i = 0; i < k_plus; ++i) e = apply_H(e, Side::Plus);
  return e;
}

// ------------------------------------------------------------------ q family

namespace {

void poly_add(Poly2& a, const Poly2& b, long long scale = 1) {
  for (const auto& [k, c] : b) {
    long long v = a[k] + scale * c;
    if (v == 0)
      a.erase(k);
    else
      a[k] = v;
  }
}

Poly2 poly_mul(const Poly2& a, const Poly2& b) {
  Poly2 out;
  for (const auto& [ka, ca] : a)
    for (const auto& [kb, cb] : b) {
      Poly2 t{{{ka.first + kb.first, ka.second + kb.second}, ca * cb}};
      poly_add(out, t);
    }
  return out;
}

Poly2 poly_dy(const Poly2& a) {
  Poly2 out;
  for (const auto& [k, c] : a)
    if (k.first > 0) poly_add(out, Poly2{{{k.first - 1, k.second}, c * k.first}});
  return out;
}

Poly2 poly_times_y(const Poly2& a) {
  Poly2 out;
  for (const auto& [k, c] : a) out[{k.first + 1, k.second}] = c;
  return out;
}

double poly_eval(const Poly2& a, double y, double mu) {
  double s = 0.0;
  for (const auto& [k, c] : a) s += static_cast<double>(c) * std::pow(y, k.first) * std::pow(mu, k.second);
  return s;
}

std::string poly_str(const Poly2& a) {
  if (a.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = a.rbegin(); it != a.rend(); ++it) {
    long long c = it->second;
    if (!first) {
      os << (c < 0 ? " - " : " + ");
      c = c < 0 ? -c : c;
    }
    first = false;
    const bool bare = it->first.first == 0 && it->first.second == 0;
    if (c != 1 || bare) os << c;
    bool star = c != 1;
    if (it->first.second) {
      os << (star ? "*" : "") << "mu";
      if (it->first.second != 1) os << "^" << it->first.second;
      star = true;
    }
    if (it->first.first) {
      os << (star ? "*" : "") << "y";
      if (it->first.first != 1) os << "^" << it->first.first;
    }
  }
  return os.str();
}

}  // namespace

double RationalFn::eval(double y, double mu) const {
  if (!(y > 0.0)) return 0.0;
  return poly_eval(num, y, mu) / std::pow(poly_eval(den, y, mu), power);
}

int RationalFn::num_degree() const {
  int d = 0;
  for (const auto& [k, c] : num) d = std::max(d, k.first);
  return d;
}

int RationalFn::den_degree() const {
  int d = 0;
  for (const auto& [k, c] : den) d = std::max(d, k.first);
  return d * power;
}

std::string RationalFn::to_string() const {
  return "(" + poly_str(num) + ") / (" + poly_str(den) + ")^" + std::to_string(power);
}

RationalFn q_rational(int k, Side side) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "q index starts at 1");
  const long long s = side == Side::Plus ? -1 : 1;
  RationalFn r;
  r.den = Poly2{{{2, 0}, 1}, {{1, 1}, 2 * s}, {{0, 0}, 1}};
  r.num = Poly2{{{2, 0}, 2}, {{1, 1}, 2 * s}};
  r.power = 1;
  const Poly2 dden = poly_dy(r.den);
  for (int j = 1; j < k; ++j) {
    // y d/dy (N / D^j) = y (N' D - j N D') / D^{j+1}
    Poly2 t = poly_mul(poly_dy(r.num), r.den);
    poly_add(t, poly_mul(r.num, dden), -j);
    r.num = poly_times_y(t);
    r.power = j + 1;
  }
  return r;
}

double QNumeric::eval(double y) const {
  if (!(y > 0.0)) return 0.0;
  double n = 0.0, d = 0.0;
  for (std::size_t i = num.size(); i-- > 0;) n = n * y + num[i];
  for (std::size_t i = den.size(); i-- > 0;) d = d * y + den[i];
  return n / ipow(d, power);
}

CauchyQTable::CauchyQTable(double mu, int K) {
  for (Side s : {Side::Plus, Side::Minus}) {
    auto& dst = s == Side::Plus ? plus_ : minus_;
    for (int k = 1; k <= K; ++k) {
      const RationalFn r = q_rational(k, s);
      QNumeric q;
      q.power = r.power;
      q.num.assign(r.num_degree() + 1, 0.0);
      q.den.assign(3, 0.0);
      for (const auto& [e, c] : r.num) q.num[e.first] += static_cast<double>(c) * std::pow(mu, e.second);
      for (const auto& [e, c] : r.den) q.den[e.first] += static_cast<double>(c) * std::pow(mu, e.second);
      dst.push_back(std::move(q));
    }
  }
}

double CauchyQTable::eval(Side side, int k, double y) const {
  return (side == Side::Plus ? plus_ : minus_).at(k - 1).eval(y);
}

// ------------------------------------------------------------------ evaluation

GeneratorValues generator_values(const NoiseRecord& noise, int m, int K) {
  if (m > noise.size()) throw Error(ErrorCode::CapacityExceeded, "noise record shorter than m");
  GeneratorValues g;
  const StableParams& p = noise.params();
  if (!p.cauchy()) {
    double sp = noise.eta(Side::Plus), sm = noise.eta(Side::Minus), cp = 1.0, cm = 1.0;
    for (int i = 1; i <= m; ++i) {
      const double G = noise.G(i);
      if (G > 0) {
        sp += noise.E(i);
        cp += 1.0;
      } else if (G < 0) {
        sm += noise.E(i);
        cm += 1.0;
      }
    }
    g.plus = {sp, cp};
    g.minus = {sm, cm};
    return g;
  }
  const CauchyQTable q(p.mu(), K);
  g.plus.assign(K, 0.0);
  g.minus.assign(K, 0.0);
  for (int k = 1; k <= K; ++k) {
    double zp = q.eval(Side::Plus, k, noise.eta(Side::Plus));
    double zm = q.eval(Side::Minus, k, noise.eta(Side::Minus));
    const double shift = k == 1 ? 1.0 : 0.0;
    for (int i = 1; i <= m; ++i) {
      const double s = noise.S(i);
      if (s > 0) zp += q.eval(Side::Plus, k, s) - shift;
      if (s < 0) zm += q.eval(Side::Minus, k, -s) - shift;
    }
    g.plus[k - 1] = zp;
    g.minus[k - 1] = zm;
  }
  return g;
}

CompiledWeight::CompiledWeight(const WeightExpr& expr, double zeta) : mode_(expr.mode()) {
  for (const auto& [m, c] : expr.terms())
    terms_.push_back(Term{c.eval(zeta), m.xp, m.xm, m.plus, m.minus});
}

namespace {
template <class T>
double term_poly(const T& t, const GeneratorValues& g) {
  double v = t.c;
  for (std::size_t i = 0; i < t.plus.size(); ++i) v *= ipow(g.plus[i], t.plus[i]);
  for (std::size_t i = 0; i < t.minus.size(); ++i) v *= ipow(g.minus[i], t.minus[i]);
  return v;
}
}  // namespace

double CompiledWeight::eval(const GeneratorValues& g) const { return eval_at(g, g.xp_inv, g.xm_inv); }

double CompiledWeight::eval_at(const GeneratorValues& g, double xp_inv, double xm_inv) const {
  double s = 0.0;
  for (const Term& t : terms_) s += term_poly(t, g) * ipow(xp_inv, t.xp) * ipow(xm_inv, t.xm);
  return s;
}

double CompiledWeight::eval_polynomial(const GeneratorValues& g) const {
  double s = 0.0;
  for (const Term& t : terms_) s += term_poly(t, g);
  return s;
}

double CompiledWeight::eval_magnitude(const GeneratorValues& g) const {
  double s = 0.0;
  for (const Term& t : terms_) s += std::fabs(term_poly(t, g) * ipow(g.xp_inv, t.xp) * ipow(g.xm_inv, t.xm));
  return s;
}

double eval_weight(const WeightExpr& expr, const ChiApprox& chi, const NoiseRecord& noise, int m) {
  if (expr.mode() != chi.params.mode() || expr.mode() != noise.mode())
    throw Error(ErrorCode::CauchyModeMismatch, "expression mode does not match parameters");
  if (chi.n < 1) throw Error(ErrorCode::LevelOrder, "weights need n >= 1");
  if (m < chi.n) throw Error(ErrorCode::LevelOrder, "need m >= n");
  const int K = std::max(expr.max_generator(Side::Plus), expr.max_generator(Side::Minus));
  GeneratorValues g = generator_values(noise, m, K);
  g.xp_inv = 1.0 / chi.x_plus;
  g.xm_inv = 1.0 / chi.x_minus;
  return CompiledWeight(expr, chi.params.zeta()).eval(g);
}

GeneratorValues PathLevels::at(int n, int m) const {
  GeneratorValues g = gens.at(m);
  g.xp_inv = 1.0 / xp.at(n);
  g.xm_inv = 1.0 / xm.at(n);
  return g;
}

void compute_path_levels(const NoiseRecord& noise, const StableParams& p, double kappa, int L,
                         int K, const CauchyQTable* qtab, PathLevels& out) {
  if (noise.size() < L) throw Error(ErrorCode::CapacityExceeded, "noise record shorter than L");
  const bool cauchy = p.cauchy();
  if (cauchy && (qtab == nullptr || qtab->K() < K))
    throw Error(ErrorCode::InvalidArgument, "Cauchy levels need a q table with K entries");
  out.L = L;
  out.xp.resize(L + 1);
  out.xm.resize(L + 1);
  out.gens.resize(L + 1);
  const double inv_a = 1.0 / p.alpha;
  const double ez = p.eta_exponent();
  const double ep = std::pow(noise.eta(Side::Plus), ez);
  const double em = std::pow(noise.eta(Side::Minus), ez);
  double a = std::pow(p.T, inv_a);
  double L_stick = p.T, cp = 0.0, cm = 0.0;

  const std::size_t gsize = cauchy ? static_cast<std::size_t>(K) : 2;
  std::vector<double> gp(gsize), gm(gsize);
  if (cauchy) {
    for (int k = 1; k <= K; ++k) {
      gp[k - 1] = qtab->eval(Side::Plus, k, noise.eta(Side::Plus));
      gm[k - 1] = qtab->eval(Side::Minus, k, noise.eta(Side::Minus));
    }
  } else {
    gp = {noise.eta(Side::Plus), 1.0};
    gm = {noise.eta(Side::Minus), 1.0};
  }
  for (int n = 0; n <= L; ++n) {
    if (n >= 1) {
      const double u = noise.U(n);
      const double ell = L_stick * (1.0 - u);
      L_stick *= u;
      a *= kappa;
      const double s = noise.S(n);
      const double c = std::pow(ell, inv_a) * std::fabs(s);
      if (s > 0) {
        cp += c;
        if (cauchy) {
          for (int k = 1; k <= K; ++k) gp[k - 1] += qtab->eval(Side::Plus, k, s) - (k == 1 ? 1.0 : 0.0);
        } else {
          gp[0] += noise.E(n);
          gp[1] += 1.0;
        }
      } else if (s < 0) {
        cm += c;
        if (cauchy) {
          for (int k = 1; k <= K; ++k) gm[k - 1] += qtab->eval(Side::Minus, k, -s) - (k == 1 ? 1.0 : 0.0);
        } else {
          gm[0] += noise.E(n);
          gm[1] += 1.0;
        }
      }
    }
    out.xp[n] = cp + a * ep;
    out.xm[n] = cm + a * em;
    out.gens[n].plus = gp;
    out.gens[n].minus = gm;
  }
}

IbpReport verify_ibp_identity(const TestFunction& f, Side side, int n, int m, const StableParams& p,
                              double kappa, std::uint64_t N, std::uint64_t seed, unsigned workers,
                              const TestFunction* phi) {
  if (n < 1 || m < n) throw Error(ErrorCode::LevelOrder, "need 1 <= n <= m");
  check_kappa(kappa, p);
  const WeightExpr h = apply_H(WeightExpr::one(p.mode()), side);
  const CompiledWeight w(h, p.zeta());
  const int K = p.cauchy() ? 1 : 0;
  const CauchyQTable qtab = p.cauchy() ? CauchyQTable(p.mu(), 1) : CauchyQTable();
  const auto& df = side == Side::Plus ? f.df_plus : f.df_minus;

  auto body = [&](std::uint64_t b, std::uint64_t e, AccumulatorVec& acc) {
    NoiseRecord rec(p, seed, b);
    PathLevels lv;
    for (std::uint64_t i = b; i < e; ++i) {
      rec.reset(seed, i);
      rec.ensure(m);
      compute_path_levels(rec, p, kappa, m, K, &qtab, lv);
      const double x = lv.xp[n], y = lv.xm[n];
      const GeneratorValues& g = lv.gens[m];
      const double wt = w.eval_at(g, 1.0 / x, 1.0 / y);
      double ph = 1.0, dph = 0.0;
      if (phi) {
        ph = phi->f(x, y);
        dph = (side == Side::Plus ? phi->df_plus : phi->df_minus)(x, y);
      }
      const double lhs = df(x, y) * ph;
      const double rhs = f.f(x, y) * (wt * ph - dph);
      acc.acc[0].add(lhs);
      acc.acc[1].add(rhs);
      acc.acc[2].add(lhs - rhs);
    }
  };
  const AccumulatorVec r = chunked_reduce(N, workers, AccumulatorVec(3), body);
  IbpReport rep;
  rep.samples = N;
  rep.lhs = r.acc[0].mean;
  rep.lhs_stderr = r.acc[0].stderr_();
  rep.rhs = r.acc[1].mean;
  rep.rhs_stderr = r.acc[1].stderr_();
  rep.diff_stderr = r.acc[2].stderr_();
  rep.z = rep.diff_stderr > 0 ? r.acc[2].mean / rep.diff_stderr : 0.0;
  return rep;
}

}  // namespace stablesup
