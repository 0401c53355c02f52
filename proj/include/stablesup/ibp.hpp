#pragma once

#include <boost/rational.hpp>
#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stablesup/chi.hpp"
#include "stablesup/stable_core.hpp"

namespace stablesup {

using Rational = boost::rational<long long>;

// Laurent polynomial in zeta = 1 - 1/alpha with exact rational coefficients.
// Cauchy-mode expressions only ever use the zeta^0 coefficient.
class Coefficient {
 public:
  Coefficient() = default;
  explicit Coefficient(Rational c) {
    if (c.numerator() != 0) terms_[0] = c;
  }
  static Coefficient zeta_power(int k, Rational c = Rational(1));

  bool is_zero() const noexcept { return terms_.empty(); }
  const std::map<int, Rational>& terms() const noexcept { return terms_; }

  Coefficient& operator+=(const Coefficient& o);
  Coefficient& operator-=(const Coefficient& o);
  friend Coefficient operator+(Coefficient a, const Coefficient& b) { return a += b; }
  friend Coefficient operator-(Coefficient a, const Coefficient& b) { return a -= b; }
  friend Coefficient operator*(const Coefficient& a, const Coefficient& b);
  friend bool operator==(const Coefficient& a, const Coefficient& b) { return a.terms_ == b.terms_; }

  double eval(double zeta) const;
  std::string to_string() const;

 private:
  std::map<int, Rational> terms_;  // power -> nonzero coefficient
};

// Exponent vector of one monomial. xp, xm are the powers of X_+^{-1} and
// X_-^{-1}. plus/minus hold the side generators with trailing zeros trimmed:
// standard mode {Sigma, sigma}; Cauchy mode {Z_1, Z_2, ...}.
struct Monomial {
  int xp = 0;
  int xm = 0;
  std::vector<int> plus;
  std::vector<int> minus;

  void normalize();
  int side_exponent(Side s, std::size_t g) const;
  auto operator<=>(const Monomial&) const = default;
  bool operator==(const Monomial&) const = default;
};

class WeightExpr {
 public:
  explicit WeightExpr(Mode mode = Mode::Standard) : mode_(mode) {}
  static WeightExpr one(Mode mode);
  static WeightExpr generator_sigma_sum(Side s);   // Sigma^s
  static WeightExpr generator_sigma_count(Side s); // sigma^s
  static WeightExpr generator_z(Side s, int k);    // Z^s_k (Cauchy)
  static WeightExpr x_inverse(Side s, Mode mode);  // X_s^{-1}

  Mode mode() const noexcept { return mode_; }
  const std::map<Monomial, Coefficient>& terms() const noexcept { return terms_; }
  bool is_zero() const noexcept { return terms_.empty(); }
  std::size_t size() const noexcept { return terms_.size(); }

  void add_term(Monomial m, const Coefficient& c);
  WeightExpr& operator+=(const WeightExpr& o);
  WeightExpr& operator-=(const WeightExpr& o);
  friend WeightExpr operator+(WeightExpr a, const WeightExpr& b) { return a += b; }
  friend WeightExpr operator-(WeightExpr a, const WeightExpr& b) { return a -= b; }
  friend WeightExpr operator*(const WeightExpr& a, const WeightExpr& b);
  friend WeightExpr operator*(const Coefficient& c, const WeightExpr& a);
  friend bool operator==(const WeightExpr& a, const WeightExpr& b) {
    return a.mode_ == b.mode_ && a.terms_ == b.terms_;
  }

  // Largest generator index present on a side (Cauchy: highest Z_k).
  int max_generator(Side s) const;
  // Expanded text form, one monomial per term in canonical order.
  std::string to_string() const;

 private:
  Mode mode_;
  std::map<Monomial, Coefficient> terms_;
};

WeightExpr apply_D(const WeightExpr& expr, Side side);
WeightExpr apply_H(const WeightExpr& expr, Side side);
// H^{+,k_plus}(H^{-,k_minus}(1)).
WeightExpr iterate_H(int k_plus, int k_minus, Mode mode);

// Polynomial in (x, mu) with integer coefficients; key (x power, mu power).
using Poly2 = std::map<std::pair<int, int>, long long>;

// q^{(k)}_side(y) = num(y, mu) / den(y, mu)^power on y > 0 (y = |x| on the
// supporting half-line; zero elsewhere). den = y^2 -+ 2 mu y + 1.
struct RationalFn {
  Poly2 num;
  Poly2 den;
  int power = 1;

  double eval(double y, double mu) const;
  int num_degree() const;
  int den_degree() const;  // degree of den^power in y
  std::string to_string() const;
};

RationalFn q_rational(int k, Side side);

// Numeric form of q^{(k)} for fixed mu: polynomial coefficients in y.
struct QNumeric {
  std::vector<double> num;
  std::vector<double> den;
  int power = 1;
  double eval(double y) const;
};

class CauchyQTable {
 public:
  CauchyQTable() = default;
  CauchyQTable(double mu, int K);
  int K() const noexcept { return static_cast<int>(plus_.size()); }
  // q^{(k)} on `side` at y > 0, k = 1..K.
  double eval(Side side, int k, double y) const;

 private:
  std::vector<QNumeric> plus_, minus_;
};

// Concrete values of the generators at some (n, m).
struct GeneratorValues {
  double xp_inv = 1.0;
  double xm_inv = 1.0;
  std::vector<double> plus;
  std::vector<double> minus;
};

// Generator values at level m (X factors left at 1). K is the number of
// Cauchy Z generators per side (ignored in standard mode).
GeneratorValues generator_values(const NoiseRecord& noise, int m, int K = 0);

// Evaluation-ready form of an expression with coefficients fixed at zeta.
class CompiledWeight {
 public:
  CompiledWeight() = default;
  CompiledWeight(const WeightExpr& expr, double zeta);
  double eval(const GeneratorValues& g) const;
  // Same, with the X_{+-}^{-1} values supplied separately from g.
  double eval_at(const GeneratorValues& g, double xp_inv, double xm_inv) const;
  // Value with the X factors dropped (all X^{-1} set to 1).
  double eval_polynomial(const GeneratorValues& g) const;
  // Sum of absolute term values: the rounding scale of eval.
  double eval_magnitude(const GeneratorValues& g) const;
  Mode mode() const noexcept { return mode_; }

 private:
  struct Term {
    double c;
    int xp, xm;
    std::vector<int> plus, minus;
  };
  Mode mode_ = Mode::Standard;
  std::vector<Term> terms_;
};

double eval_weight(const WeightExpr& expr, const ChiApprox& chi, const NoiseRecord& noise, int m);

// Cumulative levels of one path: X_{+-,n} and generators at every m <= L.
struct PathLevels {
  int L = 0;
  std::vector<double> xp, xm;
  std::vector<GeneratorValues> gens;

  GeneratorValues at(int n, int m) const;
};

void compute_path_levels(const NoiseRecord& noise, const StableParams& p, double kappa, int L,
                         int K, const CauchyQTable* qtab, PathLevels& out);

struct TestFunction {
  std::function<double(double, double)> f;
  std::function<double(double, double)> df_plus;
  std::function<double(double, double)> df_minus;
};

struct IbpReport {
  double lhs = 0.0, lhs_stderr = 0.0;
  double rhs = 0.0, rhs_stderr = 0.0;
  double diff_stderr = 0.0;  // of the paired difference lhs - rhs
  double z = 0.0;
  std::uint64_t samples = 0;
};

// E[d_side f(chi_n) Phi] against E[f(chi_n) H^side_{n,m}(Phi)] on common
// noise, with Phi = 1 or Phi = phi(chi_n).
IbpReport verify_ibp_identity(const TestFunction& f, Side side, int n, int m, const StableParams& p,
                              double kappa, std::uint64_t N, std::uint64_t seed,
                              unsigned workers = 1, const TestFunction* phi = nullptr);

}  // namespace stablesup
