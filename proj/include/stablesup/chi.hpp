#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stablesup/rng.hpp"
#include "stablesup/stable_core.hpp"

namespace stablesup {

// Primitive randomness of one path. Entries are 1-based and append-only:
// entry i is drawn from the record's stream in a fixed order (U_i, then
// E_i and V_i, or the Cauchy angle), after eta_+ and eta_-.
// A record built from explicit values has no stream and cannot grow.
class NoiseRecord {
 public:
  NoiseRecord() = default;
  NoiseRecord(const StableParams& p, std::uint64_t seed, std::uint64_t stream, int capacity = 0,
              int first_sign = 0);

  // Standard mode: s_or_v holds the angles V_i; Cauchy mode: the draws S_i
  // (E is ignored and may be empty).
  static NoiseRecord from_values(const StableParams& p, double eta_plus, double eta_minus,
                                 std::vector<double> U, std::vector<double> E,
                                 std::vector<double> s_or_v);

  // Reuses storage for a new (seed, stream) pair.
  void reset(std::uint64_t seed, std::uint64_t stream, int first_sign = 0);
  // Makes entries 1..n available; throws CapacityExceeded for value-built records.
  void ensure(int n);

  int size() const noexcept { return static_cast<int>(U_.size()); }
  Mode mode() const noexcept { return params_.mode(); }
  const StableParams& params() const noexcept { return params_; }

  double U(int i) const { return U_.at(i - 1); }
  double E(int i) const { return E_.at(i - 1); }
  double V(int i) const { return V_.at(i - 1); }
  double G(int i) const { return G_.at(i - 1); }
  double S(int i) const { return S_.at(i - 1); }
  double eta(Side s) const noexcept { return s == Side::Plus ? eta_p_ : eta_m_; }

  bool stream_backed() const noexcept { return stream_.has_value(); }
  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_index() const noexcept { return index_; }
  int first_sign() const noexcept { return first_sign_; }

  // Multiplicative perturbation of the coordinates the operator D on `side`
  // acts on, up to entry m: eta_side -> eta_side e^t and E_i -> E_i e^t
  // (standard, G_i on that side) or |S_i| -> |S_i| e^t (Cauchy).
  NoiseRecord perturbed(Side side, int m, double t) const;

  // Provenance only: seed, stream index, size and parameters. No floats from
  // the path itself are written; from_json regenerates the entries.
  std::string to_json() const;
  static NoiseRecord from_json(const std::string& text);

 private:
  void draw_entry();
  void recompute_entry(int i);

  StableParams params_{};
  std::uint64_t seed_ = 0;
  std::uint64_t index_ = 0;
  int first_sign_ = 0;
  std::optional<Stream> stream_;
  double eta_p_ = 0.0, eta_m_ = 0.0;
  std::vector<double> U_, E_, V_, G_, S_;
};

double kappa_min(const StableParams& p);
// Smallest admissible kappa plus 0.01, capped at 0.999.
double default_kappa(const StableParams& p);
// Throws KappaError unless kappa in (0,1) and kappa^alpha >= max(rho, 1-rho).
void check_kappa(double kappa, const StableParams& p);

struct ChiTerm {
  double ell = 0.0;           // l_i
  double S = 0.0;             // S_i
  int side = 0;               // +1, -1, or 0 when S_i == 0
  double contribution = 0.0;  // l_i^{1/alpha} |S_i|
};

struct ChiApprox {
  int n = 0;
  double x_plus = 0.0;
  double x_minus = 0.0;
  std::vector<ChiTerm> terms;
  double a_n = 0.0;
  double delta_plus = 0.0;
  double delta_minus = 0.0;
  double L_n = 0.0;  // unbroken stick remainder
  StableParams params{};
  double kappa = 0.0;
};

ChiApprox build_chi(const NoiseRecord& noise, int n, const StableParams& p, double kappa);
ChiApprox extend(const ChiApprox& chi, const NoiseRecord& noise);

struct JointSample {
  double x_T = 0.0;
  double sup = 0.0;
};

JointSample simulate_joint(const StableParams& p, double kappa, int n, Stream& rng);

}  // namespace stablesup
