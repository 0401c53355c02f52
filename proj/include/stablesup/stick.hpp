#pragma once

#include <span>
#include <vector>

#include "stablesup/rng.hpp"

namespace stablesup {

// Stick-breaking on [0,T]: l_i = L_{i-1}(1-U_i), L_i = L_{i-1} U_i, L_0 = T.
struct StickPath {
  double T = 1.0;
  std::vector<double> uniforms;
  std::vector<double> lengths;
  double remainder = 0.0;  // L_n
};

StickPath sample_stick(double T, int n, Stream& rng);

// E[l_k^q] = T^q (1+q)^{-k}.
double stick_moment(double T, double q, int k);

// E[prod_k l_k^{p_k}] = T^{q_0} prod_k B(1+p_k, 1+q_k), q_k = sum_{i>k} p_i.
double joint_stick_moment(double T, std::span<const double> exponents);

struct TripleMoment {
  double exact = 0.0;        // E[l_j^p l_k^q l_n^r], case split on coincident indices
  double bound_shape = 0.0;  // T^{p+q+r} theta^{p+q} (1+r)^{-n}, i.e. the bound with C = 1
  double theta = 1.0;        // (1+r+max(p,q)) / (1+r+p+q)
};

TripleMoment stick_moment_triple(double T, double p, double q, double r, int j, int k, int n);

// Upper bound T^{p+q+r} B(1+p+q,1+r) (1+q)^{-1} (1+p+q)^{2-k} on E[L_{k-1}^p l_k^q l_1^r], k >= 2.
double stick_remainder_bound(double T, double p, double q, double r, int k);

}  // namespace stablesup
