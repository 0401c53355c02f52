#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "stablesup/bounds.hpp"
#include "stablesup/errors.hpp"

using namespace stablesup;

namespace {
BoundQuery query(double alpha, double rho, double T, double ap, int n = 1, int m = 1) {
  BoundQuery q;
  q.alpha = alpha;
  q.rho = rho;
  q.T = T;
  q.alpha_prime = ap;
  q.n = n;
  q.m = m;
  return q;
}
}  // namespace

TEST(FIj, ZeroAlphaPrimeGivesOne) {
  const BoundQuery q = query(1.5, 0.4, 3.0, 0.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) EXPECT_DOUBLE_EQ(f_ij(i, j, q, -0.7, 2.0), 1.0);
}

TEST(FIj, SymmetricUnitPoint) {
  const BoundQuery q = query(1.5, 0.5, 1.0, 1.5 * (1 - 1e-15));
  EXPECT_NEAR(f_ij(0, 0, q, 0.0, 1.0), 1.0, 1e-14);
}

TEST(FIj, TopRightLabel) {
  for (auto [a, r, T, x, y] : std::vector<std::tuple<double, double, double, double, double>>{
           {1.5, 0.5, 1.0, 0.3, 2.0}, {0.7, 0.6, 2.5, -1.0, 0.4}, {1.2, 0.3, 0.5, 0.9, 1.0}}) {
    const BoundQuery q = query(a, r, T, a * (1 - 1e-15));
    EXPECT_NEAR(f_ij(1, 1, q, x, y), T * T * std::pow(y - x, -a) * std::pow(y, -a), 1e-12 * f_ij(1, 1, q, x, y));
  }
}

TEST(FIj, OutsideSupport) {
  EXPECT_THROW(f_ij(0, 0, query(1.5, 0.5, 1, 1), 1.0, 0.5), Error);
  EXPECT_THROW(f_ij(0, 0, query(1.5, 0.5, 1, 1), -1.0, 0.0), Error);
}

TEST(JointBound, FirstOrderPrefactor) {
  const BoundQuery q = query(1.5, 0.5, 1.0, 1.2);
  const double x = 0.2, y = 1.3;
  double fmin = 1e300;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) fmin = std::min(fmin, f_ij(i, j, q, x, y));
  EXPECT_NEAR(joint_bound(q, x, y), fmin / (y * (y - x)), 1e-14);
}

TEST(JointBound, MinPicksTopRightFarOut) {
  const BoundQuery q = query(1.5, 0.5, 1.0, 1.2);
  const double x = -50, y = 60;
  EXPECT_NEAR(joint_bound(q, x, y), f_ij(1, 1, q, x, y) / (y * (y - x)), 1e-14 * joint_bound(q, x, y));
}

TEST(JointBound, ContinuousAcrossRegionBoundaries) {
  const BoundQuery q = query(1.5, 0.4, 1.0, 1.2, 2, 1);
  double prev = joint_bound(q, -3.0, 0.05);
  for (int k = 1; k <= 20000; ++k) {
    const double t = k / 20000.0;
    const double x = -3.0 + 2.9 * t, y = 0.05 + 4.0 * t;
    const double v = joint_bound(q, x, y);
    EXPECT_LT(std::fabs(std::log(v / prev)), 0.01);
    prev = v;
  }
}

TEST(ReflBound, CrossoverAtNaturalScale) {
  for (double T : {0.5, 1.0, 3.0}) {
    const BoundQuery q = query(1.5, 0.4, T, 1.2);
    const double c = std::pow(T, 1 / 1.5);
    const double r = q.alpha_prime / q.alpha;
    EXPECT_NEAR(std::pow(T, r) * std::pow(c, -q.alpha_prime), std::pow(T, -r * q.rho) * std::pow(c, q.alpha_prime * q.rho),
                1e-12);
  }
}

TEST(ReflBound, Scaling) {
  const double lam = 1.7, a = 1.5;
  const BoundQuery q1 = query(a, 0.4, 1.3, 1.1, 2, 1);
  BoundQuery q2 = q1;
  q2.T = std::pow(lam, a) * q1.T;
  for (auto [x, y] : std::vector<std::pair<double, double>>{{0.3, 0.5}, {2.0, 0.1}, {5.0, 7.0}})
    EXPECT_NEAR(refl_bound(q2, lam * x, lam * y), std::pow(lam, -3) * refl_bound(q1, x, y), 1e-12 * refl_bound(q1, x, y));
}

TEST(ReflBound, ZeroAlphaPrime) {
  BoundQuery q = query(1.5, 0.5, 1.0, 0.0, 2, 3);
  q.C = 2.5;
  EXPECT_NEAR(refl_bound(q, 0.7, 1.9), 2.5 * std::pow(0.7, -2) * std::pow(1.9, -3), 1e-14);
}

TEST(ClassifyRegion, Corners) {
  EXPECT_EQ(classify_region(-100.0, 100.0, 1.0, 1.5, 0.5), Region::R11);
  EXPECT_EQ(classify_region(0.005, 0.01, 1.0, 1.5, 0.5), Region::R00);
  EXPECT_EQ(classify_region(0.999, 1.0, 1.0, 1.5, 0.5), Region::R00);
  EXPECT_EQ(to_string(Region::R10), "10");
}

TEST(SupDensityBound, CrossoverAndDegenerateCase) {
  const BoundQuery q = query(1.5, 0.4, 2.0, 1.2);
  const double c = std::pow(2.0, 1 / 1.5);
  const double r = q.alpha_prime / q.alpha;
  EXPECT_NEAR(std::pow(q.T, r) * std::pow(c, -q.alpha_prime), std::pow(q.T, -r * q.rho) * std::pow(c, q.alpha_prime * q.rho),
              1e-12);
  BoundQuery q0 = q;
  q0.alpha_prime = 0;
  EXPECT_NEAR(sup_density_bound(q0, 3.0, 2), 1.0 / 9.0, 1e-15);
  // tail integral finite: bound decays like y^{-1-alpha'}
  EXPECT_LT(sup_density_bound(q, 1e6, 1) * 1e6, 1e-6);
}

TEST(PassageTimeBound, Examples) {
  BoundQuery q = query(1.5, 0.5, 1.0, 1.2);
  EXPECT_NEAR(passage_time_bound(q, 1.0, 1, 4.0), std::pow(4.0, -1 / 1.5 - 1), 1e-15);
  EXPECT_GT(passage_time_bound(q, 2.0, 3, 0.1), passage_time_bound(q, 2.0, 1, 0.1));
  q.alpha_prime = 0.0;
  q.C = 3.0;
  EXPECT_DOUBLE_EQ(passage_time_bound(q, 1.0, 1, 1.0), 3.0);
}

TEST(JointTailBound, Examples) {
  const BoundQuery q = query(1.5, 0.5, 1.0, 1.2);
  EXPECT_LT(joint_tail_bound(q, -1e9, 2.0, 1.0), joint_tail_bound(q, -1.0, 2.0, 1.0) * 1e-6);
  EXPECT_NEAR(joint_tail_bound(q, -2.0, 2.0, 1.0), std::pow(2.0, -2.4), 1e-14);
  double prev = 1e300;
  for (double y0 : {1.0, 1.5, 3.0, 10.0}) {
    const double v = joint_tail_bound(q, -2.0, y0, 1.0);
    EXPECT_LE(v, prev);
    prev = v;
  }
  EXPECT_THROW(joint_tail_bound(q, 0.5, 2.0, 1.0), Error);
  EXPECT_THROW(joint_tail_bound(q, -1.0, 0.5, 1.0), Error);
}

TEST(FitConstant, ZeroAndSyntheticGrids) {
  const BoundQuery q = query(1.5, 0.5, 1.0, 1.2);
  std::vector<DensityEstimate> zero, synth;
  for (double a : {0.3, 1.0, 2.5})
    for (double b : {0.2, 1.4}) {
      DensityEstimate d;
      d.point = {a, b};
      d.orders = {1, 1};
      zero.push_back(d);
      d.value = refl_bound(q, a, b);
      synth.push_back(d);
    }
  EXPECT_EQ(fit_constant(zero, q).C_fit, 0.0);
  EXPECT_NEAR(fit_constant(synth, q).C_fit, 1.0, 1e-14);
  EXPECT_THROW(fit_constant({}, q), Error);
}

TEST(WriteBoundsCsv, HeaderAndRowCount) {
  const BoundQuery q = query(1.5, 0.5, 1.0, 1.2);
  std::ostringstream os;
  write_bounds_csv(os, {{1.0, 2.0}, {0.5, 0.5}}, q);
  const std::string s = os.str();
  EXPECT_EQ(s.substr(0, s.find('\n')),
            "x_plus,x_minus,x,y,k_plus,k_minus,refl_bound,joint_bound,f00,f01,f10,f11,region");
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 3);
}

TEST(ValidateBoundQuery, RejectsAlphaPrimeAtAlpha) {
  EXPECT_THROW(validate_bound_query(query(1.5, 0.5, 1.0, 1.5)), Error);
  EXPECT_NO_THROW(validate_bound_query(default_bound_query(validate_params(1.5, 0.5, 1.0))));
}
