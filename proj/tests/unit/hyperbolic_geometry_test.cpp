#include <gtest/gtest.h>

#include <cmath>

#include "frozen_values.hpp"
#include "hypsob/error.hpp"
#include "hypsob/hyperbolic_geometry.hpp"
#include "hypsob/special_constants.hpp"
#include "test_support.hpp"

using namespace hypsob;
using testing_support::Gen;
using testing_support::rel_diff;

namespace {

// 2(cosh t - 1) without cancellation
double phi2_closed(double t) {
  const double s = std::sinh(t / 2);
  return 4 * s * s;
}

// (3/8)(e^{2t} - e^{-2t} - 4t) = (3/4)(sinh 2t - 2t), series below x = 2t < 1
double phi3_closed(double t) {
  const double x = 2 * t;
  if (x >= 1.0) return 0.375 * (std::exp(x) - std::exp(-x) - 2 * x);
  double term = x * x * x / 6;
  double sum = 0.0;
  for (int k = 1; k < 30; ++k) {
    sum += term;
    term *= x * x / ((2 * k + 2) * (2 * k + 3));
  }
  return 0.75 * sum;
}

}  // namespace

TEST(VolumeMap, GeneralPathMatchesClosedFormsInTwoAndThreeDimensions) {
  const VolumeMap general2(2, false), general3(3, false);
  EXPECT_EQ(general2.closed_form(), ClosedForm::none);
  double worst = 0.0;
  for (double t : log_grid(1e-3, 25.0, 200)) {
    worst = std::max(worst, rel_diff(general2.phi(t), phi2_closed(t)));
    worst = std::max(worst, rel_diff(general3.phi(t), phi3_closed(t)));
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(VolumeMap, ClosedFormPathUsedByDefault) {
  EXPECT_EQ(VolumeMap(2).closed_form(), ClosedForm::n2);
  EXPECT_EQ(VolumeMap(3).closed_form(), ClosedForm::n3);
  for (double t : {1e-3, 0.7, 9.0}) {
    EXPECT_LT(rel_diff(phi(2, t), phi2_closed(t)), 1e-14);
    EXPECT_LT(rel_diff(phi(3, t), phi3_closed(t)), 1e-13);
  }
}

TEST(VolumeMap, HigherDimensionsMatchHighPrecisionQuadrature) {
  struct Case {
    int n;
    double t, expected;
  };
  const Case cases[] = {
      {4, 0.001, oracle::phi_4_0_001}, {4, 0.5, oracle::phi_4_0_5}, {4, 3, oracle::phi_4_3}, {4, 12, oracle::phi_4_12},
      {5, 0.001, oracle::phi_5_0_001}, {5, 0.5, oracle::phi_5_0_5}, {5, 3, oracle::phi_5_3}, {5, 12, oracle::phi_5_12},
      {6, 0.001, oracle::phi_6_0_001}, {6, 0.5, oracle::phi_6_0_5}, {6, 3, oracle::phi_6_3}, {6, 12, oracle::phi_6_12},
      {7, 0.001, oracle::phi_7_0_001}, {7, 0.5, oracle::phi_7_0_5}, {7, 3, oracle::phi_7_3}, {7, 12, oracle::phi_7_12},
      {8, 0.001, oracle::phi_8_0_001}, {8, 0.5, oracle::phi_8_0_5}, {8, 3, oracle::phi_8_3}, {8, 12, oracle::phi_8_12},
  };
  for (const auto& c : cases) EXPECT_LT(rel_diff(phi(c.n, c.t), c.expected), 1e-13) << c.n << " " << c.t;
}

TEST(VolumeMap, AgreesWithAdaptiveQuadratureOnRandomRadii) {
  Gen gen(21);
  for (int i = 0; i < 60; ++i) {
    const int n = gen.integer(2, 9);
    const double t = gen.log_uniform(1e-2, 20.0);
    QuadratureConfig cfg;
    cfg.rel_tol = 1e-13;
    cfg.abs_tol = 1e-300;
    EXPECT_LT(rel_diff(phi(n, t), phi_quadrature(n, t, cfg)), 1e-11) << n << " " << t;
  }
}

TEST(VolumeMap, InverseRoundTrip) {
  Gen gen(22);
  for (int i = 0; i < 300; ++i) {
    const int n = gen.integer(2, 10);
    const double t = gen.log_uniform(1e-4, 60.0);
    EXPECT_LT(rel_diff(phi_inv(n, phi(n, t)), t), 1e-12) << n << " " << t;
  }
}

TEST(VolumeMap, MonotoneAndDerivative) {
  for (int n : {2, 4, 7}) {
    const auto& map = volume_map(n);
    double prev = 0.0;
    for (double t : log_grid(1e-3, 30.0, 20)) {
      EXPECT_GT(map.phi(t), prev);
      prev = map.phi(t);
      const double h = 1e-6 * t;
      const double numeric = (map.phi(t + h) - map.phi(t - h)) / (2 * h);
      EXPECT_LT(rel_diff(map.phi_derivative(t), numeric), 1e-6);
    }
  }
}

TEST(VolumeMap, LogPhiBeyondOverflow) {
  // Phi(800) overflows double for n = 4; log_phi stays finite
  const auto& map = volume_map(4);
  const double lp = map.log_phi(800.0);
  EXPECT_TRUE(std::isfinite(lp));
  EXPECT_NEAR(lp, std::log(4.0 / 3) - 3 * std::log(2.0) + 3 * 800.0, 1e-9);
}

TEST(BallVolume, EuclideanLimitAtSmallRadius) {
  for (int n : {2, 3, 5, 8}) {
    const double rho = 1e-5;
    EXPECT_NEAR(ball_volume(n, rho) / (unit_ball_volume(n) * std::pow(rho, n)), 1.0, 1e-9);
  }
}

TEST(KernelK, NonNegativeAndSmallNearZero) {
  Gen gen(23);
  for (int i = 0; i < 200; ++i) {
    const int n = gen.integer(2, 8);
    const double p = gen.uniform(1.0, 6.0);
    const double s = gen.log_uniform(1e-8, 1e8);
    EXPECT_GE(kernel_k(n, p, s), 0.0);
  }
  // k(s) = O(s^{p(n-1)/n + 2/n}) at n = 4
  for (double s : {1e-2, 1e-4, 1e-6, 1e-8}) {
    EXPECT_LT(kernel_k(4, 3.0, s) / std::pow(s, 3.0 * 3 / 4), std::sqrt(s)) << s;
  }
}

TEST(LemmaMargin, MatchesHighPrecisionValues) {
  EXPECT_LT(rel_diff(F(4, 8.0 / 3, 1.0), oracle::margin_4_2_667_1), 1e-9);
  EXPECT_LT(rel_diff(F(4, 8.0 / 3, 10.0), oracle::margin_4_2_667_10), 1e-6);
  EXPECT_LT(rel_diff(F(5, 2.5 + 0.2, 3.0), oracle::margin_5_2_7_3), 1e-9);
  EXPECT_LT(rel_diff(F(3, 3.0, 2.0), oracle::margin_3_3_0_2), 1e-9);
  EXPECT_LT(rel_diff(F(6, 12.0 / 5 - 0.1, 5.0), oracle::margin_6_2_3_5), 1e-6);
  EXPECT_LT(rel_diff(F(3, 2.9, 30.0), oracle::margin_3_2_9_30), 1e-3);
  // the n = 3, p = 2.9 margin turns negative only near t = 68
  const auto m = pointwise_margin(3, 2.9, 69.0);
  EXPECT_LT(m.value.sign(), 0);
  EXPECT_LT(rel_diff(m.value.value(), oracle::margin_3_2_9_69), 1e-2);
}

TEST(LemmaMargin, IdenticallyZeroInTheDegenerateCase) {
  for (double t : log_grid(1e-4, 25.0, 40)) {
    const auto m = pointwise_margin(2, 2.0, t);
    const double scale = std::pow(phi(2, t), 2.0) + 1.0;
    EXPECT_LE(std::abs(m.value.value()) / scale, 1e-10) << t;
  }
}

TEST(LemmaMargin, NonNegativeInLemmaRangeProperty) {
  Gen gen(24);
  for (int i = 0; i < 300; ++i) {
    const int n = gen.integer(2, 8);
    const double p = Params::lemma_boundary(n) + gen.uniform(0.0, 2.0);
    const double t = gen.log_uniform(1e-3, 40.0);
    const auto m = pointwise_margin(n, p, t);
    const double scale = std::exp(m.value.log_abs()) * m.cancellation;
    EXPECT_GE(m.value.value(), -1e-9 * std::max(scale, 1.0)) << n << " " << p << " " << t;
  }
}

TEST(LemmaMargin, DerivativeFactorConsistentWithFiniteDifferences) {
  for (auto [n, p, t] : {std::tuple{4, 3.0, 1.5}, {5, 2.6, 0.8}, {3, 3.5, 2.0}}) {
    const double h = 1e-5;
    const double numeric = (F(n, p, t + h) - F(n, p, t - h)) / (2 * h);
    const double analytic = p * (n - 1) * std::pow(std::sinh(t), n - 1) * G(n, p, t);
    EXPECT_LT(rel_diff(numeric, analytic), 1e-6);
  }
}

TEST(AsymptoticMargin, TracksMarginAtLargeRadius) {
  // ScaledValue comparison, F itself overflows nothing here
  EXPECT_LT(rel_diff(asymptotic_F(4, 2.5, 12.0), F(4, 2.5, 12.0)), 1e-4);
  EXPECT_LT(asymptotic_F(4, 2.5, 12.0), 0.0);
  EXPECT_LT(rel_diff(asymptotic_F(5, 2.4, 20.0), F(5, 2.4, 20.0)), 1e-4);
}

TEST(AsymptoticMargin, CrossingPredictsSignChange) {
  const double crossing = asymptotic_crossing(3, 2.9);
  EXPECT_GT(crossing, 60.0);
  EXPECT_LT(crossing, 75.0);
  EXPECT_GT(F(3, 2.9, 40.0), 0.0);
  EXPECT_THROW(asymptotic_crossing(2, 1.5), DomainError);
  EXPECT_TRUE(std::isinf(asymptotic_crossing(4, 3.0)));
}

TEST(LFunction, EuclideanBehaviourNearZero) {
  for (int n : {2, 4, 6}) {
    const double sigma = unit_ball_volume(n);
    const double s = 1e-9 * sigma;
    EXPECT_LT(rel_diff(l_function(n, s), std::pow(s / sigma, (n - 1.0) / n)), std::pow(1e-9, 2.0 / n));
    EXPECT_NEAR(log_l_function(n, 3.0), std::log(l_function(n, 3.0)), 1e-13);
  }
}

TEST(FormatScaled, LargeExponents) {
  ScaledValue v{-1.5, 1000.0 * std::log(10.0)};
  const auto text = format_scaled(v);
  ASSERT_GE(text.size(), 6u);
  EXPECT_EQ(text.substr(text.size() - 6), "e+1000");
  EXPECT_NEAR(std::stod(text.substr(0, text.size() - 6)), -1.5, 1e-12);
  EXPECT_EQ(format_scaled(ScaledValue{0.0, 5.0}), "0");
}
