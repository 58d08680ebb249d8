#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hypsob/error.hpp"
#include "hypsob/quadrature.hpp"
#include "test_support.hpp"

using namespace hypsob;
using testing_support::rel_diff;

TEST(Integrate, Polynomials) {
  const auto r = integrate([](double x) { return x * x * x - 2 * x; }, -1.0, 2.0);
  EXPECT_NEAR(r.value, 3.75 - 3.0, 1e-13);
  EXPECT_TRUE(r.converged);
}

TEST(Integrate, SemiInfiniteExponentialAndGaussian) {
  EXPECT_NEAR(integrate([](double x) { return std::exp(-x); }, 0.0, kInfinity).value, 1.0, 1e-10);
  EXPECT_NEAR(integrate([](double x) { return std::exp(-x * x); }, 0.0, kInfinity).value,
              std::sqrt(std::numbers::pi) / 2, 1e-10);
}

TEST(Integrate, HardCutoffTailStrategy) {
  QuadratureConfig cfg;
  cfg.tail_strategy = TailStrategy::hard_cutoff;
  cfg.tail_parameter = 60.0;
  EXPECT_NEAR(integrate([](double x) { return std::exp(-x); }, 0.0, kInfinity, cfg).value, 1.0, 1e-10);
}

TEST(Integrate, EndpointSingularity) {
  QuadratureConfig cfg;
  cfg.rel_tol = 1e-6;
  EXPECT_NEAR(integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, cfg).value, 2.0, 1e-5);
}

TEST(Integrate, ErrorEstimateIsHonestOnOscillatoryIntegrand) {
  const auto r = integrate_adaptive([](double x) { return std::cos(40 * x); }, 0.0, 3.0);
  const double exact = std::sin(120.0) / 40.0;
  EXPECT_LE(std::abs(r.value - exact), std::max(r.error, 1e-14));
}

TEST(Integrate, ThrowsWhenBudgetIsExhausted) {
  QuadratureConfig cfg;
  cfg.max_intervals = 3;
  cfg.rel_tol = 1e-14;
  cfg.abs_tol = 1e-300;
  EXPECT_THROW(integrate([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0.0, 1.0, cfg), ConvergenceError);
  const auto r = integrate_adaptive([](double x) { return std::sin(1.0 / (x + 1e-3)); }, 0.0, 1.0, cfg);
  EXPECT_FALSE(r.converged);
}

TEST(QuadratureConfig, Validation) {
  QuadratureConfig cfg;
  cfg.abs_tol = 0.0;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg.abs_tol = 1e-12;
  cfg.rel_tol = -1;
  EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(GaussKronrod, ExactForDegree22Polynomial) {
  const auto r = gauss_kronrod15([](double x) { return std::pow(x, 22); }, 0.0, 1.0);
  EXPECT_NEAR(r.value, 1.0 / 23.0, 1e-15);
}

TEST(FindRoot, WithAndWithoutDerivative) {
  auto f = [](double x) { return x * x * x + x; };
  EXPECT_NEAR(find_root_increasing(f, 10.0, 0.0, 5.0), 2.0, 1e-14);
  RootOptions opts;
  opts.derivative = [](double x) { return 3 * x * x + 1; };
  EXPECT_NEAR(find_root_increasing(f, 10.0, 0.0, 5.0, opts), 2.0, 1e-14);
}

TEST(FindRoot, RejectsTargetOutsideBracket) {
  EXPECT_THROW(find_root_increasing([](double x) { return x; }, 10.0, 0.0, 1.0), BracketError);
}

TEST(DifferentiateGrid, ExactForQuadraticsOnNonUniformGrid) {
  std::vector<double> x{0.0, 0.1, 0.35, 0.4, 1.0, 2.5};
  std::vector<double> y;
  for (double t : x) y.push_back(3 * t * t - t + 2);
  const auto d = differentiate_grid(x, y);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(d.slopes[i], 6 * x[i] - 1, 1e-12);
}

TEST(DifferentiateGrid, ClampsToSignConstraint) {
  std::vector<double> x{0.0, 1.0, 2.0, 3.0};
  std::vector<double> y{3.0, 2.0, 2.0, 0.0};
  const auto d = differentiate_grid(x, y, SignConstraint::non_positive);
  for (double s : d.slopes) EXPECT_LE(s, 0.0);
}

TEST(LogGrid, CoversEndpointsWithRequestedDensity) {
  const auto g = log_grid(1e-3, 1e3, 10);
  EXPECT_DOUBLE_EQ(g.front(), 1e-3);
  EXPECT_LT(rel_diff(g.back(), 1e3), 1e-14);
  EXPECT_EQ(g.size(), 61u);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(g[i], g[i - 1]);
}
