#include <gtest/gtest.h>

#include <cmath>

#include "hypsob/corpus.hpp"
#include "hypsob/error.hpp"
#include "hypsob/hyperbolic_geometry.hpp"
#include "hypsob/rearrangement.hpp"
#include "hypsob/sharpness_optimizer.hpp"
#include "hypsob/special_constants.hpp"
#include "test_support.hpp"

using namespace hypsob;
using testing_support::Gen;
using testing_support::rel_diff;

namespace {

// a rho^k e^{-c rho}: increasing on [0, k/c], decreasing after. In volume
// units the decreasing part is a power law s^{-c/(n-1)}.
RadialFunction ring(int n, double a, double k, double c) {
  const double peak = k / c;
  auto f = [=](double r) { return a * std::pow(r, k) * std::exp(-c * r); };
  auto df = [=](double r) { return a * std::exp(-c * r) * (k * std::pow(r, k - 1) - c * std::pow(r, k)); };
  return RadialFunction(n, {{0.0, peak, f, df}, {peak, std::numeric_limits<double>::infinity(), f, df}});
}

// plateau then decay, with a flat piece
RadialFunction plateau(int n) {
  return RadialFunction(
      n, {{0.0, 0.5, [](double) { return 1.0; }, [](double) { return 0.0; }},
          {0.5, 3.0, [](double r) { return 1.0 - (r - 0.5) / 2.5; }, [](double) { return -1.0 / 2.5; }}});
}

}  // namespace

TEST(Distribution, SymmetricExponential) {
  for (int n : {2, 3, 5}) {
    const auto f = RadialFunction::symmetric(n, [](double r) { return std::exp(-r); },
                                             [](double r) { return -std::exp(-r); });
    for (double t : {0.9, 0.5, 0.1, 1e-3}) {
      EXPECT_LT(rel_diff(distribution_function(f, t), ball_volume(n, -std::log(t))), 1e-10);
    }
    EXPECT_EQ(distribution_function(f, 1.0), 0.0);
    EXPECT_TRUE(std::isinf(f.support_volume()));
  }
}

TEST(Distribution, IndicatorAndRing) {
  const auto ind = RadialFunction::indicator(3, 2.0, 5.0);
  EXPECT_LT(rel_diff(ind.distribution(1.0), ball_volume(3, 2.0)), 1e-14);
  EXPECT_EQ(ind.distribution(5.0), 0.0);
  EXPECT_LT(rel_diff(ind.distribution(5.0, true), ball_volume(3, 2.0)), 1e-14);
  // {u > t} for a ring is an annulus
  const auto r = ring(3, 1.0, 2.0, 4.0);
  const double t = 0.01;
  const double lo = find_root_increasing([](double x) { return x * x * std::exp(-4 * x); }, t, 0.0, 0.5);
  const double hi = find_root_increasing([](double x) { return -x * x * std::exp(-4 * x); }, -t, 0.5, 10.0);
  EXPECT_LT(rel_diff(r.distribution(t), ball_volume(3, hi) - ball_volume(3, lo)), 1e-9);
}

TEST(Rearrangement, SymmetricFunctionIsItsOwnRearrangement) {
  for (int n : {2, 4}) {
    const auto f = RadialFunction::symmetric(n, [](double r) { return 1.0 / (1.0 + r * r); },
                                             [](double r) { return -2 * r / ((1 + r * r) * (1 + r * r)); });
    const auto v = decreasing_rearrangement(f);
    const double sigma = unit_ball_volume(n);
    for (double s : {1e-3, 0.1, 1.0, 10.0, 1e3}) {
      const double expected = f.value(phi_inv(n, s / sigma));
      EXPECT_LT(rel_diff(v.value(s), expected), 1e-8) << n << " " << s;
    }
  }
}

TEST(Rearrangement, IsNonIncreasingAndEquimeasurableProperty) {
  Gen gen(41);
  for (int k = 0; k < 8; ++k) {
    const int n = gen.integer(2, 6);
    const auto f = ring(n, gen.uniform(0.5, 3.0), gen.uniform(1.0, 3.0), gen.uniform(1.5, 3.0) * (n - 1));
    const auto v = decreasing_rearrangement(f, GridSpec{1e-6, 1e12, 100});
    double prev = v.value(0.0);
    EXPECT_LT(rel_diff(prev, f.sup()), 1e-9);
    for (double s : log_grid(1e-4, 1e3, 10)) {
      EXPECT_LE(v.value(s), prev + 1e-14);
      prev = v.value(s);
    }
    const double p = gen.uniform(1.5, n - 0.2 > 1.6 ? n - 0.2 : 1.6);
    std::vector<double> qs{1.0, p};
    if (p < n) qs.push_back(n * p / (n - p));
    for (double q : qs) {
      QuadratureConfig cfg = profile_quadrature(1e-11);
      const double star = lp_integral(v, q).value;
      const double direct = f.lq_integral(q, cfg).value;
      const double cake = f.lq_integral_layer_cake(q, cfg).value;
      // cubic interpolation error at 100 nodes per decade
      EXPECT_LT(rel_diff(star, direct), 2e-7) << "n=" << n << " q=" << q;
      EXPECT_LT(rel_diff(cake, direct), 1e-7) << "n=" << n << " q=" << q;
    }
  }
}

TEST(Rearrangement, FlatPieceBecomesFlatPiece) {
  const auto f = plateau(3);
  const auto v = decreasing_rearrangement(f);
  const double vol = ball_volume(3, 0.5);
  EXPECT_NEAR(v.value(0.5 * vol), 1.0, 1e-12);
  EXPECT_LT(rel_diff(v.support_end(), ball_volume(3, 3.0)), 1e-9);
  for (double q : {1.0, 2.0}) EXPECT_LT(rel_diff(lp_integral(v, q).value, f.lq_integral(q, profile_quadrature()).value), 1e-7);
}

TEST(Rearrangement, RangeGapBecomesJump) {
  // 2 on [0, 1), then 1 - (r-1)/2 on [1, 3): the values in (1, 2) are skipped
  RadialFunction f(2, {{0.0, 1.0, [](double) { return 2.0; }, [](double) { return 0.0; }},
                       {1.0, 3.0, [](double r) { return 1.0 - (r - 1.0) / 2.0; }, [](double) { return -0.5; }}});
  const auto v = decreasing_rearrangement(f);
  EXPECT_TRUE(v.has_jumps());
  EXPECT_TRUE(std::isinf(grad_norm_hyperbolic(v, 2, 2.0).value));
}

TEST(PolyaSzego, SymmetrizationDoesNotIncreaseGradient) {
  for (int n : {2, 3, 5}) {
    const auto f = ring(n, 1.0, 2.0, 2.0 * (n - 1));
    const auto v = decreasing_rearrangement(f);
    for (double p : {1.5, 2.0, 3.0}) {
      const double sym = grad_norm_hyperbolic(v, n, p).value;
      const double direct = f.gradient_integral(p, profile_quadrature()).value;
      EXPECT_LE(sym, direct * (1 + 1e-8)) << n << " " << p;
    }
  }
}

TEST(GradientNorms, DecompositionIdentityOnCorpus) {
  for (const auto& v : standard_corpus()) {
    for (auto [n, p] : {std::pair{4, 8.0 / 3}, {2, 4.0}, {5, 2.5}}) {
      const auto hyp = grad_norm_hyperbolic(v, n, p);
      const auto euc = grad_norm_euclidean(v, n, p);
      const auto corr = grad_norm_correction(v, n, p);
      EXPECT_LE(std::abs(hyp.value - euc.value - corr.value), 1e-9 * hyp.value + 10 * (hyp.error + euc.error + corr.error))
          << v.name() << " n=" << n;
      EXPECT_GE(corr.value, 0.0);
    }
  }
}

TEST(GradientNorms, SmallSupportIsEuclidean) {
  for (int n : {2, 4, 6}) {
    // the curvature correction is O(rho^2) = O(width^{2/n})
    const double width = 1e-9 * unit_ball_volume(n);
    const auto v = tent_profile(width);
    const double hyp = grad_norm_hyperbolic(v, n, 3.0).value;
    const double euc = grad_norm_euclidean(v, n, 3.0).value;
    EXPECT_LT(rel_diff(hyp, euc), std::pow(1e-9, 2.0 / n)) << n;
  }
}

TEST(GradientNorms, EuclideanFormulaOnTent) {
  // v = 1 - s on [0,1]: (n sigma)^p int_0^1 (s/sigma)^{p(n-1)/n} ds
  const int n = 3;
  const double p = 2.0, sigma = unit_ball_volume(n);
  const double a = p * (n - 1.0) / n;
  const double expected = std::pow(n * sigma, p) * std::pow(sigma, -a) / (a + 1);
  EXPECT_LT(rel_diff(grad_norm_euclidean(tent_profile(1.0), n, p).value, expected), 1e-10);
}

TEST(GradientNorms, DivergentTailsAreRejected) {
  // power tail gamma: L^q needs q gamma > 1, hyperbolic gradient needs p gamma > 1
  const auto slow = RadialProfile::from_samples({0.0, 1.0}, {1.0, 1.0}, {TailKind::power, 0.3});
  EXPECT_THROW(lp_integral(slow, 2.0), DivergenceError);
  EXPECT_THROW(grad_norm_hyperbolic(slow, 4, 3.0), DivergenceError);
  EXPECT_NO_THROW(lp_integral(slow, 4.0));
  // Euclidean gradient: |v'|^p s^{p(n-1)/n} ~ s^{-p(gamma+1) + p(n-1)/n}
  EXPECT_NO_THROW(grad_norm_euclidean(slow, 4, 2.0));
  const auto slower = RadialProfile::from_samples({0.0, 1.0}, {1.0, 1.0}, {TailKind::power, 0.1});
  EXPECT_THROW(grad_norm_euclidean(slower, 4, 2.0), DivergenceError);
}

TEST(GradientNorms, Homogeneity) {
  Gen gen(42);
  for (int k = 0; k < 20; ++k) {
    const auto v = standard_corpus()[gen.integer(0, 19)];
    const double c = gen.log_uniform(0.1, 10.0);
    const double p = gen.uniform(2.0, 5.0);
    EXPECT_LT(rel_diff(grad_norm_hyperbolic(v.scaled(c), 3, p).value, std::pow(c, p) * grad_norm_hyperbolic(v, 3, p).value),
              1e-9);
    EXPECT_LT(rel_diff(lp_integral(v.scaled(c), p).value, std::pow(c, p) * lp_integral(v, p).value), 1e-9);
  }
}

TEST(HardyBound, HoldsOnCorpus) {
  for (const auto& v : standard_corpus()) {
    for (double p : {2.0, 8.0 / 3, 4.0}) {
      const auto h = hardy_term_bound(v, p);
      EXPECT_GE(h.lhs, h.rhs - 1e-9 * h.lhs - 10 * h.error) << v.name() << " " << p;
    }
  }
}

TEST(HardyBound, TentAtTwo) {
  // w = (1-s) s^{1/2}: int |w'|^2 s ds = int_0^1 (1-3s)^2/4 ds = 1/4, plus 1/4 int (1-s)^2 = 1/12
  const auto h = hardy_term_bound(tent_profile(1.0), 2.0);
  EXPECT_NEAR(h.lhs, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(h.rhs, 1.0 / 4.0 + 1.0 / 12.0, 1e-10);
}

TEST(HardyBound, EqualityProfileOnAWindow) {
  for (double p : {2.0, 3.0, 4.5}) {
    const double c = 1.7;
    const auto h = hardy_term_bound([=](double s) { return c * std::pow(s, -1.0 / p); },
                                    [=](double s) { return -c / p * std::pow(s, -1.0 / p - 1.0); }, p, 1e-3, 1e3);
    EXPECT_LT(rel_diff(h.lhs, h.rhs), 1e-10) << p;
    EXPECT_LT(rel_diff(h.lhs, std::pow(c / p, p) * std::log(1e6)), 1e-10) << p;
  }
}

TEST(HardyBound, ZeroAndRange) {
  const auto h = hardy_term_bound(RadialProfile::zero(), 3.0);
  EXPECT_EQ(h.lhs, 0.0);
  EXPECT_EQ(h.rhs, 0.0);
  EXPECT_THROW(hardy_term_bound(tent_profile(1.0), 1.5), DomainError);
}

TEST(KeyComparison, NonNegativeOnCorpusAcrossTheRange) {
  for (auto [n, p] : {std::pair{4, 8.0 / 3}, {5, 2.5}, {2, 2.0}, {2, 4.0}, {3, 3.0}, {6, 4.0}}) {
    for (const auto& v : standard_corpus()) {
      const auto r = key_comparison(v, Params(n, p));
      EXPECT_GE(r.deficit, -1e-8 * r.scale()) << v.name() << " " << Params(n, p).describe();
      EXPECT_TRUE(r.passed());
    }
  }
}

TEST(KeyComparison, ScaleCovarianceProperty) {
  Gen gen(43);
  const auto corpus = standard_corpus();
  for (int k = 0; k < 15; ++k) {
    const auto& v = corpus[gen.integer(0, 19)];
    const int n = gen.integer(3, 6);
    const double p = Params::lemma_boundary(n) + gen.uniform(0.0, 1.0);
    const double c = gen.log_uniform(0.2, 5.0);
    const auto a = key_comparison(v, Params(n, p));
    const auto b = key_comparison(v.scaled(c), Params(n, p));
    EXPECT_LT(rel_diff(b.lhs, std::pow(c, p) * a.lhs), 1e-8);
    EXPECT_LT(rel_diff(b.rhs, std::pow(c, p) * a.rhs), 1e-8);
  }
}

TEST(KeyComparison, ConstantScaleCanBreakIt) {
  // at n = 2, p = 2 the two sides nearly coincide on concentrated profiles
  const auto v = tent_profile(0.01);
  EXPECT_TRUE(key_comparison(v, Params(2, 2.0)).passed());
  EXPECT_FALSE(key_comparison(v, Params(2, 2.0), profile_quadrature(), 50.0).passed());
}

TEST(KeyComparison, OutOfRangeThrows) {
  EXPECT_THROW(key_comparison(tent_profile(1.0), Params(3, 2.5)), DomainError);
  EXPECT_THROW(key_comparison(tent_profile(1.0), Params(2, 1.5)), DomainError);
}

TEST(KeyComparison, ZeroProfile) {
  const auto r = key_comparison(RadialProfile::zero(), Params(4, 3.0));
  EXPECT_EQ(r.deficit, 0.0);
  EXPECT_TRUE(r.passed());
}
