#include <gtest/gtest.h>

#include <cmath>

#include "hypsob/corpus.hpp"
#include "hypsob/error.hpp"
#include "hypsob/rearrangement.hpp"
#include "hypsob/sharpness_optimizer.hpp"
#include "hypsob/special_constants.hpp"
#include "test_support.hpp"

using namespace hypsob;
using testing_support::rel_diff;

namespace {

const Params kBubble(4, 8.0 / 3);

}  // namespace

TEST(Families, TruncatedBubbleShape) {
  const auto v = truncated_bubble(4, 8.0 / 3, 0.5, 2.0);
  const auto at = aubin_talenti_profile(4, 8.0 / 3, 0.5);
  EXPECT_DOUBLE_EQ(v.value(0.3), at.value(0.3));
  EXPECT_DOUBLE_EQ(v.value(1.0), at.value(1.0));
  // cutoff 1 - 3y^2 + 2y^3 at y = 1/2
  EXPECT_NEAR(v.value(1.5), at.value(1.5) * 0.5, 1e-14);
  EXPECT_EQ(v.value(2.0), 0.0);
  EXPECT_EQ(v.support_end(), 2.0);
  EXPECT_FALSE(v.has_jumps());
  EXPECT_DOUBLE_EQ(tent_profile(2.0).value(0.5), 0.75);
  EXPECT_DOUBLE_EQ(exponential_profile(2.0).value(2.0), std::exp(-1.0));
}

TEST(Families, Validation) {
  auto f = TestFamily::truncated_bubble(4, 8.0 / 3);
  EXPECT_EQ(f.dimension(), 2u);
  EXPECT_EQ(f.parameter_names[0], "lambda");
  EXPECT_EQ(f.parameter_names[1], "T");
  EXPECT_NO_THROW(f.validate());
  f.lower[0] = 20.0;
  EXPECT_THROW(f.validate(), DomainError);
  EXPECT_EQ(family_from_string("tent"), FamilyId::tent);
  EXPECT_EQ(to_string(FamilyId::truncated_bubble), "truncated_bubble");
  EXPECT_THROW(family_from_string("nope"), DomainError);
}

TEST(DeficitRatio, EuclideanRatioOfTheBubbleIsPinned) {
  // independent quadrature in |x| agrees with these digits; see the ledger
  const auto v = truncated_bubble(4, 8.0 / 3, 1e-3, 1.0);
  const double euc = grad_norm_euclidean(v, 4, 8.0 / 3).value / std::pow(lp_integral(v, 8.0).value, 1.0 / 3);
  EXPECT_LT(rel_diff(euc / std::pow(sobolev_constant(kBubble), 8.0 / 3), 1.5391490071659411), 1e-9);
  const auto r = euclidean_sobolev(v, kBubble);
  EXPECT_LT(rel_diff(r.lhs / r.rhs, 1.5391490071659411), 1e-9);
}

TEST(DeficitRatio, PoincareSobolevRatioOfTheBubbleIsPinned) {
  const auto v = truncated_bubble(4, 8.0 / 3, 1e-3, 1.0);
  EXPECT_LT(rel_diff(deficit_ratio(InequalityId::poincare_sobolev, v, kBubble), 8.3913154054204693), 1e-9);
  EXPECT_LT(rel_diff(target_constant(InequalityId::poincare_sobolev, kBubble), std::pow(sobolev_constant(kBubble), 8.0 / 3)),
            1e-14);
}

TEST(DeficitRatio, NeverBelowTheSharpConstant) {
  const double target = target_constant(InequalityId::poincare_sobolev, kBubble);
  for (double lambda : {10.0, 1.0, 1e-2, 1e-4, 1e-6}) {
    for (double t : {0.1, 1.0, 10.0}) {
      const double r = deficit_ratio(InequalityId::poincare_sobolev, truncated_bubble(4, 8.0 / 3, lambda, t), kBubble);
      EXPECT_GT(r, target * (1 - 1e-6)) << lambda << " " << t;
    }
  }
  EXPECT_THROW(deficit_ratio(InequalityId::log_sobolev, tent_profile(1.0), kBubble), DomainError);
}

TEST(Trend, RequestedSequenceDecreasesAndExtendsToTheGap) {
  const auto trend = concentration_trend(InequalityId::poincare_sobolev, kBubble, {1, 1e-1, 1e-2, 1e-3}, 1.0, {}, 0.05, 4);
  ASSERT_GE(trend.ratios.size(), 4u);
  EXPECT_EQ(trend.requested, 4u);
  for (std::size_t i = 1; i < trend.ratios.size(); ++i) EXPECT_LT(trend.ratios[i], trend.ratios[i - 1]);
  for (double r : trend.ratios) EXPECT_GE(r, trend.target * (1 - 1e-6));
  // the gap at lambda = 1e-3 is far above 5%; only the extension closes it
  EXPECT_GT(trend.ratios[3] / trend.target - 1, 0.5);
  EXPECT_TRUE(trend.extended);
  EXPECT_LE(trend.final_relative_gap, 0.05);
  EXPECT_TRUE(trend.monotone);
  EXPECT_TRUE(trend.above_target);
  EXPECT_TRUE(trend.passed);
  EXPECT_LT(rel_diff(trend.ratios[3], 8.3913154054204693), 1e-9);
}

TEST(Trend, WithoutExtensionTheRequestedSetMissesTheGap) {
  const auto trend = concentration_trend(InequalityId::poincare_sobolev, kBubble, {1, 1e-1, 1e-2, 1e-3});
  EXPECT_TRUE(trend.monotone);
  EXPECT_TRUE(trend.above_target);
  EXPECT_FALSE(trend.extended);
  EXPECT_FALSE(trend.passed);
}

TEST(Trend, StrengthenedConstantDropsBelowTarget) {
  VerifierOptions opts;
  opts.constant_scale = 1.1;
  const auto trend = concentration_trend(InequalityId::poincare_sobolev, kBubble, {1, 1e-1, 1e-2, 1e-3}, 1.0, opts, 0.05, 4);
  EXPECT_FALSE(trend.above_target);
  EXPECT_FALSE(trend.passed);
}

TEST(Trend, NeedsFourLambdas) {
  const auto trend = concentration_trend(InequalityId::poincare_sobolev, kBubble, {1e-4, 1e-5, 1e-6});
  EXPECT_LT(trend.ratios[2], trend.ratios[1]);
  EXPECT_LT(trend.ratios[1], trend.ratios[0]);
  EXPECT_FALSE(trend.monotone);
  EXPECT_LE(trend.final_relative_gap, 0.05);
  EXPECT_FALSE(trend.passed);
}

TEST(Optimizer, ApproachesTheSharpConstantAtTheLambdaBound) {
  const auto result = minimize_ratio(InequalityId::poincare_sobolev, kBubble, TestFamily::truncated_bubble(4, 8.0 / 3));
  EXPECT_GE(result.best_ratio, result.target * (1 - 1e-6));
  EXPECT_LE(result.relative_gap(), 0.05);
  EXPECT_EQ(result.best_parameters[0], 1e-6);
  EXPECT_TRUE(result.converged);
  // one trace row per simplex iteration, holding the best vertex so far
  EXPECT_LE(static_cast<int>(result.trace.size()), result.evaluations);
  for (std::size_t i = 1; i < result.trace.size(); ++i) {
    EXPECT_EQ(result.trace[i].iteration, result.trace[i - 1].iteration + 1);
    EXPECT_LE(result.trace[i].ratio, result.trace[i - 1].ratio);
  }
  EXPECT_EQ(result.trace.back().ratio, result.best_ratio);
}

TEST(Optimizer, IsDeterministic) {
  SearchSpec spec;
  spec.max_evaluations = 40;
  const auto a = minimize_ratio(InequalityId::poincare_sobolev, kBubble, TestFamily::truncated_bubble(4, 8.0 / 3), spec);
  const auto b = minimize_ratio(InequalityId::poincare_sobolev, kBubble, TestFamily::truncated_bubble(4, 8.0 / 3), spec);
  EXPECT_EQ(trace_to_csv(a), trace_to_csv(b));
  EXPECT_EQ(to_json(a), to_json(b));
}

TEST(Optimizer, BudgetExhaustionIsReported) {
  SearchSpec spec;
  spec.max_evaluations = 5;
  const auto r = minimize_ratio(InequalityId::poincare_sobolev, kBubble, TestFamily::truncated_bubble(4, 8.0 / 3), spec);
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.evaluations, 5);
}

TEST(Optimizer, TraceCsvColumns) {
  SearchSpec spec;
  spec.max_evaluations = 6;
  const auto r = minimize_ratio(InequalityId::poincare_sobolev, kBubble, TestFamily::truncated_bubble(4, 8.0 / 3), spec);
  const auto csv = trace_to_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "iteration,lambda,T,ratio,gap");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), static_cast<long>(r.trace.size()) + 1);
}

TEST(Optimizer, OneParameterFamilies) {
  // Morrey on tents: the ratio depends on A only through scaling, so any A is optimal
  const auto r = minimize_ratio(InequalityId::linfty_inequality, Params(2, 4.0), TestFamily::tent());
  EXPECT_GT(r.best_ratio, 1.0);
  EXPECT_EQ(r.target, 1.0);
}

TEST(NonAttainment, CorpusIsStrict) {
  const auto scan = non_attainment_scan(InequalityId::poincare_sobolev, kBubble, standard_corpus());
  EXPECT_TRUE(scan.passed());
  EXPECT_GT(scan.min_deficit, 0.0);
  EXPECT_FALSE(scan.min_profile.empty());
  std::vector<RadialProfile> with_zero{RadialProfile::zero(), tent_profile(1.0)};
  EXPECT_EQ(non_attainment_scan(InequalityId::poincare_sobolev, kBubble, with_zero).reports.size(), 1u);
}
