#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "hypsob/corpus.hpp"
#include "hypsob/error.hpp"
#include "hypsob/profile.hpp"
#include "hypsob/profile_io.hpp"
#include "hypsob/sharpness_optimizer.hpp"
#include "test_support.hpp"

using namespace hypsob;
using testing_support::Gen;
using testing_support::rel_diff;

namespace {

RadialProfile random_grid_profile(Gen& gen) {
  const int count = gen.integer(3, 40);
  std::vector<double> s{0.0}, v{gen.uniform(0.5, 3.0)};
  for (int i = 1; i < count; ++i) {
    s.push_back(s.back() + gen.log_uniform(1e-3, 2.0));
    v.push_back(v.back() * gen.uniform(0.3, 1.0));
  }
  const int kind = gen.integer(0, 2);
  Tail tail{TailKind::compact, s.back() * gen.uniform(1.0, 2.0)};
  if (kind == 1) tail = {TailKind::power, gen.uniform(1.5, 4.0)};
  if (kind == 2) tail = {TailKind::exponential, gen.uniform(0.1, 3.0)};
  return RadialProfile::from_samples(s, v, tail, "random");
}

}  // namespace

TEST(RadialProfile, GridInterpolationIsMonotoneAndNonNegative) {
  Gen gen(31);
  for (int k = 0; k < 40; ++k) {
    const auto v = random_grid_profile(gen);
    double prev = v.value(0.0);
    for (double s : log_grid(1e-4, 200.0, 30)) {
      const double x = v.value(s);
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, prev + 1e-15);
      EXPECT_LE(v.slope(s), 1e-15);
      prev = x;
    }
  }
}

TEST(RadialProfile, InterpolatesNodesExactly) {
  const auto v = RadialProfile::from_samples({0.0, 1.0, 2.0, 4.0}, {3.0, 2.0, 0.5, 0.25}, {TailKind::power, 2.0});
  EXPECT_DOUBLE_EQ(v.value(1.0), 2.0);
  EXPECT_DOUBLE_EQ(v.value(4.0), 0.25);
  EXPECT_NEAR(v.value(8.0), 0.25 / 4.0, 1e-15);
  EXPECT_TRUE(std::isinf(v.support_end()));
}

TEST(RadialProfile, TailsContinueTheLastSample) {
  const auto c = RadialProfile::from_samples({0.0, 1.0}, {1.0, 0.5}, {TailKind::compact, 3.0});
  EXPECT_DOUBLE_EQ(c.value(2.0), 0.5);
  EXPECT_DOUBLE_EQ(c.value(3.0), 0.0);
  EXPECT_TRUE(c.has_jumps());
  const auto e = RadialProfile::from_samples({0.0, 1.0}, {1.0, 0.5}, {TailKind::exponential, 2.0});
  EXPECT_NEAR(e.value(2.0), 0.5 * std::exp(-2.0), 1e-15);
}

TEST(RadialProfile, RejectsInvalidSamples) {
  EXPECT_THROW(RadialProfile::from_samples({0.0, 1.0}, {1.0, 2.0}, {TailKind::compact, 1.0}), DomainError);
  EXPECT_THROW(RadialProfile::from_samples({0.1, 1.0}, {1.0, 0.5}, {TailKind::compact, 1.0}), DomainError);
  EXPECT_THROW(RadialProfile::from_samples({0.0, 1.0, 1.0}, {1.0, 0.5, 0.2}, {TailKind::compact, 1.0}), DomainError);
  EXPECT_THROW(RadialProfile::from_samples({0.0, 1.0}, {1.0, -0.5}, {TailKind::compact, 1.0}), DomainError);
  EXPECT_THROW(RadialProfile::from_samples({0.0, 2.0}, {1.0, 0.5}, {TailKind::compact, 1.0}), DomainError);
  EXPECT_THROW(RadialProfile::from_samples({0.0, 2.0}, {1.0, 0.5}, {TailKind::power, -1.0}), DomainError);
}

TEST(RadialProfile, StepZeroAndScaling) {
  const auto step = RadialProfile::step(2.0, 3.0);
  EXPECT_DOUBLE_EQ(step.value(2.9), 2.0);
  EXPECT_DOUBLE_EQ(step.value(3.0), 0.0);
  ASSERT_EQ(step.jumps().size(), 1u);
  EXPECT_DOUBLE_EQ(step.jumps()[0].drop, 2.0);
  EXPECT_TRUE(RadialProfile::zero().is_zero());
  EXPECT_TRUE(RadialProfile::step(0.0, 1.0).is_zero());
  const auto half = tent_profile(1.0).scaled(0.5);
  EXPECT_DOUBLE_EQ(half.value(0.5), 0.25);
  EXPECT_DOUBLE_EQ(half.slope(0.5), -0.5);
}

TEST(RadialProfile, SampledProfileTracksClosure) {
  const auto g = standard_corpus()[6];  // Gaussian
  const auto grid = g.sampled(GridSpec{1e-4, 10.0, 100}.nodes(1.0));
  for (double s : {1e-3, 0.1, 0.7, 1.3, 2.5}) EXPECT_NEAR(grid.value(s), g.value(s), 1e-6);
}

TEST(MeasureLine, IntegratesKnownProfiles) {
  const auto e = exponential_profile(2.0);
  const auto r = integrate_measure_line([&](double s) { return e.value(s); }, e, profile_quadrature());
  EXPECT_LT(rel_diff(r.value, 2.0), 1e-10);
  EXPECT_TRUE(r.converged);
  const auto t = tent_profile(3.0);
  EXPECT_LT(rel_diff(integrate_measure_line([&](double s) { return t.value(s); }, t, profile_quadrature()).value, 1.5),
            1e-12);
}

TEST(MeasureLine, PowerTailGridProfile) {
  // v = 1 on [0, 1], then s^{-3}: integral 1 + 1/2
  const auto v = RadialProfile::from_samples({0.0, 1.0}, {1.0, 1.0}, {TailKind::power, 3.0});
  const auto r = integrate_measure_line([&](double s) { return v.value(s); }, v, profile_quadrature());
  EXPECT_LT(rel_diff(r.value, 1.5), 1e-9);
}

TEST(StandardCorpus, TwentyDistinctValidProfiles) {
  const auto corpus = standard_corpus();
  ASSERT_EQ(corpus.size(), 20u);
  std::set<std::string> names;
  for (const auto& v : corpus) {
    names.insert(v.name());
    EXPECT_FALSE(v.is_zero());
    EXPECT_FALSE(v.has_jumps()) << v.name();
    EXPECT_GT(v.value(0.0), 0.0);
  }
  EXPECT_EQ(names.size(), 20u);
}

TEST(ProfileIo, RoundTripPreservesGridProfilesExactly) {
  Gen gen(32);
  for (int k = 0; k < 30; ++k) {
    auto v = random_grid_profile(gen);
    if (v.has_jumps()) continue;
    const auto back = parse_profile(format_profile(v), "mem");
    ASSERT_EQ(back.segments().size(), 1u);
    const auto& a = v.segments()[0];
    const auto& b = back.segments()[0];
    ASSERT_EQ(a.s.size(), b.s.size());
    for (std::size_t i = 0; i < a.s.size(); ++i) {
      EXPECT_EQ(a.s[i], b.s[i]);
      EXPECT_EQ(a.v[i], b.v[i]);
    }
    EXPECT_EQ(back.tail().kind, v.tail().kind);
    EXPECT_EQ(back.tail().parameter, v.tail().parameter);
  }
}

TEST(ProfileIo, AnalyticProfilesSurviveWriting) {
  for (const auto& v : standard_corpus()) {
    const auto back = parse_profile(format_profile(v), "mem", v.name());
    EXPECT_EQ(back.name(), v.name());
    for (double s : {0.0, 0.003, 0.2, 0.9, 1.7, 6.0}) EXPECT_NEAR(back.value(s), v.value(s), 1e-3) << v.name() << " " << s;
  }
}

TEST(ProfileIo, ConcentratedBubblesKeepTheirScale) {
  for (const auto& v : bubble_corpus(4, 8.0 / 3)) {
    const auto back = parse_profile(format_profile(v), "mem");
    const double lp = integrate_measure_line([&](double s) { return std::pow(v.value(s), 4.0); }, v,
                                             profile_quadrature())
                          .value;
    const double lq = integrate_measure_line([&](double s) { return std::pow(back.value(s), 4.0); }, back,
                                             profile_quadrature())
                          .value;
    EXPECT_LT(rel_diff(lp, lq), 1e-4) << v.name();
  }
}

TEST(ProfileIo, ZeroProfile) {
  const auto text = format_profile(RadialProfile::zero().renamed("zero"));
  EXPECT_NE(text.find("tail=compact:0"), std::string::npos);
  EXPECT_TRUE(parse_profile(text, "mem").is_zero());
}

TEST(ProfileIo, CommentsAndBlankLines) {
  const auto v = parse_profile("# hi\n\ntail=exponential:1\n0 1 # start\n1 0.5\n", "mem");
  EXPECT_DOUBLE_EQ(v.value(1.0), 0.5);
  EXPECT_EQ(v.tail().kind, TailKind::exponential);
}

TEST(ProfileIo, ErrorsNameFileAndLine) {
  struct Case {
    const char* text;
    int line;
  };
  const Case cases[] = {
      {"0 1\n", 1},                                     // header missing
      {"tail=compact:1\n0 1\n0.5 2\n", 3},              // increasing values
      {"tail=compact:1\n0.1 1\n", 2},                   // s0 != 0
      {"tail=compact:1\n0 1\n0.5 0.5\n0.4 0.1\n", 4},   // s not increasing
      {"tail=foo:1\n0 1\n", 1},                         // tail kind
      {"tail=compact:1\n0 1\n0.5 abc\n", 3},            // not a number
      {"tail=compact:1\n0 -1\n", 2},                    // negative
      {"tail=compact:1\n0 1\n0.5\n", 3},                // one column
  };
  for (const auto& c : cases) {
    try {
      parse_profile(c.text, "bad.prof");
      ADD_FAILURE() << "accepted: " << c.text;
    } catch (const ParseError& e) {
      EXPECT_EQ(e.file(), "bad.prof");
      EXPECT_EQ(e.line(), c.line) << c.text << " -> " << e.what();
    }
  }
  EXPECT_THROW(parse_profile("tail=compact:1\n", "empty"), ParseError);
  EXPECT_THROW(parse_profile("tail=compact:0.5\n0 1\n1 0.5\n", "short"), ParseError);
}

TEST(ProfileIo, CorpusDirectoryRoundTrip) {
  testing_support::TempDir dir("corpus");
  const auto corpus = standard_corpus();
  const auto paths = write_corpus(dir.path(), corpus);
  ASSERT_EQ(paths.size(), corpus.size());
  const auto back = read_corpus(dir.path());
  ASSERT_EQ(back.size(), corpus.size());
  // sorted by file name
  for (std::size_t i = 1; i < back.size(); ++i) EXPECT_LT(back[i - 1].name(), back[i].name());
  EXPECT_THROW(read_corpus(dir.path() / "missing"), ParseError);
}
