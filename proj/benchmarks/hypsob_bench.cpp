#include <benchmark/benchmark.h>

#include <cmath>

#include "hypsob/corpus.hpp"
#include "hypsob/hyperbolic_geometry.hpp"
#include "hypsob/inequality_verifier.hpp"
#include "hypsob/lemma_checker.hpp"
#include "hypsob/rearrangement.hpp"
#include "hypsob/sharpness_optimizer.hpp"

using namespace hypsob;

static void BM_Phi(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto& map = volume_map(n);
  double t = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(map.phi(t));
    t = t < 30.0 ? t * 1.01 : 1e-3;
  }
}
BENCHMARK(BM_Phi)->Arg(2)->Arg(4)->Arg(8);

static void BM_PhiInverse(benchmark::State& state) {
  const auto& map = volume_map(5);
  double s = 1e-6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(map.phi_inv(s));
    s = s < 1e12 ? s * 1.1 : 1e-6;
  }
}
BENCHMARK(BM_PhiInverse);

static void BM_LemmaMargin(benchmark::State& state) {
  double t = 1e-3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(pointwise_margin(5, 2.5, t));
    t = t < 25.0 ? t * 1.01 : 1e-3;
  }
}
BENCHMARK(BM_LemmaMargin);

static void BM_VerifyLemma(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(verify_lemma(6, 2.6));
}
BENCHMARK(BM_VerifyLemma)->Unit(benchmark::kMillisecond);

static void BM_PoincareSobolevCorpus(benchmark::State& state) {
  const auto corpus = standard_corpus();
  const auto& v = corpus[static_cast<std::size_t>(state.range(0))];
  for (auto _ : state) benchmark::DoNotOptimize(poincare_sobolev(v, Params(4, 8.0 / 3)));
  state.SetLabel(v.name());
}
BENCHMARK(BM_PoincareSobolevCorpus)->DenseRange(0, 19)->Unit(benchmark::kMicrosecond);

static void BM_BubbleRatio(benchmark::State& state) {
  const double lambda = std::pow(10.0, -static_cast<double>(state.range(0)));
  const Params params(4, 8.0 / 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        deficit_ratio(InequalityId::poincare_sobolev, truncated_bubble(4, 8.0 / 3, lambda, 1.0), params));
  }
}
BENCHMARK(BM_BubbleRatio)->DenseRange(0, 6)->Unit(benchmark::kMicrosecond);

static void BM_MinimizeRatio(benchmark::State& state) {
  const Params params(4, 8.0 / 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        minimize_ratio(InequalityId::poincare_sobolev, params, TestFamily::truncated_bubble(4, 8.0 / 3)));
  }
}
BENCHMARK(BM_MinimizeRatio)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
