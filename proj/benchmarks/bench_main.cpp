#include <benchmark/benchmark.h>

#include <random>

#include "stabaaa/aaa.hpp"
#include "stabaaa/sdp.hpp"
#include "stabaaa/stabilize.hpp"
#include "support/synthetic.hpp"

using namespace stabaaa;
using namespace stabaaa::testing;

namespace {

FrequencyDataset resonant_data(std::size_t samples) {
  std::mt19937_64 rng(3);
  SystemShape sh;
  sh.pairs = 20;
  sh.zeta_lo = 0.002;
  sh.zeta_hi = 0.05;
  const auto sys = random_stable_system(rng, sh);
  return perturb(normalize(sample(sys, logspace(0.01, 2.0, samples))).data, 1e-4, rng);
}

void BM_AaaFit(benchmark::State& state) {
  const FrequencyDataset ds = resonant_data(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(aaa_fit(ds, 1e-12, 30));
  }
}
BENCHMARK(BM_AaaFit)->Arg(200)->Arg(400)->Arg(800)->Unit(benchmark::kMillisecond);

void BM_StabilitySdp(benchmark::State& state) {
  const FrequencyDataset ds = resonant_data(400);
  const FitOutcome fit = aaa_fit(ds, 1e-12, static_cast<std::size_t>(state.range(0)));
  const StabilitySdp p =
      build_stability_sdp(transform_denominator(build_denominator_realization(fit.model), fit.loewner_real, fit.x_opt));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_sdp(p));
  }
  state.counters["k"] = static_cast<double>(fit.iterations);
}
BENCHMARK(BM_StabilitySdp)->Arg(10)->Arg(20)->Arg(31)->Unit(benchmark::kSecond)->Iterations(1);

void BM_EvaluateGrid(benchmark::State& state) {
  const FitOutcome fit = aaa_fit(resonant_data(400), 1e-12, 30);
  const std::vector<double> grid = logspace(1e-3, 10.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    cplx acc = 0.0;
    for (double w : grid) acc += evaluate(fit.model, cplx(0.0, w));
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EvaluateGrid)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_Poles(benchmark::State& state) {
  const FitOutcome fit = aaa_fit(resonant_data(400), 1e-12, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(classify_stability(fit.model));
  }
}
BENCHMARK(BM_Poles)->Arg(10)->Arg(30)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
