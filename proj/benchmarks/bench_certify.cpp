#include <benchmark/benchmark.h>

#include <filesystem>

#include "phasecert/criteria.hpp"
#include "phasecert/scenario.hpp"

using namespace phasecert;

namespace {

const System& ieee14() {
  static const System sys = assemble(load_scenario(std::filesystem::path(PHASECERT_SOURCE_DIR) / "scenarios/ieee14_stable.toml"));
  return sys;
}

void BM_CertifySweep(benchmark::State& state) {
  const System& sys = ieee14();
  CertifyOptions o;
  o.grid = FrequencyGrid::logspace(0.01, 1e4, static_cast<int>(state.range(0)), true);
  o.refine = false;
  o.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(certify(sys, o).certified);
  state.SetItemsProcessed(state.iterations() * static_cast<long>(o.grid.size()));
}
BENCHMARK(BM_CertifySweep)->Arg(50)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_SingleFrequency(benchmark::State& state) {
  const System& sys = ieee14();
  const TransformSet t(FrameConfig{}, sys.global_ops);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_frequency(sys, t, 1.3).satisfied);
}
BENCHMARK(BM_SingleFrequency)->Unit(benchmark::kMicrosecond);

void BM_GroundTruth(benchmark::State& state) {
  const System& sys = ieee14();
  for (auto _ : state) benchmark::DoNotOptimize(ground_truth(sys).max_real);
}
BENCHMARK(BM_GroundTruth)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
