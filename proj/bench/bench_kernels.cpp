#include <benchmark/benchmark.h>

#include <map>

#include "segdep/smoothing.hpp"
#include "segdep/synthesis.hpp"

using namespace segdep;

namespace {

struct Problem {
  SyntheticData sim;
  Hyperparams hp;
};

const Problem& problem(int n) {
  static std::map<int, Problem> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    SyntheticSpec spec;
    spec.n = n;
    spec.hp.segment_length = SegmentLengthPrior::geometric(4.0 / n);
    Rng rng = make_stream(17, static_cast<std::uint64_t>(n));
    it = cache.emplace(n, Problem{simulate_from_prior(spec, rng), spec.hp}).first;
  }
  return it->second;
}

// One filter step from a state with a large unthinned particle set.
void BM_FilterStep(benchmark::State& state, Execution exec) {
  const int n = static_cast<int>(state.range(0));
  const auto& p = problem(n + 1);
  FilterState s = filter_init(p.sim.data, p.hp);
  while (s.t < n) s = filter_step(s, p.sim.data, p.hp);
  for (auto _ : state) benchmark::DoNotOptimize(filter_step(s, p.sim.data, p.hp, exec));
  state.counters["particles"] = static_cast<double>(s.particles.size());
}

void BM_Smoother(benchmark::State& state, Execution exec) {
  const auto& p = problem(1000);
  const auto hist = run_filter(p.sim.data, p.hp, {});
  for (auto _ : state)
    benchmark::DoNotOptimize(sample_segmentations(hist, p.sim.data, p.hp, static_cast<std::size_t>(state.range(0)),
                                                  1, true, exec));
}

}  // namespace

BENCHMARK_CAPTURE(BM_FilterStep, serial, Execution::Serial)->Arg(500)->Arg(2000);
BENCHMARK_CAPTURE(BM_FilterStep, parallel, Execution::Parallel)->Arg(500)->Arg(2000);
BENCHMARK_CAPTURE(BM_Smoother, serial, Execution::Serial)->Arg(200);
BENCHMARK_CAPTURE(BM_Smoother, parallel, Execution::Parallel)->Arg(200);

BENCHMARK_MAIN();
