#include <benchmark/benchmark.h>

#include "spkit/crosscheck.hpp"

namespace {

// Arguments: poset size bound, model-checking bound, parallel flag.
void BM_Crosscheck(benchmark::State& state) {
  spkit::CrosscheckConfig cfg;
  cfg.corpus = spkit::builtin_corpus();
  cfg.max_size = static_cast<int>(state.range(0));
  cfg.pmso_max_size = static_cast<int>(state.range(1));
  cfg.parallel = state.range(2) != 0;
  std::size_t pairs = 0;
  for (auto _ : state) {
    auto r = spkit::crosscheck(cfg);
    pairs = r.rows.size();
    benchmark::DoNotOptimize(r.agreements);
  }
  state.counters["pairs"] = static_cast<double>(pairs);
  state.SetLabel(cfg.parallel ? "parallel" : "serial");
}

BENCHMARK(BM_Crosscheck)
    ->ArgNames({"n", "pmso", "par"})
    ->Args({4, 4, 0})
    ->Args({4, 4, 1})
    ->Args({5, -1, 0})
    ->Args({5, -1, 1})
    ->Args({5, 5, 0})
    ->Args({5, 5, 1})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
