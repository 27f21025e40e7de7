#include <benchmark/benchmark.h>

#include "sievelab/experiment.hpp"

using namespace sievelab;

namespace {

void BM_prime_range(benchmark::State& state) {
  const uint64_t span = static_cast<uint64_t>(state.range(0));
  for (auto _ : state) {
    PrimalityRange r = prime_range(1'000'000, 1'000'000 + span);
    benchmark::DoNotOptimize(r.count());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(span));
}
BENCHMARK(BM_prime_range)->Arg(1 << 20)->Arg(1 << 24);

void BM_singular_series(benchmark::State& state) {
  SieveContext ctx = build_context(std::vector<uint64_t>{0, 2, 6}, FactoredNat::one(),
                                   1.0 / 3.0, 1'000'000);
  const uint64_t pmax = static_cast<uint64_t>(state.range(0));
  for (auto _ : state) {
    EulerProductResult r = singular_series(ctx, FactoredNat::one(), pmax);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_singular_series)->Arg(100'000)->Arg(1'000'000);

void BM_build_weight_table(benchmark::State& state) {
  SieveContext ctx = build_context_with_R(std::vector<uint64_t>{0, 2, 6}, FactoredNat::one(),
                                          static_cast<double>(state.range(0)), 1'000'000);
  WeightTableOptions opt;
  opt.series_pmax = 100'000;
  for (auto _ : state) {
    WeightTable t = build_weight_table(ctx, opt);
    benchmark::DoNotOptimize(t.support.size());
  }
}
BENCHMARK(BM_build_weight_table)->Arg(2'000)->Arg(8'000);

void BM_weight_eval(benchmark::State& state) {
  SieveContext ctx = build_context_with_R(std::vector<uint64_t>{0, 2, 6}, FactoredNat::one(),
                                          8'000.0, 1'000'000);
  WeightTableOptions opt;
  opt.series_pmax = 100'000;
  WeightTable t = build_weight_table(ctx, opt);
  uint64_t n = 1'000'001;
  for (auto _ : state) {
    benchmark::DoNotOptimize(weight_w(t, n));
    n += 2;
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_weight_eval);

void BM_range_scan(benchmark::State& state) {
  const uint64_t x = 100'000;
  SieveContext ctx = build_context(std::vector<uint64_t>{0, 2, 6}, FactoredNat::one(),
                                   1.0 / 3.0, x);
  WeightTableOptions opt;
  opt.series_pmax = 100'000;
  WeightTable t = build_weight_table(ctx, opt);
  std::vector<size_t> idx{0, 1};
  const unsigned workers = static_cast<unsigned>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(empirical_lhs(t, x, idx, workers));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(x));
}
BENCHMARK(BM_range_scan)->Arg(1)->Arg(4);

void BM_integral_mc(benchmark::State& state) {
  const unsigned k = static_cast<unsigned>(state.range(0));
  uint64_t seed = 1;
  for (auto _ : state) {
    IntegralEstimate e = integral_I(k, IntegralMethod::MonteCarlo, 100'000, seed++);
    benchmark::DoNotOptimize(e.value);
  }
  state.SetItemsProcessed(state.iterations() * 100'000);
}
BENCHMARK(BM_integral_mc)->Arg(4)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
