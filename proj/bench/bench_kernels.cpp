// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "mpsm/batch.hpp"
#include "mpsm/measure.hpp"

using namespace mpsm;

namespace {

const BondProfile kProfile(10, 2, 8);

void BM_summaries_serial(benchmark::State& st) {
  const RngStream base(1, 0);
  for (auto _ : st) benchmark::DoNotOptimize(sample_summaries_serial(kProfile, Ensemble::rmps, st.range(0), base));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_summaries_omp(benchmark::State& st) {
  const RngStream base(1, 0);
  for (auto _ : st) benchmark::DoNotOptimize(sample_summaries_omp(kProfile, Ensemble::rmps, st.range(0), base));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_density_serial(benchmark::State& st) {
  const RngStream base(2, 0);
  const BondProfile p(8, 2, 4);
  for (auto _ : st) benchmark::DoNotOptimize(accumulate_density_serial(p, true, st.range(0), base));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_density_omp(benchmark::State& st) {
  const RngStream base(2, 0);
  const BondProfile p(8, 2, 4);
  for (auto _ : st) benchmark::DoNotOptimize(accumulate_density_omp(p, true, st.range(0), base));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

double log_weight(std::size_t, RngStream& r) {
  return fs_log_weight(right_environments(sample_rmps(kProfile, r)), kProfile).value;
}

void BM_log_weights_serial(benchmark::State& st) {
  const RngStream base(3, 0);
  for (auto _ : st) benchmark::DoNotOptimize(map_samples_serial(st.range(0), base, log_weight));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_log_weights_omp(benchmark::State& st) {
  const RngStream base(3, 0);
  for (auto _ : st) benchmark::DoNotOptimize(map_samples_omp(st.range(0), base, log_weight));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

}  // namespace

BENCHMARK(BM_summaries_serial)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_summaries_omp)->Arg(256)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_density_serial)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_density_omp)->Arg(2048)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_log_weights_serial)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_log_weights_omp)->Arg(1024)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
