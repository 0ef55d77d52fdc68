#include <benchmark/benchmark.h>

#include "carpets/boxcount.hpp"
#include "carpets/overlap.hpp"
#include "carpets/spec.hpp"

using namespace carpets;

namespace {

CarpetSpec ssc_spec() { return CarpetSpec::create(2, 4, {{1, 1}, {1, 3}, {2, 2}}); }

CarpetSpec three_column_spec() {
  return CarpetSpec::create(3, 5,
                            {{1, 1}, {2, 1}, {2, 3}, {3, 1}, {3, 3}, {3, 5}});
}

TranslationVector dyadic_t() {
  TranslationVector t;
  t.entries[1] = Rational(36771, 524288);
  t.entries[2] = Rational(71189, 262144);
  t.entries[3] = Rational(668601, 1048576);
  return t;
}

void BM_delta_k(benchmark::State& state) {
  CarpetSpec spec = three_column_spec();
  TranslationVector t = dyadic_t();
  int k = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(delta_k(spec, t, k, 1u << 24));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_delta_k)->Arg(6)->Arg(8)->Arg(10);

void BM_level_points(benchmark::State& state) {
  CarpetSpec spec = three_column_spec();
  TranslationVector t = dyadic_t();
  int k = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(level_points(spec, t, k, 1u << 24));
}
BENCHMARK(BM_level_points)->Arg(5)->Arg(7);

void BM_grid_count(benchmark::State& state) {
  CarpetSpec spec = ssc_spec();
  TranslationVector t = standard_translations(spec);
  int level = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        grid_count(spec, t, level, level + 3, 1u << 26).cover_count);
}
BENCHMARK(BM_grid_count)->Arg(4)->Arg(5)->Arg(6);

void BM_grid_count_overlapping(benchmark::State& state) {
  CarpetSpec spec = three_column_spec();
  TranslationVector t = dyadic_t();
  int level = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        grid_count(spec, t, level, level + 3, 1ull << 27).cover_count);
}
BENCHMARK(BM_grid_count_overlapping)->Arg(3)->Arg(4)->Arg(5);

void BM_certified_lower_bound(benchmark::State& state) {
  CarpetSpec spec =
      CarpetSpec::create(2, 4, {{1, 1}, {1, 3}, {2, 1}, {2, 3}});
  TranslationVector t = standard_translations(spec);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        certified_lower_bound(spec, t, 4, 1, 1u << 26).cell_count);
}
BENCHMARK(BM_certified_lower_bound);

}  // namespace

BENCHMARK_MAIN();
