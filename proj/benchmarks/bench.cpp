// Microbenchmarks for the hot paths: sampling, component decomposition, the
// fixed-point solver, and the exposure pipelines. Run with --benchmark_filter
// to pick a subset; counters report per-item rates where they make sense.

#include <benchmark/benchmark.h>

#include <cmath>

#include "hgsim/exposure.hpp"
#include "hgsim/hypergraph.hpp"
#include "hgsim/rng.hpp"
#include "hgsim/sampling.hpp"
#include "hgsim/stats.hpp"
#include "hgsim/theory.hpp"

using namespace hgsim;

namespace {

// n sweeps at fixed mean degree, so edge counts scale linearly with n.
void bm_sample_hnp(benchmark::State& state) {
  const std::uint64_t n = std::uint64_t(state.range(0));
  const int d = int(state.range(1));
  const ModelParams m = ModelParams::from_c(n, d, 2.0);
  std::uint64_t seed = 1;
  std::size_t edges = 0;
  for (auto _ : state) {
    const Hypergraph h = sample_hnp(n, d, m.p, mix_seed(9001, seed++));
    edges += h.edge_count();
    benchmark::DoNotOptimize(h.flat().data());
  }
  state.counters["edges/s"] =
      benchmark::Counter(double(edges), benchmark::Counter::kIsRate);
}
BENCHMARK(bm_sample_hnp)->Args({10000, 2})->Args({100000, 2})->Args({10000, 3});

void bm_components(benchmark::State& state) {
  const std::uint64_t n = std::uint64_t(state.range(0));
  const ModelParams m = ModelParams::from_c(n, 2, 2.0);
  const Hypergraph h = sample_hnp(n, 2, m.p, 42);
  for (auto _ : state) {
    benchmark::DoNotOptimize(components(h).largest_order);
  }
  state.SetItemsProcessed(std::int64_t(state.iterations()) * std::int64_t(n));
}
BENCHMARK(bm_components)->Arg(10000)->Arg(100000);

void bm_largest_component(benchmark::State& state) {
  const std::uint64_t n = std::uint64_t(state.range(0));
  const ModelParams m = ModelParams::from_c(n, 2, 2.0);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const Hypergraph h = sample_hnp(n, 2, m.p, mix_seed(7, seed++));
    benchmark::DoNotOptimize(largest_component(h).first);
  }
}
BENCHMARK(bm_largest_component)->Arg(20000);

void bm_solve_rho(benchmark::State& state) {
  const int d = int(state.range(0));
  double c = 1.0 / (d - 1) + 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_rho(c, d));
    c += 0.05;
    if (c > 10.0) c = 1.0 / (d - 1) + 0.1;
  }
}
BENCHMARK(bm_solve_rho)->Arg(2)->Arg(5);

void bm_predict(benchmark::State& state) {
  double c = 1.6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(predict(ModelParams::from_c(20000, 2, c)).sigma2);
    c = (c > 9.0) ? 1.6 : c + 0.01;
  }
}
BENCHMARK(bm_predict);

void bm_four_rounds(benchmark::State& state) {
  const std::uint64_t n = std::uint64_t(state.range(0));
  const ModelParams m = ModelParams::from_c(n, 2, 2.0);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const FourRoundTrace t = run_four_rounds(n, 2, m.p, 0.1, mix_seed(5, seed++));
    benchmark::DoNotOptimize(t.orders[3]);
  }
}
BENCHMARK(bm_four_rounds)->Arg(20000);

void bm_artificial_trace(benchmark::State& state) {
  const std::uint64_t n = std::uint64_t(state.range(0));
  const ModelParams m = ModelParams::from_c(n, 2, 2.0);
  const ExposureConfig cfg = split_probabilities(m.p, 0.1);
  const std::uint64_t n1 = std::uint64_t(std::llround(predict(ModelParams::from_c(n, 2, 1.8)).mu));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const ArtificialTrace t = run_artificial(n, 2, n1, cfg.p1, cfg.p2, mix_seed(3, seed++));
    benchmark::DoNotOptimize(t.sg);
  }
}
BENCHMARK(bm_artificial_trace)->Arg(20000);

void bm_resample_round3(benchmark::State& state) {
  const std::uint64_t n = 20000;
  const ModelParams m = ModelParams::from_c(n, 2, 2.0);
  const ExposureConfig cfg = split_probabilities(m.p, 0.1);
  const std::uint64_t n1 = std::uint64_t(std::llround(predict(ModelParams::from_c(n, 2, 1.8)).mu));
  const ArtificialTrace frozen = run_artificial(n, 2, n1, cfg.p1, cfg.p2, 11);
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(resample_round3(frozen, mix_seed(13, seed++)).law.s_iso);
  }
}
BENCHMARK(bm_resample_round3);

void bm_binomial_draw(benchmark::State& state) {
  Rng rng(99);
  const double trials = double(state.range(0));
  const double p = 2.0 / trials;
  for (auto _ : state) {
    benchmark::DoNotOptimize(rng.binomial(trials, p));
  }
}
BENCHMARK(bm_binomial_draw)->Arg(1000)->Arg(100000000);

}  // namespace

BENCHMARK_MAIN();
