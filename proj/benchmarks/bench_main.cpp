#include <benchmark/benchmark.h>

#include "pathfec/allocation.hpp"

namespace {

using namespace pathfec;

PathType make_type(double pi_b, double mu_g_t, double t, int count) {
  PathType pt;
  pt.mu_g = mu_g_t / t;
  pt.mu_b = pt.mu_g * (1.0 - pi_b) / pi_b;
  pt.max_rate_w = 1e6;
  pt.count = count;
  return pt;
}

void bm_tilted_moments(benchmark::State& state) {
  const double t = 0.2;
  const auto ep = ErasureProfile::build(make_type(0.015, 0.2, t, 1), t);
  double lambda = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(ep.tilted(lambda));
    lambda += 1e-9;
  }
}
BENCHMARK(bm_tilted_moments);

void bm_per_path_pmf(benchmark::State& state) {
  const double t = 0.2;
  const auto pt = make_type(0.015, 0.2, t, 1);
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(per_path_pmf(pt, n, n / t));
}
BENCHMARK(bm_per_path_pmf)->Arg(50)->Arg(200)->Arg(800);

void bm_exact_pe(benchmark::State& state) {
  const double t = 0.2;
  const int l = static_cast<int>(state.range(0));
  const auto te = TypeEnsemble::build({make_type(0.015, 0.2, t, l / 3),
                                       make_type(0.025, 0.2, t, l - l / 3)},
                                      t);
  const int n = 20 * l;
  AllocationVector av;
  av.counts = {n / 3, n - n / 3};
  av.block_n = n;
  av.loss_budget_m = n / 10;
  for (auto _ : state)
    benchmark::DoNotOptimize(exact_pe(av, te, t));
}
BENCHMARK(bm_exact_pe)->Arg(6)->Arg(12)->Arg(24);

void bm_dp_build(benchmark::State& state) {
  const double t = 0.1;
  const auto te = TypeEnsemble::build({make_type(0.015, 0.2, t, 2),
                                       make_type(0.020, 0.2, t, 2),
                                       make_type(0.025, 0.2, t, 2)},
                                      t);
  Block blk;
  blk.n = static_cast<int>(state.range(0));
  blk.k_info = blk.n * 9 / 10;
  blk.t = t;
  for (auto _ : state)
    benchmark::DoNotOptimize(dp_suboptimal(te, blk));
}
BENCHMARK(bm_dp_build)->Arg(30)->Arg(60)->Arg(100);

}  // namespace

BENCHMARK_MAIN();
