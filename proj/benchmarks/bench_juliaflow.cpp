#include <benchmark/benchmark.h>

#include "juliaflow/grid.hpp"
#include "juliaflow/level_scheme.hpp"
#include "juliaflow/partition.hpp"
#include "juliaflow/plane_sampling.hpp"
#include "juliaflow/plane_tree.hpp"
#include "juliaflow/tree_walk.hpp"

using namespace juliaflow;

namespace {

const Polynomial& cubic() {
  static const Polynomial p = Polynomial::parse("0+0i,0+0i,-3+0i,1+0i");
  return p;
}

const PlaneTree& cubic_plane() {
  static const PlaneTree plane = build_plane_tree(cubic(), BuildOptions{.max_level = 4});
  return plane;
}

void bm_green_value(benchmark::State& state) {
  Complex z(0.37, 0.81);
  for (auto _ : state) {
    benchmark::DoNotOptimize(green_value(cubic(), z));
    z += Complex(1e-9, 0.0);
  }
}
BENCHMARK(bm_green_value);

void bm_evaluate_grid(benchmark::State& state) {
  const LevelScheme scheme = build_level_scheme(cubic(), 4);
  const Box box = default_bounds(cubic(), scheme);
  const int res = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_grid(cubic(), box, res));
  state.SetItemsProcessed(state.iterations() * res * res);
}
BENCHMARK(bm_evaluate_grid)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void bm_label_components(benchmark::State& state) {
  const LevelScheme scheme = build_level_scheme(cubic(), 4);
  GridField grid = evaluate_grid(cubic(), default_bounds(cubic(), scheme), 1024);
  const int level = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(label_components(cubic(), scheme, level, grid));
}
BENCHMARK(bm_label_components)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

void bm_loop_erased_walk(benchmark::State& state) {
  const TreeWithDynamics& t = cubic_plane().tree;
  const MeasureAssignment m = compute_omega(t);
  const Walker walker(t, m, 4);
  const WalkConfig cfg{.seed = 1, .mode = WalkMode::LoopErased, .target_level = 4};
  std::uint64_t index = 0;
  for (auto _ : state) benchmark::DoNotOptimize(walker.sample(cfg, index++));
}
BENCHMARK(bm_loop_erased_walk);

void bm_nearest_neighbor_walk(benchmark::State& state) {
  const TreeWithDynamics& t = cubic_plane().tree;
  const MeasureAssignment m = compute_omega(t);
  const Walker walker(t, m, 3);
  const WalkConfig cfg{.seed = 1, .mode = WalkMode::NearestNeighbor, .target_level = 3};
  std::uint64_t index = 0;
  for (auto _ : state) benchmark::DoNotOptimize(walker.sample(cfg, index++));
}
BENCHMARK(bm_nearest_neighbor_walk);

void bm_trace_ray(benchmark::State& state) {
  const PlaneLocator locator(cubic_plane());
  double theta = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(trace_ray(cubic_plane(), locator, theta, 3));
    theta += 0.0137;
    if (theta >= 1.0) theta -= 1.0;
  }
}
BENCHMARK(bm_trace_ray)->Unit(benchmark::kMicrosecond);

void bm_brownian_run(benchmark::State& state) {
  const PlaneLocator locator(cubic_plane());
  std::uint64_t index = 0;
  for (auto _ : state) benchmark::DoNotOptimize(brownian_first_entry(cubic_plane(), locator, 5, index++, 3));
}
BENCHMARK(bm_brownian_run)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
