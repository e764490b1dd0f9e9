// Adaptive line-of-sight queries against the dense sampling reference on
// synthetic mixtures of growing size.

#include <benchmark/benchmark.h>

#include <vector>

#include "terradeploy/los.hpp"
#include "terradeploy/rng.hpp"
#include "terradeploy/terrain.hpp"

using namespace terradeploy;

namespace {

struct Workload {
  TerrainModel model;
  std::vector<std::pair<Point3, Point3>> segments;
};

Workload make_workload(std::size_t components) {
  SyntheticTerrainSpec spec;
  spec.components = components;
  Workload w{make_synthetic_terrain(spec, 42), {}};
  RandomStream rng(7);
  for (int i = 0; i < 64; ++i) {
    const double x1 = rng.uniform(0.0, spec.extent_x), y1 = rng.uniform(0.0, spec.extent_y);
    const double x2 = rng.uniform(0.0, spec.extent_x), y2 = rng.uniform(0.0, spec.extent_y);
    w.segments.push_back({{x1, y1, w.model.elevation(x1, y1) + rng.uniform(2.0, 800.0)},
                          {x2, y2, w.model.elevation(x2, y2) + rng.uniform(2.0, 800.0)}});
  }
  return w;
}

void BM_LosQuery(benchmark::State& state) {
  const Workload w = make_workload(static_cast<std::size_t>(state.range(0)));
  const Bvh bvh(w.model, tail_safe_scale(w.model, 1.0));
  std::size_t i = 0, kernels = 0, queries = 0;
  for (auto _ : state) {
    const auto& [p1, p2] = w.segments[i++ % w.segments.size()];
    const LosResult r = los_query(bvh, w.model, {p1, p2, 1e-5});
    kernels += r.kernel_evaluations;
    ++queries;
    benchmark::DoNotOptimize(r.visible);
  }
  state.counters["kernels/query"] = static_cast<double>(kernels) / static_cast<double>(queries);
}
BENCHMARK(BM_LosQuery)->Arg(1)->Arg(10)->Arg(50)->Arg(200);

void BM_LosDenseOracle(benchmark::State& state) {
  const Workload w = make_workload(static_cast<std::size_t>(state.range(0)));
  std::size_t i = 0, kernels = 0, queries = 0;
  for (auto _ : state) {
    const auto& [p1, p2] = w.segments[i++ % w.segments.size()];
    const LosResult r = los_dense_oracle(w.model, p1, p2, 1e-4);
    kernels += r.kernel_evaluations;
    ++queries;
    benchmark::DoNotOptimize(r.visible);
  }
  state.counters["kernels/query"] = static_cast<double>(kernels) / static_cast<double>(queries);
}
BENCHMARK(BM_LosDenseOracle)->Arg(1)->Arg(10)->Arg(50);

void BM_BvhBuild(benchmark::State& state) {
  SyntheticTerrainSpec spec;
  spec.components = static_cast<std::size_t>(state.range(0));
  const TerrainModel model = make_synthetic_terrain(spec, 42);
  for (auto _ : state) {
    Bvh bvh(model, 2.0);
    benchmark::DoNotOptimize(bvh);
  }
}
BENCHMARK(BM_BvhBuild)->Arg(10)->Arg(200)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
