// Gaussian-mixture fitting of a noisy synthetic heightmap.

#include <benchmark/benchmark.h>

#include "terradeploy/rng.hpp"
#include "terradeploy/terrain.hpp"

using namespace terradeploy;

namespace {

void BM_FitGaussians(benchmark::State& state) {
  SyntheticTerrainSpec spec;
  spec.components = static_cast<std::size_t>(state.range(0));
  spec.extent_x = spec.extent_y = 2000.0;
  spec.min_sigma = 100.0;
  spec.max_sigma = 300.0;
  HeightGrid grid = sample_grid(make_synthetic_terrain(spec, 3), 0.0, 0.0, 40.0, 50, 50);
  RandomStream noise(5);
  for (double& v : grid.values) v += 2.0 * noise.normal();
  double fitted = 0.0;
  for (auto _ : state) {
    const FitResult fit = fit_gaussians(grid, spec.components, {}, 1);
    benchmark::DoNotOptimize(fit.rmse);
    fitted = fit.rmse;
  }
  state.counters["rmse"] = fitted;
}
BENCHMARK(BM_FitGaussians)->Arg(2)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
