// Fitness evaluation, repair and a short end-to-end optimization on the demo
// scenario.

#include <benchmark/benchmark.h>

#include <vector>

#include "terradeploy/deploy.hpp"
#include "terradeploy/optimizer.hpp"
#include "terradeploy/scenario.hpp"

using namespace terradeploy;

namespace {

const Problem& demo_problem() {
  static const Problem problem(load_scenario(TERRADEPLOY_CONFIG_DIR "/demo_scenario.json"));
  return problem;
}

std::vector<Deployment> random_deployments(const Problem& problem, int count) {
  RandomStream rng(11);
  std::vector<Deployment> out;
  for (int i = 0; i < count; ++i) out.push_back(problem.random_deployment(rng));
  return out;
}

void BM_Evaluate(benchmark::State& state) {
  const Problem& problem = demo_problem();
  const auto deployments = random_deployments(problem, 64);
  std::size_t i = 0;
  for (auto _ : state) {
    const FitnessReport r = problem.evaluate(deployments[i++ % deployments.size()]);
    benchmark::DoNotOptimize(r.fitness);
  }
}
BENCHMARK(BM_Evaluate);

void BM_Repair(benchmark::State& state) {
  const Problem& problem = demo_problem();
  const auto deployments = random_deployments(problem, 64);
  std::size_t i = 0;
  for (auto _ : state) {
    const RepairResult r = problem.repair(deployments[i++ % deployments.size()]);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_Repair);

void BM_Optimize(benchmark::State& state) {
  const Problem& problem = demo_problem();
  GaConfig ga;
  ga.population = 20;
  ga.generations = 20;
  PsoConfig pso;
  pso.particles = 10;
  pso.iterations = 10;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const OptimizeResult r = optimize(problem, ga, pso, seed++);
    benchmark::DoNotOptimize(r.trace.final_report.fitness);
  }
}
BENCHMARK(BM_Optimize)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
