// terradeploy: command-line front end for line-of-sight checks, deployment
// optimization, Monte Carlo benchmarks and terrain fitting.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "terradeploy/harness.hpp"
#include "terradeploy/los.hpp"
#include "terradeploy/optimizer.hpp"
#include "terradeploy/scenario.hpp"
#include "terradeploy/terrain.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace terradeploy;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

Point3 to_point(const std::vector<double>& v, const char* what) {
  if (v.size() != 3) throw ConfigError(std::string(what) + " needs three coordinates x,y,z");
  return {v[0], v[1], v[2]};
}

struct LosCheckArgs {
  std::string terrain;
  std::vector<double> from, to;
  double epsilon = 1e-5;
  double k_o = 2.0;
  std::optional<double> oracle_step;
};

int los_check(const LosCheckArgs& a) {
  const TerrainModel model = load_terrain_file(a.terrain);
  const Point3 p1 = to_point(a.from, "--from");
  const Point3 p2 = to_point(a.to, "--to");
  if (!(a.epsilon > 0.0 && a.epsilon < 1.0)) throw ConfigError("--epsilon must lie in (0, 1)");
  const Bvh bvh(model, a.k_o);
  const LosResult r = los_query(bvh, model, {p1, p2, a.epsilon});
  json out = {{"visible", r.visible},
              {"terrain_evaluations", r.terrain_evaluations},
              {"kernel_evaluations", r.kernel_evaluations},
              {"intervals", r.intervals}};
  if (a.oracle_step) {
    if (!(*a.oracle_step > 0.0 && *a.oracle_step <= 1e-3))
      throw ConfigError("--oracle-step must lie in (0, 1e-3]");
    const LosResult o = los_dense_oracle(model, p1, p2, *a.oracle_step);
    out["oracle"] = {{"visible", o.visible}, {"terrain_evaluations", o.terrain_evaluations}};
    out["agree"] = o.visible == r.visible;
  }
  std::cout << dump_json(out);
  return 0;
}

struct OptimizeArgs {
  std::string scenario, config, out;
  std::uint64_t seed = 0;
  bool force = false;
};

int optimize_cmd(const OptimizeArgs& a) {
  const Scenario scenario = load_scenario(a.scenario);
  GaConfig ga;
  PsoConfig pso;
  if (!a.config.empty()) {
    const json c = read_json_file(a.config);
    if (c.contains("ga")) ga = ga_config_from_json(c["ga"]);
    if (c.contains("pso")) pso = pso_config_from_json(c["pso"]);
  }
  const Problem problem(scenario);
  const OptimizeResult res = optimize(problem, ga, pso, a.seed);

  RunRecord rec;
  rec.scheme = Scheme::ga_pso;
  rec.uavs = scenario.uav_count();
  rec.seed = a.seed;
  rec.run_seed = a.seed;
  rec.scenario_hash = scenario_hash(scenario);
  const FitnessReport& rep = res.trace.final_report;
  rec.p_sum = rep.p_sum;
  rec.e_avg_ex = rep.e_avg_ex;
  rec.fitness = rep.fitness;
  rec.violation = rep.violations.total();
  rec.feasible = rep.violations.feasible();
  rec.wall_seconds = res.trace.wall_seconds;

  const fs::path out = a.out;
  const RunRecord records[] = {rec};
  emit_report(records, out, a.force);
  write_text_file(out / "deployment.json",
                  dump_json({{"seed", a.seed},
                             {"scenario_hash", rec.scenario_hash},
                             {"deployment", deployment_to_json(res.deployment)},
                             {"ga_report", report_to_json(res.trace.ga_report)},
                             {"report", report_to_json(rep)},
                             {"evaluations", res.trace.evaluations}}));
  std::string trace = "stage,uav,step,fitness\n";
  char buf[64];
  for (std::size_t t = 0; t < res.trace.ga_best.size(); ++t) {
    std::snprintf(buf, sizeof buf, "ga,,%zu,%.17g\n", t, res.trace.ga_best[t]);
    trace += buf;
  }
  for (std::size_t m = 0; m < res.trace.pso_gbest.size(); ++m)
    for (std::size_t t = 0; t < res.trace.pso_gbest[m].size(); ++t) {
      std::snprintf(buf, sizeof buf, "pso,%zu,%zu,%.17g\n", m % rec.uavs, t,
                    res.trace.pso_gbest[m][t]);
      trace += buf;
    }
  write_text_file(out / "trace.csv", trace);
  std::cout << dump_json(report_to_json(rep));
  return 0;
}

struct BenchmarkArgs {
  std::string plan, out;
  std::optional<unsigned> workers;
  bool force = false;
};

int benchmark_cmd(const BenchmarkArgs& a) {
  const ExperimentPlan plan = load_plan(a.plan);
  const unsigned workers = resolve_workers(a.workers);
  const auto records = run_experiment(plan, workers);
  emit_report(records, a.out, a.force);
  std::size_t failed = 0;
  for (const auto& r : records)
    if (!r.ok()) {
      ++failed;
      std::cerr << "run failed: " << scheme_name(r.scheme) << " M=" << r.uavs << " run=" << r.run
                << ": " << r.error << "\n";
    }
  std::cerr << records.size() << " runs, " << failed << " failed, " << workers << " worker(s)\n";
  return 0;
}

struct FitArgs {
  std::string grid, out;
  std::size_t components = 50;
  std::uint64_t seed = 0;
  int max_rounds = 200;
  double cell_size = 1.0;
};

int fit_cmd(const FitArgs& a) {
  CsvGridOptions csv;
  csv.cell_size = a.cell_size;
  const HeightGrid grid = load_heightmap_file(a.grid, csv);
  FitConfig cfg;
  cfg.max_rounds = a.max_rounds;
  const FitResult fit = fit_gaussians(grid, a.components, cfg, a.seed);
  save_terrain_file(fit.model, a.out);
  std::cout << dump_json({{"components", fit.model.size()},
                          {"rmse", fit.rmse},
                          {"seeded_rmse", fit.seeded_rmse},
                          {"initial_rmse", fit.initial_rmse},
                          {"rounds", fit.history.size()}});
  return 0;
}

int report_cmd(const std::string& in, const std::string& format) {
  const auto records = read_runs_csv(fs::path(in) / "runs.csv");
  if (records.empty()) throw ConfigError("no records in " + in);
  if (format == "json")
    std::cout << dump_json(summarize(records));
  else
    std::cout << curves_csv(records);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Terrain-aware UAV spectrum sensing deployment optimizer"};
  app.require_subcommand(1);

  LosCheckArgs los;
  auto* los_cmd = app.add_subcommand("los-check", "Adaptive line-of-sight query between two points");
  los_cmd->add_option("--terrain", los.terrain, "Terrain model JSON")->required();
  los_cmd->add_option("--from", los.from, "Start point x,y,z")->required()->delimiter(',')->expected(3);
  los_cmd->add_option("--to", los.to, "End point x,y,z")->required()->delimiter(',')->expected(3);
  los_cmd->add_option("--epsilon", los.epsilon, "Parameter-interval stopping width");
  los_cmd->add_option("--k-o", los.k_o, "Bounding-box scale in standard deviations");
  los_cmd->add_option("--oracle-step", los.oracle_step, "Also run the dense oracle with this step");

  OptimizeArgs opt;
  auto* opt_cmd = app.add_subcommand("optimize", "GA + PSO deployment optimization");
  opt_cmd->add_option("--scenario", opt.scenario, "Scenario JSON")->required();
  opt_cmd->add_option("--config", opt.config, "Optimizer config JSON with 'ga' and 'pso' blocks");
  opt_cmd->add_option("--seed", opt.seed, "Root seed");
  opt_cmd->add_option("--out", opt.out, "Output directory")->required();
  opt_cmd->add_flag("--force", opt.force, "Overwrite existing results");

  BenchmarkArgs bench;
  auto* bench_cmd = app.add_subcommand("benchmark", "Monte Carlo comparison of deployment schemes");
  bench_cmd->add_option("--plan", bench.plan, "Experiment plan JSON")->required();
  bench_cmd->add_option("--out", bench.out, "Output directory")->required();
  bench_cmd->add_option("--workers", bench.workers, "Concurrent runs (TERRADEPLOY_WORKERS overrides)");
  bench_cmd->add_flag("--force", bench.force, "Overwrite existing results");

  FitArgs fit;
  auto* fit_sub = app.add_subcommand("fit-terrain", "Fit a Gaussian mixture to a heightmap");
  fit_sub->add_option("--grid", fit.grid, "ESRI ASCII (.asc) or CSV heightmap")->required();
  fit_sub->add_option("--components", fit.components, "Number of Gaussian components");
  fit_sub->add_option("--out", fit.out, "Output terrain model JSON")->required();
  fit_sub->add_option("--seed", fit.seed, "Seed for the refinement order");
  fit_sub->add_option("--max-rounds", fit.max_rounds, "Refinement rounds");
  fit_sub->add_option("--cell-size", fit.cell_size, "Cell size for CSV grids");

  std::string report_in, report_format = "csv";
  auto* report_sub = app.add_subcommand("report", "Summarize an existing results directory");
  report_sub->add_option("--in", report_in, "Results directory holding runs.csv")->required();
  report_sub->add_option("--format", report_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*los_cmd) return los_check(los);
    if (*opt_cmd) return optimize_cmd(opt);
    if (*bench_cmd) return benchmark_cmd(bench);
    if (*fit_sub) return fit_cmd(fit);
    if (*report_sub) return report_cmd(report_in, report_format);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const HeightmapError& e) {
    std::cerr << "heightmap error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitConfig;
}
