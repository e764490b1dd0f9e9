#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "terradeploy/harness.hpp"
#include "test_util.hpp"

using namespace terradeploy;
namespace fs = std::filesystem;

namespace {

ExperimentPlan tiny_plan() {
  ExperimentPlan plan;
  plan.scenario = testutil::two_target_scenario(TerrainModel({{300, 2300, 2500, 300, 800}}, 50.0));
  plan.ga.population = 8;
  plan.ga.generations = 4;
  plan.ga.elites = 2;
  plan.pso.particles = 4;
  plan.pso.iterations = 4;
  plan.root_seed = 77;
  return plan;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fresh_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("terradeploy_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST(ConfidenceInterval, ConstantSamplesHaveZeroWidth) {
  const std::vector<double> xs(10, 3.5);
  const auto ci = confidence_interval(xs);
  EXPECT_EQ(ci.mean, 3.5);
  EXPECT_EQ(ci.half_width, 0.0);
}

TEST(ConfidenceInterval, AlternatingSampleMatchesReference) {
  std::vector<double> xs;
  for (int i = 0; i < 100; ++i) xs.push_back(i % 2);
  const auto ci = confidence_interval(xs);
  EXPECT_DOUBLE_EQ(ci.mean, 0.5);
  EXPECT_NEAR(ci.half_width, oracle::kAlternatingHalfWidth, 1e-12);
  EXPECT_NEAR(ci.half_width, oracle::kT99_975 * oracle::kAlternatingSd / 10.0, 1e-12);
  const auto wide = confidence_interval(xs, 0.99);
  EXPECT_NEAR(wide.half_width, oracle::kT99_995 * oracle::kAlternatingSd / 10.0, 1e-12);
  EXPECT_GT(wide.half_width, ci.half_width);
}

TEST(ConfidenceInterval, QuantileAgreesWithQuadrature) {
  const std::vector<double> xs{1, 2, 3, 4, 5};
  const double sd = std::sqrt(2.5);
  const double t = oracle::student_t_quantile(0.975, 4.0);
  EXPECT_NEAR(t, oracle::kT4_975, 1e-9);
  EXPECT_NEAR(confidence_interval(xs).half_width, t * sd / std::sqrt(5.0), 1e-9);
}

TEST(ConfidenceInterval, RejectsTooFewSamples) {
  const std::vector<double> one{1.0};
  EXPECT_THROW(confidence_interval(one), std::invalid_argument);
  const std::vector<double> two{1.0, 2.0};
  EXPECT_THROW(confidence_interval(two, 1.0), std::invalid_argument);
}

TEST(Median, OddEvenAndEmpty) {
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 3, 2}), 2.5);
  EXPECT_THROW(median({}), std::invalid_argument);
}

TEST(Schemes, NamesRoundTrip) {
  for (auto s : {Scheme::ga_pso, Scheme::pso_only, Scheme::non_optimized})
    EXPECT_EQ(parse_scheme(scheme_name(s)), s);
  EXPECT_THROW(parse_scheme("annealing"), ConfigError);
}

TEST(Seeds, DistinctPerCellAndScheme) {
  EXPECT_NE(run_seed(1, 2, 0), run_seed(1, 2, 1));
  EXPECT_NE(run_seed(1, 2, 0), run_seed(1, 3, 0));
  EXPECT_NE(run_seed(1, 2, 0), run_seed(2, 2, 0));
  EXPECT_NE(scheme_seed(1, Scheme::ga_pso, 2, 0), scheme_seed(1, Scheme::pso_only, 2, 0));
  EXPECT_EQ(scheme_seed(5, Scheme::ga_pso, 2, 3), scheme_seed(5, Scheme::ga_pso, 2, 3));
}

TEST(Experiment, RecordOrderAndSharedCellData) {
  auto plan = tiny_plan();
  plan.uav_counts = {2, 3};
  plan.runs = 2;
  EXPECT_EQ(plan.record_count(), 12u);
  const auto recs = run_experiment(plan);
  ASSERT_EQ(recs.size(), 12u);
  std::size_t i = 0;
  for (std::size_t m : {2u, 3u})
    for (int k = 0; k < 2; ++k)
      for (auto s : plan.schemes) {
        const auto& r = recs[i++];
        EXPECT_EQ(r.uavs, m);
        EXPECT_EQ(r.run, k);
        EXPECT_EQ(r.scheme, s);
        EXPECT_TRUE(r.ok()) << r.error;
        EXPECT_EQ(r.run_seed, run_seed(77, m, k));
        EXPECT_EQ(r.seed, scheme_seed(77, s, m, k));
      }
  for (std::size_t c = 0; c < 12; c += 3) {
    EXPECT_EQ(recs[c].scenario_hash, recs[c + 1].scenario_hash);
    EXPECT_EQ(recs[c].scenario_hash, recs[c + 2].scenario_hash);
  }
}

TEST(Experiment, DeterministicAcrossWorkerCounts) {
  auto plan = tiny_plan();
  plan.runs = 3;
  plan.placement = {true, Aabb2{2500, 4500, 500, 4500}, 2.0};
  auto a = run_experiment(plan, 1);
  auto b = run_experiment(plan, 4);
  for (auto* v : {&a, &b})
    for (auto& r : *v) r.wall_seconds = 0.0;
  EXPECT_EQ(a, b);
  EXPECT_EQ(runs_csv(a), runs_csv(b));
}

TEST(Experiment, RandomTargetsRespectBoxAndSeparation) {
  auto plan = tiny_plan();
  plan.placement = {true, Aabb2{1800, 4500, 0, 5000}, 2.0};
  const auto& region = plan.scenario.bounds.region;
  for (int run = 0; run < 100; ++run) {
    const auto s = instantiate(plan, 2, run);
    for (const auto& t : s.targets) {
      EXPECT_TRUE(plan.placement.box.contains(t.position.x, t.position.y));
      EXPECT_GE(region.distance_to(t.position.x, t.position.y), plan.scenario.bounds.s_min);
      EXPECT_DOUBLE_EQ(t.position.z, s.terrain.elevation(t.position.x, t.position.y) + 2.0);
    }
  }
  EXPECT_NE(instantiate(plan, 2, 0).targets[0].position, instantiate(plan, 2, 1).targets[0].position);
}

TEST(Experiment, UnplaceableTargetsAreRecordedAsFailures) {
  auto plan = tiny_plan();
  plan.schemes = {Scheme::non_optimized};
  plan.placement = {true, Aabb2{0, 1000, 0, 1000}, 2.0, 50};
  const auto recs = run_experiment(plan);
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_FALSE(recs[0].ok());
  EXPECT_TRUE(std::isnan(recs[0].p_sum));
}

TEST(Experiment, DefaultBandsSplitChannelSpan) {
  auto plan = tiny_plan();
  const auto s = instantiate(plan, 4, 0);
  ASSERT_EQ(s.uav_bands.size(), 4u);
  EXPECT_LT(s.uav_bands.front().f_min, 105.0);
  EXPECT_GT(s.uav_bands.back().f_max, 345.0);
  EXPECT_NEAR(s.uav_bands[1].f_min, 165.0, 1e-6);
  EXPECT_EQ(s.uav_bands[1].f_min, s.uav_bands[0].f_max);
}

TEST(Report, RunsCsvRoundTrip) {
  auto recs = run_experiment(tiny_plan());
  RunRecord failed;
  failed.scheme = Scheme::pso_only;
  failed.uavs = 5;
  failed.run = 9;
  failed.p_sum = failed.e_avg_ex = failed.fitness = failed.violation = std::nan("");
  failed.error = "boom, \"quoted\"";
  recs.push_back(failed);
  for (auto& r : recs) r.wall_seconds = 0.0;
  const auto text = runs_csv(recs);
  const auto back = parse_runs_csv(text);
  ASSERT_EQ(back.size(), recs.size());
  for (std::size_t i = 0; i + 1 < recs.size(); ++i) EXPECT_EQ(back[i], recs[i]) << i;
  EXPECT_EQ(back.back().error, failed.error);
  EXPECT_TRUE(std::isnan(back.back().fitness));
  EXPECT_EQ(runs_csv(back), text);
}

TEST(Report, SummaryStatistics) {
  std::vector<RunRecord> recs;
  for (int k = 0; k < 4; ++k) {
    RunRecord r;
    r.scheme = Scheme::ga_pso;
    r.uavs = 2;
    r.run = k;
    r.p_sum = k;
    r.e_avg_ex = 10.0 * k;
    r.fitness = 2.0 * k;
    r.feasible = k != 3;
    recs.push_back(r);
  }
  RunRecord bad = recs.front();
  bad.run = 4;
  bad.error = "x";
  recs.push_back(bad);
  RunRecord single = recs.front();
  single.scheme = Scheme::non_optimized;
  recs.push_back(single);

  const auto j = summarize(recs);
  EXPECT_EQ(j["confidence_level"], 0.95);
  ASSERT_EQ(j["groups"].size(), 2u);
  const auto& g = j["groups"][0];
  EXPECT_EQ(g["scheme"], "ga_pso");
  EXPECT_EQ(g["M"], 2);
  EXPECT_EQ(g["runs"], 5);
  EXPECT_EQ(g["succeeded"], 4);
  EXPECT_EQ(g["feasible"], 3);
  EXPECT_DOUBLE_EQ(g["p_sum"]["mean"].get<double>(), 1.5);
  EXPECT_DOUBLE_EQ(g["p_sum"]["median"].get<double>(), 1.5);
  const std::vector<double> ps{0, 1, 2, 3};
  EXPECT_NEAR(g["p_sum"]["ci95"].get<double>(), confidence_interval(ps).half_width, 1e-15);
  EXPECT_TRUE(j["groups"][1]["p_sum"]["ci95"].is_null());
}

TEST(Report, EmitIsByteIdenticalAndGuardsOverwrite) {
  const auto recs = run_experiment(tiny_plan());
  const auto dir = fresh_dir("emit");
  emit_report(recs, dir);
  for (const char* f : {"runs.csv", "summary.json", "curves.csv", "timings.csv"})
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  const auto first = slurp(dir / "runs.csv");
  const auto summary = slurp(dir / "summary.json");
  EXPECT_THROW(emit_report(recs, dir), std::runtime_error);
  emit_report(recs, dir, true);
  EXPECT_EQ(slurp(dir / "runs.csv"), first);
  EXPECT_EQ(slurp(dir / "summary.json"), summary);
  EXPECT_EQ(read_runs_csv(dir / "runs.csv").size(), recs.size());
  fs::remove_all(dir);
}

TEST(Report, CurvesCsvHeader) {
  const auto recs = run_experiment(tiny_plan());
  const auto text = curves_csv(recs);
  EXPECT_EQ(text.substr(0, text.find('\n')), "scheme,M,metric,mean,ci");
}

TEST(PlanJson, ParsesConfigsAndRejectsBadInput) {
  const auto ga = ga_config_from_json(
      {{"N_g", 20}, {"T_g", 7}, {"p_mut", 0.2}, {"mu_elite", 3}, {"l", 5}, {"offspring", "full"}});
  EXPECT_EQ(ga.population, 20);
  EXPECT_EQ(ga.generations, 7);
  EXPECT_EQ(ga.offspring, GaConfig::Offspring::full);
  EXPECT_EQ(ga_config_from_json(ga_config_to_json(ga)).tournament, 5);
  EXPECT_THROW(ga_config_from_json({{"offspring", "some"}}), ConfigError);
  EXPECT_THROW(ga_config_from_json({{"N_g", 1}}), ConfigError);
  const auto pso = pso_config_from_json({{"N_p", 9}, {"w", {0.9, 0.3}}, {"c", {1.0, 1.0}}});
  EXPECT_EQ(pso.particles, 9);
  EXPECT_EQ(pso.w_min, 0.3);
  EXPECT_THROW(pso_config_from_json({{"w", {0.9}}}), ConfigError);
}

TEST(PlanJson, LoadsShippedPlan) {
  const auto plan = load_plan(fs::path(TERRADEPLOY_CONFIG_DIR) / "plan_small.json");
  EXPECT_EQ(plan.uav_counts, (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(plan.runs, 5);
  EXPECT_TRUE(plan.placement.randomized);
  EXPECT_EQ(plan.bands.at(3).size(), 3u);
  EXPECT_EQ(plan.scenario.targets.size(), 2u);
  EXPECT_THROW(plan_from_json({{"scenario", 5}}), ConfigError);
}

TEST(Workers, EnvironmentOverridesRequest) {
  ::unsetenv("TERRADEPLOY_WORKERS");
  EXPECT_EQ(resolve_workers(3u), 3u);
  EXPECT_GE(resolve_workers(std::nullopt), 1u);
  ::setenv("TERRADEPLOY_WORKERS", "2", 1);
  EXPECT_EQ(resolve_workers(7u), 2u);
  ::setenv("TERRADEPLOY_WORKERS", "zero", 1);
  EXPECT_THROW(resolve_workers(1u), ConfigError);
  ::unsetenv("TERRADEPLOY_WORKERS");
  EXPECT_THROW(resolve_workers(0u), ConfigError);
}
