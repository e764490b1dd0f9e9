#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "terradeploy/optimizer.hpp"
#include "terradeploy/scenario.hpp"

namespace terradeploy {

enum class Scheme { ga_pso, pso_only, non_optimized };

std::string_view scheme_name(Scheme s);
/// Throws ConfigError on an unknown name.
Scheme parse_scheme(std::string_view name);

/// How target positions are chosen for each run. Randomized targets keep the
/// template's channels and transmit power, are drawn uniformly in `box` at
/// `altitude_agl` above the terrain, and are rejected until at least S_min
/// (horizontally) from the deployable region.
struct TargetPlacement {
  bool randomized = false;
  Aabb2 box;
  double altitude_agl = 0.0;
  int max_attempts = 10000;
};

struct ExperimentPlan {
  /// Template scenario: terrain, targets, physics, constraints and weights.
  Scenario scenario;
  std::vector<Scheme> schemes{Scheme::ga_pso, Scheme::pso_only, Scheme::non_optimized};
  std::vector<std::size_t> uav_counts{2};
  int runs = 1;
  TargetPlacement placement;
  std::uint64_t root_seed = 0;
  GaConfig ga;
  PsoConfig pso;
  /// UAV bands per fleet size. Missing sizes fall back to the template's
  /// bands when the count matches, otherwise the span of all target
  /// channels split into equal contiguous bands.
  std::map<std::size_t, std::vector<Band>> bands;

  void validate() const;
  std::size_t record_count() const { return schemes.size() * uav_counts.size() * runs; }
};

struct RunRecord {
  Scheme scheme = Scheme::ga_pso;
  std::size_t uavs = 0;  // M
  int run = 0;
  /// Shared by all schemes of one (M, run) cell; drives target placement.
  std::uint64_t run_seed = 0;
  /// Drives the scheme's own randomness; disjoint across schemes.
  std::uint64_t seed = 0;
  std::string scenario_hash;
  double p_sum = 0.0;
  double e_avg_ex = 0.0;
  double fitness = 0.0;
  double violation = 0.0;
  bool feasible = false;
  /// Empty for a successful run, otherwise the failure diagnostic.
  std::string error;
  /// Not written to runs.csv (it would break byte-identical reruns).
  double wall_seconds = 0.0;

  bool ok() const { return error.empty(); }
  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

std::uint64_t run_seed(std::uint64_t root, std::size_t uavs, int run);
std::uint64_t scheme_seed(std::uint64_t root, Scheme scheme, std::size_t uavs, int run);

/// The concrete scenario for one (M, run) cell.
Scenario instantiate(const ExperimentPlan& plan, std::size_t uavs, int run);

/// Executes a single scheme on a concrete scenario.
RunRecord run_scheme(const ExperimentPlan& plan, const Scenario& scenario, Scheme scheme,
                     std::size_t uavs, int run);

/// Records in plan order (M-major, then run, then scheme), independent of the
/// number of workers. Failed runs are recorded with their diagnostic.
std::vector<RunRecord> run_experiment(const ExperimentPlan& plan, unsigned workers = 1);

struct ConfidenceInterval {
  double mean = 0.0;
  double half_width = 0.0;
};

/// Student-t interval mean +- t_{n-1,(1+level)/2} s / sqrt(n).
ConfidenceInterval confidence_interval(std::span<const double> samples, double level = 0.95);

double median(std::vector<double> samples);

/// Per scheme x M statistics of the successful runs.
nlohmann::json summarize(std::span<const RunRecord> records);
std::string curves_csv(std::span<const RunRecord> records);
std::string runs_csv(std::span<const RunRecord> records);
std::vector<RunRecord> parse_runs_csv(std::string_view text);
std::vector<RunRecord> read_runs_csv(const std::filesystem::path& path);

/// Writes runs.csv, summary.json, curves.csv and timings.csv into out_dir.
/// Refuses to overwrite an existing runs.csv unless `force` is set.
void emit_report(std::span<const RunRecord> records, const std::filesystem::path& out_dir,
                 bool force = false);

/// Canonical JSON text (two-space indent, trailing newline).
std::string dump_json(const nlohmann::json& j);
void write_text_file(const std::filesystem::path& path, std::string_view text);

GaConfig ga_config_from_json(const nlohmann::json& j);
PsoConfig pso_config_from_json(const nlohmann::json& j);
nlohmann::json ga_config_to_json(const GaConfig& c);
nlohmann::json pso_config_to_json(const PsoConfig& c);

ExperimentPlan plan_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ExperimentPlan load_plan(const std::filesystem::path& path);

nlohmann::json deployment_to_json(const Deployment& d);
nlohmann::json report_to_json(const FitnessReport& r);

/// Worker count from TERRADEPLOY_WORKERS if set (and valid), else `fallback`.
unsigned resolve_workers(std::optional<unsigned> requested);

}  // namespace terradeploy
