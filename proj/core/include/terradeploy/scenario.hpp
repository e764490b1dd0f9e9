#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "terradeploy/energy.hpp"
#include "terradeploy/geometry.hpp"
#include "terradeploy/sensing.hpp"
#include "terradeploy/terrain.hpp"

namespace terradeploy {

/// Constraint set of the deployment problem: region D, UAV-target separation
/// S_min, UAV-UAV separation R_min and the altitude window.
struct ConstraintBounds {
  Aabb2 region{0.0, 1750.0, 0.0, 5000.0};
  double s_min = 500.0;
  double r_min = 200.0;
  double h_safe = 50.0;
  double h_max = 6000.0;

  void validate() const;
};

struct FitnessWeights {
  double lambda_s = 2.0;
  double lambda_e = 5e-3;
  double lambda_pen = 1e6;

  void validate() const;
};

/// Everything a deployment is evaluated against.
struct Scenario {
  TerrainModel terrain;
  double bvh_scale = 2.0;  // k_o
  double los_epsilon = 1e-5;
  std::vector<Target> targets;
  std::vector<Band> uav_bands;  // one per UAV
  EbdParams ebd;
  AntennaParams antenna = AntennaParams::from_degrees(15.0, 15.0);
  LinkBudget link;
  EnergyParams energy;
  ConstraintBounds bounds;
  FitnessWeights weights;

  std::size_t uav_count() const { return uav_bands.size(); }
  std::size_t channel_count() const;
  void validate() const;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_linear(double db);
double linear_to_db(double linear);

nlohmann::json terrain_to_json(const TerrainModel& model);
TerrainModel terrain_from_json(const nlohmann::json& j);
TerrainModel load_terrain_file(const std::filesystem::path& path);
void save_terrain_file(const TerrainModel& model, const std::filesystem::path& path);

/// Relative terrain paths are resolved against base_dir.
Scenario scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::filesystem::path& path);

/// Stable 64-bit digest (hex) of the canonical JSON form.
std::string scenario_hash(const Scenario& s);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace terradeploy
