#include "terradeploy/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

namespace terradeploy {

using nlohmann::json;

void ConstraintBounds::validate() const {
  if (region.empty() || !(region.width() > 0.0) || !(region.height() > 0.0))
    throw ConfigError("deployable region must be non-degenerate");
  if (!(s_min > 0.0 && r_min > 0.0 && h_safe > 0.0 && h_max > 0.0))
    throw ConfigError("constraint bounds must be positive");
}

void FitnessWeights::validate() const {
  if (!(lambda_s >= 0.0 && lambda_e >= 0.0 && lambda_pen >= 0.0))
    throw ConfigError("fitness weights must be non-negative");
}

std::size_t Scenario::channel_count() const {
  std::size_t n = 0;
  for (const auto& t : targets) n += t.channels.size();
  return n;
}

void Scenario::validate() const {
  try {
    if (targets.empty()) throw ConfigError("scenario needs at least one target");
    if (uav_bands.empty()) throw ConfigError("scenario needs at least one UAV band");
    for (const auto& t : targets) t.validate();
    for (const auto& b : uav_bands)
      if (!(b.f_min < b.f_max)) throw ConfigError("UAV band needs f_min < f_max");
    ebd.validate();
    antenna.validate();
    energy.validate();
    bounds.validate();
    weights.validate();
    if (!(bvh_scale > 0.0)) throw ConfigError("k_o must be positive");
    if (!(los_epsilon > 0.0 && los_epsilon < 1.0)) throw ConfigError("LoS epsilon must lie in (0, 1)");
    if (!(link.ref_gain > 0.0 && link.elements > 0.0 && link.noise_w > 0.0))
      throw ConfigError("link budget constants must be positive");
    if (energy.safe_altitude_m != bounds.h_safe)
      throw ConfigError("energy and constraint safety altitudes differ");
    // Hover energy is finite only below the scale height above the lowest terrain.
    const double lowest = terrain.lower_bound();
    if (!(bounds.h_max - lowest < energy.scale_height_m))
      throw ConfigError("H_max reaches the atmospheric scale height above the terrain");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

double dbm_to_watts(double dbm) { return std::pow(10.0, dbm / 10.0) / 1000.0; }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts * 1000.0); }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

json terrain_to_json(const TerrainModel& model) {
  json comps = json::array();
  for (const auto& c : model.components())
    comps.push_back({{"h", c.height}, {"mux", c.mu_x}, {"muy", c.mu_y}, {"sigx", c.sigma_x},
                     {"sigy", c.sigma_y}});
  return {{"base", model.base()}, {"components", comps}};
}

TerrainModel terrain_from_json(const json& j) {
  try {
    if (j.contains("synthetic")) {
      const auto& s = j.at("synthetic");
      SyntheticTerrainSpec spec;
      spec.components = s.value("components", spec.components);
      spec.extent_x = s.value("extent_x", spec.extent_x);
      spec.extent_y = s.value("extent_y", spec.extent_y);
      spec.min_height = s.value("min_height", spec.min_height);
      spec.max_height = s.value("max_height", spec.max_height);
      spec.min_sigma = s.value("min_sigma", spec.min_sigma);
      spec.max_sigma = s.value("max_sigma", spec.max_sigma);
      spec.base = s.value("base", spec.base);
      return make_synthetic_terrain(spec, s.value("seed", std::uint64_t{0}));
    }
    std::vector<GaussianBump> bumps;
    for (const auto& c : j.value("components", json::array()))
      bumps.push_back({c.at("h").get<double>(), c.at("mux").get<double>(),
                       c.at("muy").get<double>(), c.at("sigx").get<double>(),
                       c.at("sigy").get<double>()});
    return TerrainModel(std::move(bumps), j.value("base", 0.0));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("terrain: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("terrain: ") + e.what());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("'" + path.string() + "': " + e.what());
  }
}

TerrainModel load_terrain_file(const std::filesystem::path& path) {
  return terrain_from_json(read_json_file(path));
}

void save_terrain_file(const TerrainModel& model, const std::filesystem::path& path) {
  // Written by hand so every number carries 17 significant digits.
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << "{\n  \"base\": " << num(model.base()) << ",\n  \"components\": [";
  const auto comps = model.components();
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const auto& c = comps[i];
    out << (i ? ",\n    " : "\n    ") << "{\"h\": " << num(c.height) << ", \"mux\": " << num(c.mu_x)
        << ", \"muy\": " << num(c.mu_y) << ", \"sigx\": " << num(c.sigma_x)
        << ", \"sigy\": " << num(c.sigma_y) << "}";
  }
  out << (comps.empty() ? "]\n}\n" : "\n  ]\n}\n");
}

Scenario scenario_from_json(const json& j, const std::filesystem::path& base_dir) {
  Scenario s;
  try {
    if (j.contains("terrain")) {
      const auto& t = j.at("terrain");
      if (t.is_string()) {
        std::filesystem::path p = t.get<std::string>();
        if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
        s.terrain = load_terrain_file(p);
      } else {
        s.terrain = terrain_from_json(t);
      }
    }
    if (j.contains("los")) {
      s.bvh_scale = j["los"].value("k_o", s.bvh_scale);
      s.los_epsilon = j["los"].value("epsilon", s.los_epsilon);
    }
    for (const auto& t : j.at("targets")) {
      Target tg;
      const auto pos = t.at("pos").get<std::vector<double>>();
      if (pos.size() == 2) {
        // Ground-relative placement: z = terrain + agl_m.
        tg.position = {pos[0], pos[1], s.terrain.elevation(pos[0], pos[1]) + t.value("agl_m", 0.0)};
      } else if (pos.size() == 3) {
        tg.position = {pos[0], pos[1], pos[2]};
      } else {
        throw ConfigError("target pos must be [x, y] or [x, y, z]");
      }
      tg.channels = t.at("channels").get<std::vector<double>>();
      tg.tx_power_w = dbm_to_watts(t.value("tx_power_dbm", 20.0));
      s.targets.push_back(std::move(tg));
    }
    for (const auto& b : j.at("uav_bands")) {
      const auto v = b.get<std::vector<double>>();
      if (v.size() != 2) throw ConfigError("UAV band must be [f_min, f_max]");
      s.uav_bands.push_back({v[0], v[1]});
    }
    if (j.contains("ebd")) {
      const auto& e = j["ebd"];
      s.ebd.samples = e.value("K", s.ebd.samples);
      s.ebd.false_alarm = e.value("P_fa", s.ebd.false_alarm);
      s.ebd.elements = e.value("L", s.ebd.elements);
    }
    if (j.contains("antenna")) {
      const auto& a = j["antenna"];
      s.antenna = AntennaParams::from_degrees(a.value("alpha_a_deg", 15.0), a.value("alpha_e_deg", 15.0));
    }
    if (j.contains("link")) {
      const auto& l = j["link"];
      s.link.ref_gain = db_to_linear(l.value("beta0_db", -20.0));
      s.link.elements = l.value("Nt", 7.0);
      s.link.noise_w = dbm_to_watts(l.value("noise_dbm", -80.0));
    }
    std::optional<double> energy_safe;
    if (j.contains("energy")) {
      const auto& e = j["energy"];
      s.energy.hover_power_w = e.value("P0_w", s.energy.hover_power_w);
      s.energy.scale_height_m = e.value("Hs_m", s.energy.scale_height_m);
      s.energy.hover_time_s = e.value("td_s", s.energy.hover_time_s);
      s.energy.exponent = e.value("exponent", s.energy.exponent);
      if (e.contains("Hsafe_m")) energy_safe = e["Hsafe_m"].get<double>();
    }
    if (j.contains("constraints")) {
      const auto& c = j["constraints"];
      if (c.contains("region")) {
        const auto r = c["region"].get<std::vector<double>>();
        if (r.size() != 4) throw ConfigError("region must be [xmin, xmax, ymin, ymax]");
        s.bounds.region = {r[0], r[1], r[2], r[3]};
      }
      s.bounds.s_min = c.value("Smin_m", s.bounds.s_min);
      s.bounds.r_min = c.value("Rmin_m", s.bounds.r_min);
      s.bounds.h_max = c.value("Hmax_m", s.bounds.h_max);
      if (c.contains("Hsafe_m")) {
        s.bounds.h_safe = c["Hsafe_m"].get<double>();
        if (energy_safe && *energy_safe != s.bounds.h_safe)
          throw ConfigError("energy.Hsafe_m and constraints.Hsafe_m differ");
      } else if (energy_safe) {
        s.bounds.h_safe = *energy_safe;
      }
    } else if (energy_safe) {
      s.bounds.h_safe = *energy_safe;
    }
    s.energy.safe_altitude_m = s.bounds.h_safe;
    if (j.contains("weights")) {
      const auto& w = j["weights"];
      s.weights.lambda_s = w.value("lambda_S", s.weights.lambda_s);
      s.weights.lambda_e = w.value("lambda_E", s.weights.lambda_e);
      s.weights.lambda_pen = w.value("lambda_pen", s.weights.lambda_pen);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("scenario: ") + e.what());
  }
  s.validate();
  return s;
}

json scenario_to_json(const Scenario& s) {
  json targets = json::array();
  for (const auto& t : s.targets)
    targets.push_back({{"pos", {t.position.x, t.position.y, t.position.z}},
                       {"channels", t.channels},
                       {"tx_power_dbm", watts_to_dbm(t.tx_power_w)}});
  json bands = json::array();
  for (const auto& b : s.uav_bands) bands.push_back({b.f_min, b.f_max});
  const auto& r = s.bounds.region;
  constexpr double kDeg = 180.0 / std::numbers::pi;
  return {
      {"terrain", terrain_to_json(s.terrain)},
      {"los", {{"k_o", s.bvh_scale}, {"epsilon", s.los_epsilon}}},
      {"targets", targets},
      {"uav_bands", bands},
      {"ebd", {{"K", s.ebd.samples}, {"P_fa", s.ebd.false_alarm}, {"L", s.ebd.elements}}},
      {"antenna",
       {{"alpha_a_deg", s.antenna.beamwidth_azimuth * kDeg},
        {"alpha_e_deg", s.antenna.beamwidth_elevation * kDeg}}},
      {"link",
       {{"beta0_db", linear_to_db(s.link.ref_gain)},
        {"Nt", s.link.elements},
        {"noise_dbm", watts_to_dbm(s.link.noise_w)}}},
      {"energy",
       {{"P0_w", s.energy.hover_power_w},
        {"Hs_m", s.energy.scale_height_m},
        {"td_s", s.energy.hover_time_s},
        {"Hsafe_m", s.energy.safe_altitude_m},
        {"exponent", s.energy.exponent}}},
      {"constraints",
       {{"region", {r.min_x, r.max_x, r.min_y, r.max_y}},
        {"Smin_m", s.bounds.s_min},
        {"Rmin_m", s.bounds.r_min},
        {"Hsafe_m", s.bounds.h_safe},
        {"Hmax_m", s.bounds.h_max}}},
      {"weights",
       {{"lambda_S", s.weights.lambda_s},
        {"lambda_E", s.weights.lambda_e},
        {"lambda_pen", s.weights.lambda_pen}}},
  };
}

Scenario load_scenario(const std::filesystem::path& path) {
  return scenario_from_json(read_json_file(path), path.parent_path());
}

std::string scenario_hash(const Scenario& s) {
  const std::string text = scenario_to_json(s).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace terradeploy
