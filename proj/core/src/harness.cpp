#include "terradeploy/harness.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/distributions/students_t.hpp>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <thread>

namespace terradeploy {

using nlohmann::json;

std::string_view scheme_name(Scheme s) {
  switch (s) {
    case Scheme::ga_pso: return "ga_pso";
    case Scheme::pso_only: return "pso_only";
    case Scheme::non_optimized: return "non_optimized";
  }
  return "unknown";
}

Scheme parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::ga_pso, Scheme::pso_only, Scheme::non_optimized})
    if (scheme_name(s) == name) return s;
  throw ConfigError("unknown scheme '" + std::string(name) + "'");
}

void ExperimentPlan::validate() const {
  if (runs < 1) throw ConfigError("plan needs runs >= 1");
  if (uav_counts.empty()) throw ConfigError("plan needs at least one UAV count");
  if (schemes.empty()) throw ConfigError("plan needs at least one scheme");
  for (std::size_t m : uav_counts)
    if (m == 0) throw ConfigError("UAV counts must be positive");
  if (placement.randomized) {
    if (placement.box.empty() || !(placement.box.width() >= 0.0))
      throw ConfigError("random target box must be non-empty");
    if (placement.max_attempts < 1) throw ConfigError("placement needs max_attempts >= 1");
  }
  for (const auto& [m, b] : bands)
    if (b.size() != m) throw ConfigError("band list for M=" + std::to_string(m) + " has wrong size");
  try {
    ga.validate();
    pso.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::uint64_t run_seed(std::uint64_t root, std::size_t uavs, int run) {
  return derive_seed(root, "run:" + std::to_string(uavs) + ":" + std::to_string(run));
}

std::uint64_t scheme_seed(std::uint64_t root, Scheme scheme, std::size_t uavs, int run) {
  return derive_seed(root, "scheme:" + std::string(scheme_name(scheme)) + ":" +
                               std::to_string(uavs) + ":" + std::to_string(run));
}

namespace {

std::vector<Band> bands_for(const ExperimentPlan& plan, std::size_t uavs) {
  if (auto it = plan.bands.find(uavs); it != plan.bands.end()) return it->second;
  const Scenario& s = plan.scenario;
  if (s.uav_bands.size() == uavs) return s.uav_bands;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& t : s.targets)
    for (double f : t.channels) {
      lo = std::min(lo, f);
      hi = std::max(hi, f);
    }
  // Widen by a hair so the extreme channels fall inside the open bands.
  const double pad = std::max(1e-9, 1e-9 * (hi - lo));
  lo -= pad;
  hi += pad;
  std::vector<Band> out;
  const double w = (hi - lo) / static_cast<double>(uavs);
  for (std::size_t m = 0; m < uavs; ++m)
    out.push_back({lo + w * static_cast<double>(m), m + 1 == uavs ? hi : lo + w * (m + 1.0)});
  return out;
}

}  // namespace

Scenario instantiate(const ExperimentPlan& plan, std::size_t uavs, int run) {
  Scenario s = plan.scenario;
  s.uav_bands = bands_for(plan, uavs);
  if (plan.placement.randomized) {
    const auto& box = plan.placement.box;
    RandomStream rng(run_seed(plan.root_seed, uavs, run), "targets");
    for (auto& t : s.targets) {
      int attempt = 0;
      for (;; ++attempt) {
        if (attempt >= plan.placement.max_attempts)
          throw ConfigError("could not place a target at least S_min from the region");
        const double x = rng.uniform(box.min_x, box.max_x);
        const double y = rng.uniform(box.min_y, box.max_y);
        if (s.bounds.region.distance_to(x, y) < s.bounds.s_min) continue;
        t.position = {x, y, s.terrain.elevation(x, y) + plan.placement.altitude_agl};
        break;
      }
    }
  }
  s.validate();
  return s;
}

RunRecord run_scheme(const ExperimentPlan& plan, const Scenario& scenario, Scheme scheme,
                     std::size_t uavs, int run) {
  RunRecord r;
  r.scheme = scheme;
  r.uavs = uavs;
  r.run = run;
  r.run_seed = run_seed(plan.root_seed, uavs, run);
  r.seed = scheme_seed(plan.root_seed, scheme, uavs, run);
  r.scenario_hash = scenario_hash(scenario);
  const auto t0 = std::chrono::steady_clock::now();
  const Problem problem(scenario);
  FitnessReport rep;
  switch (scheme) {
    case Scheme::ga_pso: rep = optimize(problem, plan.ga, plan.pso, r.seed).trace.final_report; break;
    case Scheme::pso_only: rep = baseline_pso_only(problem, plan.pso, r.seed).trace.final_report; break;
    case Scheme::non_optimized: rep = baseline_non_optimized(problem).report; break;
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.p_sum = rep.p_sum;
  r.e_avg_ex = rep.e_avg_ex;
  r.fitness = rep.fitness;
  r.violation = rep.violations.total();
  r.feasible = rep.violations.feasible();
  return r;
}

std::vector<RunRecord> run_experiment(const ExperimentPlan& plan, unsigned workers) {
  plan.validate();
  struct Cell {
    std::size_t uavs;
    int run;
  };
  std::vector<Cell> cells;
  for (std::size_t m : plan.uav_counts)
    for (int k = 0; k < plan.runs; ++k) cells.push_back({m, k});

  const std::size_t ns = plan.schemes.size();
  std::vector<RunRecord> records(cells.size() * ns);
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t job; (job = next.fetch_add(1)) < records.size();) {
      const Cell c = cells[job / ns];
      const Scheme scheme = plan.schemes[job % ns];
      RunRecord& r = records[job];
      try {
        const Scenario s = instantiate(plan, c.uavs, c.run);
        r = run_scheme(plan, s, scheme, c.uavs, c.run);
      } catch (const std::exception& e) {
        r = RunRecord{};
        r.scheme = scheme;
        r.uavs = c.uavs;
        r.run = c.run;
        r.run_seed = run_seed(plan.root_seed, c.uavs, c.run);
        r.seed = scheme_seed(plan.root_seed, scheme, c.uavs, c.run);
        r.p_sum = r.e_avg_ex = r.fitness = r.violation = std::numeric_limits<double>::quiet_NaN();
        r.error = e.what();
        if (r.error.empty()) r.error = "unknown failure";
      }
    }
  };

  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(records.size())));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
  }
  return records;
}

ConfidenceInterval confidence_interval(std::span<const double> samples, double level) {
  if (samples.size() < 2) throw std::invalid_argument("confidence interval needs >= 2 samples");
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("level must lie in (0, 1)");
  const double n = static_cast<double>(samples.size());
  const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : samples) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const boost::math::students_t dist(n - 1.0);
  const double t = boost::math::quantile(dist, 0.5 * (1.0 + level));
  return {mean, t * sd / std::sqrt(n)};
}

double median(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("median of an empty sample");
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  return n % 2 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
}

GaConfig ga_config_from_json(const json& j) {
  GaConfig c;
  try {
    c.population = j.value("N_g", c.population);
    c.generations = j.value("T_g", c.generations);
    c.mutation_prob = j.value("p_mut", c.mutation_prob);
    c.elites = j.value("mu_elite", c.elites);
    c.tournament = j.value("l", c.tournament);
    if (j.contains("delta")) {
      const auto v = j["delta"].get<std::vector<double>>();
      if (v.size() != kGenesPerUav) throw ConfigError("ga.delta must have five entries");
      std::array<double, kGenesPerUav> w{};
      std::copy(v.begin(), v.end(), w.begin());
      c.mutation_width = w;
    }
    const std::string mode = j.value("offspring", std::string("pair"));
    if (mode == "pair") c.offspring = GaConfig::Offspring::pair;
    else if (mode == "full") c.offspring = GaConfig::Offspring::full;
    else throw ConfigError("ga.offspring must be 'pair' or 'full'");
    c.validate();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("ga config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("ga config: ") + e.what());
  }
  return c;
}

PsoConfig pso_config_from_json(const json& j) {
  PsoConfig c;
  try {
    c.particles = j.value("N_p", c.particles);
    c.iterations = j.value("T_p", c.iterations);
    if (j.contains("w")) {
      const auto w = j["w"].get<std::vector<double>>();
      if (w.size() != 2) throw ConfigError("pso.w must be [w_max, w_min]");
      c.w_max = w[0];
      c.w_min = w[1];
    }
    if (j.contains("c")) {
      const auto v = j["c"].get<std::vector<double>>();
      if (v.size() != 2) throw ConfigError("pso.c must be [c1, c2]");
      c.c1 = v[0];
      c.c2 = v[1];
    }
    c.init_velocity_fraction = j.value("init_velocity_fraction", c.init_velocity_fraction);
    c.passes = j.value("passes", c.passes);
    c.validate();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("pso config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("pso config: ") + e.what());
  }
  return c;
}

json ga_config_to_json(const GaConfig& c) {
  json j = {{"N_g", c.population},
            {"T_g", c.generations},
            {"p_mut", c.mutation_prob},
            {"mu_elite", c.elites},
            {"l", c.tournament},
            {"offspring", c.offspring == GaConfig::Offspring::pair ? "pair" : "full"}};
  if (c.mutation_width) j["delta"] = *c.mutation_width;
  return j;
}

json pso_config_to_json(const PsoConfig& c) {
  return {{"N_p", c.particles},
          {"T_p", c.iterations},
          {"w", {c.w_max, c.w_min}},
          {"c", {c.c1, c.c2}},
          {"init_velocity_fraction", c.init_velocity_fraction},
          {"passes", c.passes}};
}

ExperimentPlan plan_from_json(const json& j, const std::filesystem::path& base_dir) {
  ExperimentPlan p;
  try {
    const auto& sj = j.at("scenario");
    if (sj.is_string()) {
      std::filesystem::path path = sj.get<std::string>();
      if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
      p.scenario = load_scenario(path);
    } else {
      p.scenario = scenario_from_json(sj, base_dir);
    }
    if (j.contains("schemes")) {
      p.schemes.clear();
      for (const auto& s : j["schemes"]) p.schemes.push_back(parse_scheme(s.get<std::string>()));
    }
    if (j.contains("uav_counts")) p.uav_counts = j["uav_counts"].get<std::vector<std::size_t>>();
    p.runs = j.value("runs", p.runs);
    p.root_seed = j.value("root_seed", p.root_seed);
    if (j.contains("targets")) {
      const auto& t = j["targets"];
      const std::string mode = t.value("placement", std::string("fixed"));
      if (mode == "uniform_random") {
        p.placement.randomized = true;
        const auto b = t.at("box").get<std::vector<double>>();
        if (b.size() != 4) throw ConfigError("targets.box must be [xmin, xmax, ymin, ymax]");
        p.placement.box = {b[0], b[1], b[2], b[3]};
        p.placement.altitude_agl = t.value("altitude_agl_m", 0.0);
        p.placement.max_attempts = t.value("max_attempts", p.placement.max_attempts);
      } else if (mode != "fixed") {
        throw ConfigError("targets.placement must be 'fixed' or 'uniform_random'");
      }
    }
    if (j.contains("bands")) {
      for (const auto& [key, list] : j["bands"].items()) {
        std::vector<Band> bands;
        for (const auto& b : list) {
          const auto v = b.get<std::vector<double>>();
          if (v.size() != 2 || !(v[0] < v[1])) throw ConfigError("band must be [f_min, f_max]");
          bands.push_back({v[0], v[1]});
        }
        p.bands[std::stoul(key)] = std::move(bands);
      }
    }
    if (j.contains("ga")) p.ga = ga_config_from_json(j["ga"]);
    if (j.contains("pso")) p.pso = pso_config_from_json(j["pso"]);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("plan: ") + e.what());
  } catch (const std::logic_error& e) {
    throw ConfigError(std::string("plan: ") + e.what());
  }
  p.validate();
  return p;
}

ExperimentPlan load_plan(const std::filesystem::path& path) {
  return plan_from_json(read_json_file(path), path.parent_path());
}

json deployment_to_json(const Deployment& d) {
  json uavs = json::array();
  for (const auto& u : d.uavs)
    uavs.push_back({{"pos", {u.position.x, u.position.y, u.position.z}},
                    {"eta", u.eta},
                    {"zeta", u.zeta},
                    {"band", {u.band.f_min, u.band.f_max}}});
  return {{"uavs", uavs}};
}

json report_to_json(const FitnessReport& r) {
  return {{"p_sum", r.p_sum},
          {"e_avg_ex", r.e_avg_ex},
          {"fitness", r.fitness},
          {"violations",
           {{"region", r.violations[Violations::region]},
            {"target_separation", r.violations[Violations::target_separation]},
            {"uav_separation", r.violations[Violations::uav_separation]},
            {"orientation", r.violations[Violations::orientation]},
            {"altitude", r.violations[Violations::altitude]}}},
          {"feasible", r.violations.feasible()}};
}

unsigned resolve_workers(std::optional<unsigned> requested) {
  if (const char* env = std::getenv("TERRADEPLOY_WORKERS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) throw ConfigError("TERRADEPLOY_WORKERS must be a positive integer");
    return static_cast<unsigned>(v);
  }
  if (requested) {
    if (*requested < 1) throw ConfigError("worker count must be positive");
    return *requested;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace terradeploy
