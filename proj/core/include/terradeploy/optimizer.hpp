#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "terradeploy/deploy.hpp"
#include "terradeploy/rng.hpp"

namespace terradeploy {

struct GaConfig {
  enum class Offspring { pair, full };

  int population = 50;            // N_g
  int generations = 100;          // T_g
  double mutation_prob = 0.1;     // p_mut
  /// Per-gene mutation half-widths [x, y, z, eta, zeta]; defaults to 10% of
  /// the search box when unset.
  std::optional<std::array<double, kGenesPerUav>> mutation_width;
  int elites = 5;                 // mu_elite
  int tournament = 4;             // l
  /// pair: one tournament and two children per generation. full: N_g / 2
  /// tournaments per generation.
  Offspring offspring = Offspring::pair;

  void validate() const;
};

struct PsoConfig {
  int particles = 30;   // N_p
  int iterations = 50;  // T_p
  double w_max = 0.7;
  double w_min = 0.4;
  double c1 = 1.5;
  double c2 = 2.0;
  /// Initial velocities ~ U(-f range, f range) per gene.
  double init_velocity_fraction = 0.1;
  /// Sweeps over the UAVs; 1 refines each UAV once in index order.
  int passes = 1;

  void validate() const;
  double inertia(int t) const { return w_max - (w_max - w_min) / iterations * t; }
};

struct OptTrace {
  std::uint64_t seed = 0;
  /// Best fitness after initialisation and after every generation.
  std::vector<double> ga_best;
  /// gbest fitness per refined UAV (pass-major), initial value plus one per iteration.
  std::vector<std::vector<double>> pso_gbest;
  FitnessReport ga_report;
  FitnessReport final_report;
  std::size_t evaluations = 0;
  double wall_seconds = 0.0;
};

struct StageResult {
  Deployment deployment;
  FitnessReport report;
  std::vector<double> ga_best;
  std::vector<std::vector<double>> pso_gbest;
  std::size_t evaluations = 0;
};

/// Uniform crossover: gene j comes from a when u_j < 0.5, from b otherwise;
/// the second child takes the opposite choice.
std::pair<std::vector<double>, std::vector<double>> uniform_crossover(
    std::span<const double> a, std::span<const double> b, RandomStream& rng);

/// Adds U(-width_j, width_j) to each gene with probability p. `width` is
/// indexed by gene position modulo its size.
void mutate(std::span<double> genes, std::span<const double> width, double p, RandomStream& rng);

/// Picks l distinct members uniformly and returns the indices of the best two
/// (fitness descending, lower index on ties).
std::pair<std::size_t, std::size_t> tournament_select(std::span<const double> fitness,
                                                      std::size_t l, RandomStream& rng);

/// v <- w v + c1 r1 (pbest - s) + c2 r2 (gbest - s), in place.
void pso_velocity(std::span<double> v, std::span<const double> s, std::span<const double> pbest,
                  std::span<const double> gbest, double w, double c1, double c2, double r1,
                  double r2);

StageResult ga_stage(const Problem& problem, const GaConfig& ga, std::uint64_t seed);

/// Per-UAV refinement from a feasible start; every other UAV stays fixed at
/// its current best state while one UAV is refined.
StageResult pso_stage(const Problem& problem, const Deployment& start, const PsoConfig& pso,
                      std::uint64_t seed);

struct OptimizeResult {
  Deployment deployment;
  OptTrace trace;
};

OptimizeResult optimize(const Problem& problem, const GaConfig& ga, const PsoConfig& pso,
                        std::uint64_t seed);

struct BaselineResult {
  Deployment deployment;
  FitnessReport report;
  /// False when some UAV could not see all of its assigned targets by H_max.
  bool los_reached = true;
  /// Fitness after altitude placement, then after every coordinate sweep.
  std::vector<double> sweep_fitness;
};

/// Indices of the targets a UAV band can sense.
std::vector<std::size_t> assigned_targets(const Scenario& s, std::size_t uav);

/// Place near the assigned targets at the safety floor, climb in 10 m steps
/// until every assigned target is visible, then 3 cyclic golden-section
/// sweeps over (eta, zeta).
BaselineResult baseline_non_optimized(const Problem& problem);

OptimizeResult baseline_pso_only(const Problem& problem, const PsoConfig& pso, std::uint64_t seed);

}  // namespace terradeploy
