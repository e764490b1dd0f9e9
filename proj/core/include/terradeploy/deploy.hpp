#pragma once

#include <array>
#include <span>
#include <vector>

#include "terradeploy/los.hpp"
#include "terradeploy/rng.hpp"
#include "terradeploy/scenario.hpp"
#include "terradeploy/sensing.hpp"

namespace terradeploy {

/// M UAV states. The decision vector is [x, y, z, eta, zeta] per UAV; the
/// sensing band of each UAV is fixed by the scenario.
struct Deployment {
  std::vector<UavState> uavs;

  std::size_t size() const { return uavs.size(); }
  friend bool operator==(const Deployment&, const Deployment&) = default;
};

inline constexpr std::size_t kGenesPerUav = 5;

std::vector<double> to_genes(const Deployment& d);
/// Overwrites positions and angles from a flat gene vector; bands untouched.
void assign_genes(Deployment& d, std::span<const double> genes);
std::array<double, kGenesPerUav> uav_genes(const UavState& u);
void assign_uav_genes(UavState& u, std::span<const double, kGenesPerUav> g);

/// Constraint deficits in metres / radians, indexed region, target
/// separation, UAV separation, orientation, altitude.
struct Violations {
  enum Index { region = 0, target_separation, uav_separation, orientation, altitude };
  std::array<double, 5> measures{};

  double operator[](std::size_t i) const { return measures[i]; }
  double total() const;
  bool feasible() const { return total() == 0.0; }
};

struct FitnessReport {
  double p_sum = 0.0;
  double e_avg_ex = 0.0;
  Violations violations;
  double fitness = 0.0;
};

Violations violations(const Deployment& d, std::span<const Target> targets,
                      const ConstraintBounds& cb, const TerrainModel& terrain);

struct RepairResult {
  Deployment deployment;
  bool converged = true;
  int rounds = 0;
  Violations residual;
};

/// Projects a deployment toward the feasible set: wrap azimuths, clamp
/// elevation angles, clamp into the region, clamp altitude into
/// [terrain + H_safe, H_max], then up to 50 rounds of displacement along
/// offending segments for the separation constraints. `movable` (when not
/// empty) restricts which UAVs may be displaced by the separation step.
RepairResult repair(const Deployment& d, std::span<const Target> targets,
                    const ConstraintBounds& cb, const TerrainModel& terrain,
                    std::span<const bool> movable = {});

inline constexpr int kRepairRounds = 50;

/// Scenario plus its BVH; the evaluation entry point used by the optimizers.
class Problem {
 public:
  explicit Problem(Scenario scenario);

  const Scenario& scenario() const { return scenario_; }
  const Bvh& bvh() const { return bvh_; }
  SensingContext sensing() const;
  std::size_t uav_count() const { return scenario_.uav_count(); }

  /// Deployment with the scenario's bands and all states zeroed.
  Deployment blank_deployment() const;

  Violations violations(const Deployment& d) const;
  RepairResult repair(const Deployment& d, std::span<const bool> movable = {}) const;

  /// Terms of the objective that depend on a single UAV.
  struct UavTerms {
    std::vector<double> link;  // in-band probability per target, 0 if no channel overlaps
    double excess_energy = 0.0;
  };
  UavTerms uav_terms(const UavState& u) const;
  FitnessReport combine(const Deployment& d, std::span<const UavTerms> terms) const;

  FitnessReport evaluate(const Deployment& d) const;

  /// Per-UAV search box: x, y from the region, z from the lowest safe floor to
  /// H_max, eta over [-pi, pi], zeta over [-pi/2, pi/2].
  std::array<double, kGenesPerUav> gene_lower() const;
  std::array<double, kGenesPerUav> gene_upper() const;

  /// Uniform state inside the box with z drawn in [terrain + H_safe, H_max].
  UavState random_uav(std::size_t index, RandomStream& rng) const;
  Deployment random_deployment(RandomStream& rng) const;

 private:
  Scenario scenario_;
  Bvh bvh_;
};

/// lambda_S P_sum - lambda_E E_avg,ex - lambda_pen sum(violations).
double scalarize(const FitnessWeights& w, double p_sum, double e_avg_ex, const Violations& v);

FitnessReport fitness(const Deployment& d, const Scenario& scenario, const FitnessWeights& fw,
                      const SensingContext& ctx);

}  // namespace terradeploy
