#include "terradeploy/deploy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "terradeploy/energy.hpp"

namespace terradeploy {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;
// Separation pushes overshoot by this much so the deficit is exactly zero
// afterwards despite rounding.
constexpr double kSeparationSlack = 1e-6;
}  // namespace

std::array<double, kGenesPerUav> uav_genes(const UavState& u) {
  return {u.position.x, u.position.y, u.position.z, u.eta, u.zeta};
}

void assign_uav_genes(UavState& u, std::span<const double, kGenesPerUav> g) {
  u.position = {g[0], g[1], g[2]};
  u.eta = g[3];
  u.zeta = g[4];
}

std::vector<double> to_genes(const Deployment& d) {
  std::vector<double> g;
  g.reserve(d.size() * kGenesPerUav);
  for (const auto& u : d.uavs) {
    const auto a = uav_genes(u);
    g.insert(g.end(), a.begin(), a.end());
  }
  return g;
}

void assign_genes(Deployment& d, std::span<const double> genes) {
  if (genes.size() != d.size() * kGenesPerUav)
    throw std::invalid_argument("assign_genes: gene vector length mismatch");
  for (std::size_t m = 0; m < d.size(); ++m)
    assign_uav_genes(d.uavs[m], genes.subspan(m * kGenesPerUav).first<kGenesPerUav>());
}

double Violations::total() const {
  return std::accumulate(measures.begin(), measures.end(), 0.0);
}

Violations violations(const Deployment& d, std::span<const Target> targets,
                      const ConstraintBounds& cb, const TerrainModel& terrain) {
  Violations v;
  auto& out = v.measures;
  for (std::size_t m = 0; m < d.size(); ++m) {
    const auto& u = d.uavs[m];
    const auto& p = u.position;
    out[Violations::region] += cb.region.distance_to(p.x, p.y);
    for (const auto& t : targets)
      out[Violations::target_separation] += std::max(0.0, cb.s_min - distance(p, t.position));
    for (std::size_t l = m + 1; l < d.size(); ++l)
      out[Violations::uav_separation] += std::max(0.0, cb.r_min - distance(p, d.uavs[l].position));
    out[Violations::orientation] +=
        std::max(0.0, std::abs(u.eta) - kPi) + std::max(0.0, std::abs(u.zeta) - kHalfPi);
    const double floor = terrain.elevation(p.x, p.y) + cb.h_safe;
    out[Violations::altitude] += std::max(0.0, floor - p.z) + std::max(0.0, p.z - cb.h_max);
  }
  return v;
}

namespace {

void project_boxes(UavState& u, const ConstraintBounds& cb, const TerrainModel& terrain) {
  if (u.eta < -kPi || u.eta > kPi) u.eta = wrap_angle(u.eta);
  u.zeta = std::clamp(u.zeta, -kHalfPi, kHalfPi);
  auto& p = u.position;
  p.x = std::clamp(p.x, cb.region.min_x, cb.region.max_x);
  p.y = std::clamp(p.y, cb.region.min_y, cb.region.max_y);
  const double floor = terrain.elevation(p.x, p.y) + cb.h_safe;
  // The safety floor wins when it lies above H_max; the altitude measure then
  // reports the excess.
  p.z = std::max(std::min(p.z, cb.h_max), floor);
}

void push(Point3& p, double dx, double dy, double dz, double amount) {
  const double len = std::sqrt(dx * dx + dy * dy + dz * dz);
  p.x += amount * dx / len;
  p.y += amount * dy / len;
  p.z += amount * dz / len;
}

}  // namespace

RepairResult repair(const Deployment& d, std::span<const Target> targets,
                    const ConstraintBounds& cb, const TerrainModel& terrain,
                    std::span<const bool> movable) {
  if (!movable.empty() && movable.size() != d.size())
    throw std::invalid_argument("repair: movable mask size mismatch");
  const auto can_move = [&](std::size_t m) { return movable.empty() || movable[m]; };

  RepairResult r{d, true, 0, {}};
  auto& uavs = r.deployment.uavs;
  for (std::size_t m = 0; m < uavs.size(); ++m)
    if (can_move(m)) project_boxes(uavs[m], cb, terrain);

  const auto separated = [&] {
    const auto v = violations(r.deployment, targets, cb, terrain);
    return v[Violations::target_separation] == 0.0 && v[Violations::uav_separation] == 0.0;
  };

  while (!separated()) {
    if (r.rounds == kRepairRounds) {
      r.converged = false;
      break;
    }
    ++r.rounds;
    for (std::size_t m = 0; m < uavs.size(); ++m) {
      if (!can_move(m)) continue;
      for (const auto& t : targets) {
        auto& p = uavs[m].position;
        const double gap = distance(p, t.position);
        if (gap >= cb.s_min) continue;
        const double need = cb.s_min - gap + kSeparationSlack;
        if (gap == 0.0) push(p, 0.0, 0.0, 1.0, need);
        else push(p, p.x - t.position.x, p.y - t.position.y, p.z - t.position.z, need);
      }
    }
    for (std::size_t m = 0; m < uavs.size(); ++m) {
      for (std::size_t l = m + 1; l < uavs.size(); ++l) {
        const bool mm = can_move(m), ml = can_move(l);
        if (!mm && !ml) continue;
        auto& a = uavs[m].position;
        auto& b = uavs[l].position;
        const double gap = distance(a, b);
        if (gap >= cb.r_min) continue;
        const double need = cb.r_min - gap + kSeparationSlack;
        const double share_a = mm && ml ? 0.5 * need : (mm ? need : 0.0);
        const double share_b = need - share_a;
        double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
        if (gap == 0.0) {
          dx = 1.0;
          dy = dz = 0.0;
        }
        if (share_a > 0.0) push(a, dx, dy, dz, share_a);
        if (share_b > 0.0) push(b, -dx, -dy, -dz, share_b);
      }
    }
    for (std::size_t m = 0; m < uavs.size(); ++m)
      if (can_move(m)) project_boxes(uavs[m], cb, terrain);
  }
  r.residual = violations(r.deployment, targets, cb, terrain);
  if (!r.residual.feasible()) r.converged = false;
  return r;
}

double scalarize(const FitnessWeights& w, double p_sum, double e_avg_ex, const Violations& v) {
  return w.lambda_s * p_sum - w.lambda_e * e_avg_ex - w.lambda_pen * v.total();
}

Problem::Problem(Scenario scenario)
    : scenario_(std::move(scenario)), bvh_(scenario_.terrain, scenario_.bvh_scale) {
  scenario_.validate();
}

SensingContext Problem::sensing() const {
  return {&scenario_.terrain, &bvh_, scenario_.ebd, scenario_.antenna, scenario_.link,
          scenario_.los_epsilon};
}

Deployment Problem::blank_deployment() const {
  Deployment d;
  d.uavs.resize(uav_count());
  for (std::size_t m = 0; m < uav_count(); ++m) d.uavs[m].band = scenario_.uav_bands[m];
  return d;
}

Violations Problem::violations(const Deployment& d) const {
  return terradeploy::violations(d, scenario_.targets, scenario_.bounds, scenario_.terrain);
}

RepairResult Problem::repair(const Deployment& d, std::span<const bool> movable) const {
  return terradeploy::repair(d, scenario_.targets, scenario_.bounds, scenario_.terrain, movable);
}

Problem::UavTerms Problem::uav_terms(const UavState& u) const {
  const auto ctx = sensing();
  UavTerms t;
  t.link.assign(scenario_.targets.size(), 0.0);
  for (std::size_t n = 0; n < scenario_.targets.size(); ++n)
    if (u.band.intersects(scenario_.targets[n].channels))
      t.link[n] = link_probability_in_band(u, scenario_.targets[n], ctx);
  const auto& p = u.position;
  t.excess_energy =
      excess_energy_unchecked(p.z - scenario_.terrain.elevation(p.x, p.y), scenario_.energy);
  return t;
}

FitnessReport Problem::combine(const Deployment& d, std::span<const UavTerms> terms) const {
  std::vector<std::vector<double>> link;
  link.reserve(terms.size());
  double energy = 0.0;
  for (const auto& t : terms) {
    link.push_back(t.link);
    energy += t.excess_energy;
  }
  FitnessReport r;
  r.p_sum = fuse_links(d.uavs, scenario_.targets, link).p_sum;
  r.e_avg_ex = energy / static_cast<double>(terms.size());
  r.violations = violations(d);
  r.fitness = scalarize(scenario_.weights, r.p_sum, r.e_avg_ex, r.violations);
  return r;
}

FitnessReport Problem::evaluate(const Deployment& d) const {
  if (d.size() == 0) throw std::invalid_argument("evaluate: empty deployment");
  std::vector<UavTerms> terms;
  terms.reserve(d.size());
  for (const auto& u : d.uavs) terms.push_back(uav_terms(u));
  return combine(d, terms);
}

std::array<double, kGenesPerUav> Problem::gene_lower() const {
  const auto& b = scenario_.bounds;
  const double floor = scenario_.terrain.lower_bound() + b.h_safe;
  return {b.region.min_x, b.region.min_y, std::min(floor, b.h_max), -kPi, -kHalfPi};
}

std::array<double, kGenesPerUav> Problem::gene_upper() const {
  const auto& b = scenario_.bounds;
  return {b.region.max_x, b.region.max_y, b.h_max, kPi, kHalfPi};
}

UavState Problem::random_uav(std::size_t index, RandomStream& rng) const {
  const auto& b = scenario_.bounds;
  UavState u;
  u.band = scenario_.uav_bands.at(index);
  u.position.x = rng.uniform(b.region.min_x, b.region.max_x);
  u.position.y = rng.uniform(b.region.min_y, b.region.max_y);
  const double floor = scenario_.terrain.elevation(u.position.x, u.position.y) + b.h_safe;
  u.position.z = floor < b.h_max ? rng.uniform(floor, b.h_max) : floor;
  u.eta = rng.uniform(-kPi, kPi);
  u.zeta = rng.uniform(-kHalfPi, kHalfPi);
  return u;
}

Deployment Problem::random_deployment(RandomStream& rng) const {
  Deployment d;
  for (std::size_t m = 0; m < uav_count(); ++m) d.uavs.push_back(random_uav(m, rng));
  return repair(d).deployment;
}

FitnessReport fitness(const Deployment& d, const Scenario& scenario, const FitnessWeights& fw,
                      const SensingContext& ctx) {
  FitnessReport r;
  r.p_sum = cooperative_sum(d.uavs, scenario.targets, ctx).p_sum;
  double energy = 0.0;
  for (const auto& u : d.uavs) {
    const auto& p = u.position;
    energy += excess_energy_unchecked(p.z - scenario.terrain.elevation(p.x, p.y), scenario.energy);
  }
  r.e_avg_ex = energy / static_cast<double>(d.size());
  r.violations = violations(d, scenario.targets, scenario.bounds, scenario.terrain);
  r.fitness = scalarize(fw, r.p_sum, r.e_avg_ex, r.violations);
  return r;
}

}  // namespace terradeploy
