#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "terradeploy/optimizer.hpp"

namespace terradeploy {

namespace {

constexpr double kClimbStep = 10.0;
constexpr int kSweeps = 3;
constexpr double kGoldenTolerance = 1e-6;

bool sees_all(const Problem& problem, const UavState& u, std::span<const std::size_t> assigned) {
  const auto& s = problem.scenario();
  for (std::size_t n : assigned) {
    const LosQuery q{u.position, s.targets[n].position, s.los_epsilon};
    if (!los_query(problem.bvh(), s.terrain, q).visible) return false;
  }
  return true;
}

// Golden-section maximisation of f over [lo, hi]; returns the arg max found.
template <typename F>
double golden_max(F&& f, double lo, double hi) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > kGoldenTolerance) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

}  // namespace

std::vector<std::size_t> assigned_targets(const Scenario& s, std::size_t uav) {
  std::vector<std::size_t> out;
  const Band& band = s.uav_bands.at(uav);
  for (std::size_t n = 0; n < s.targets.size(); ++n)
    if (band.intersects(s.targets[n].channels)) out.push_back(n);
  return out;
}

BaselineResult baseline_non_optimized(const Problem& problem) {
  const Scenario& s = problem.scenario();
  const auto& cb = s.bounds;
  BaselineResult out;
  Deployment d = problem.blank_deployment();
  std::vector<std::vector<std::size_t>> assigned(d.size());

  for (std::size_t m = 0; m < d.size(); ++m) {
    assigned[m] = assigned_targets(s, m);
    UavState& u = d.uavs[m];
    double cx = 0.5 * (cb.region.min_x + cb.region.max_x);
    double cy = 0.5 * (cb.region.min_y + cb.region.max_y);
    if (!assigned[m].empty()) {
      cx = cy = 0.0;
      for (std::size_t n : assigned[m]) {
        cx += s.targets[n].position.x;
        cy += s.targets[n].position.y;
      }
      cx /= static_cast<double>(assigned[m].size());
      cy /= static_cast<double>(assigned[m].size());
    }
    u.position.x = std::clamp(cx, cb.region.min_x, cb.region.max_x);
    u.position.y = std::clamp(cy, cb.region.min_y, cb.region.max_y);
    u.position.z = s.terrain.elevation(u.position.x, u.position.y) + cb.h_safe;
  }
  d = problem.repair(d).deployment;

  const std::unique_ptr<bool[]> mask(new bool[d.size()]());
  for (std::size_t m = 0; m < d.size(); ++m) {
    // Climbing changes 3D separations, so each step is re-repaired with only
    // this UAV movable; the others keep their settled states.
    mask[m] = true;
    const std::span<const bool> movable(mask.get(), d.size());
    const auto max_steps = static_cast<int>(
        std::ceil((cb.h_max - s.terrain.lower_bound()) / kClimbStep)) + 1;
    for (int step = 0; !sees_all(problem, d.uavs[m], assigned[m]); ++step) {
      if (d.uavs[m].position.z >= cb.h_max || step >= max_steps) {
        out.los_reached = false;
        break;
      }
      d.uavs[m].position.z = std::min(d.uavs[m].position.z + kClimbStep, cb.h_max);
      d = problem.repair(d, movable).deployment;
    }
    mask[m] = false;
    UavState& u = d.uavs[m];
    if (!assigned[m].empty()) {
      Point3 c{0.0, 0.0, 0.0};
      for (std::size_t n : assigned[m]) {
        c.x += s.targets[n].position.x;
        c.y += s.targets[n].position.y;
        c.z += s.targets[n].position.z;
      }
      const double k = static_cast<double>(assigned[m].size());
      c = {c.x / k, c.y / k, c.z / k};
      if (!(c.x == u.position.x && c.y == u.position.y && c.z == u.position.z)) {
        const LookAngles a = look_angles(u.position, c);
        u.eta = a.azimuth;
        u.zeta = a.elevation;
      }
    }
  }

  std::vector<Problem::UavTerms> terms;
  for (const auto& u : d.uavs) terms.push_back(problem.uav_terms(u));
  FitnessReport best = problem.combine(d, terms);
  out.sweep_fitness.push_back(best.fitness);

  const double half_pi = std::numbers::pi / 2.0;
  for (int sweep = 0; sweep < kSweeps; ++sweep) {
    for (std::size_t m = 0; m < d.size(); ++m) {
      for (int axis = 0; axis < 2; ++axis) {
        UavState trial = d.uavs[m];
        double& angle = axis == 0 ? trial.eta : trial.zeta;
        const double width = axis == 0 ? s.antenna.beamwidth_azimuth : s.antenna.beamwidth_elevation;
        const double centre = angle;
        double lo = centre - width, hi = centre + width;
        if (axis == 1) {
          lo = std::max(lo, -half_pi);
          hi = std::min(hi, half_pi);
        }
        auto score = [&](double v) {
          angle = v;
          auto saved = terms[m];
          terms[m] = problem.uav_terms(trial);
          Deployment probe = d;
          probe.uavs[m] = trial;
          const double f = problem.combine(probe, terms).fitness;
          terms[m] = std::move(saved);
          return f;
        };
        double v = golden_max(score, lo, hi);
        if (axis == 0) v = wrap_angle(v);
        angle = v;
        const auto t = problem.uav_terms(trial);
        auto saved = terms[m];
        terms[m] = t;
        Deployment probe = d;
        probe.uavs[m] = trial;
        const FitnessReport r = problem.combine(probe, terms);
        if (r.fitness > best.fitness) {
          best = r;
          d = std::move(probe);
        } else {
          terms[m] = std::move(saved);
        }
      }
    }
    out.sweep_fitness.push_back(best.fitness);
  }

  out.deployment = std::move(d);
  out.report = best;
  return out;
}

}  // namespace terradeploy
