#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "terradeploy/los.hpp"

namespace terradeploy {

namespace {

// Largest value of one bump along the 2D segment a->b. The exponent is a
// convex quadratic in the segment parameter, so a positive bump peaks at the
// clamped vertex and a negative one is highest at an endpoint.
double bump_max_on_segment(const GaussianBump& c, double ax, double ay, double bx, double by) {
  const double ex = (ax - c.mu_x) / c.sigma_x;
  const double ey = (ay - c.mu_y) / c.sigma_y;
  const double dx = (bx - ax) / c.sigma_x;
  const double dy = (by - ay) / c.sigma_y;
  const auto q = [&](double s) {
    const double u = ex + s * dx;
    const double v = ey + s * dy;
    return 0.5 * (u * u + v * v);
  };
  if (c.height >= 0.0) {
    const double dd = dx * dx + dy * dy;
    const double s = dd > 0.0 ? std::clamp(-(ex * dx + ey * dy) / dd, 0.0, 1.0) : 0.0;
    return c.height * std::exp(-q(s));
  }
  return c.height * std::exp(-std::max(q(0.0), q(1.0)));
}

}  // namespace

LosResult los_query(const Bvh& bvh, const TerrainModel& model, const LosQuery& q) {
  if (!(q.epsilon > 0.0 && q.epsilon < 1.0))
    throw std::invalid_argument("los_query: epsilon must lie in (0, 1)");
  LosResult r;
  const auto comps = model.components();
  const Point3& a = q.from;
  const Point3& b = q.to;

  const auto blocked_at = [&](const Point3& p) {
    if (bvh.contains_point(p.x, p.y)) {
      ++r.terrain_evaluations;
      r.kernel_evaluations += comps.size();
      return p.z <= model.elevation(p.x, p.y);
    }
    return p.z <= model.base();
  };

  if (blocked_at(a) || blocked_at(b)) {
    r.visible = false;
    return r;
  }
  // Early acceptance: the ground track misses every box.
  if (!segment_intersects(bvh.root_box(), a.x, a.y, b.x, b.y)) return r;

  struct Interval {
    double t0, t1;
  };
  std::deque<Interval> work{{0.0, 1.0}};
  while (!work.empty()) {
    const Interval iv = work.front();
    work.pop_front();
    ++r.intervals;
    const Point3 p0 = lerp(a, b, iv.t0);
    const Point3 p1 = lerp(a, b, iv.t1);

    bool touched = false;
    double ceiling = model.base();
    bvh.for_each_leaf_on_segment(p0.x, p0.y, p1.x, p1.y, [&](std::size_t i) {
      touched = true;
      ++r.kernel_evaluations;
      ceiling += bump_max_on_segment(comps[i], p0.x, p0.y, p1.x, p1.y);
    });
    if (!touched) continue;
    // z is linear in t, so its minimum over the interval is at an end.
    if (std::min(p0.z, p1.z) > ceiling) continue;
    if (iv.t1 - iv.t0 <= q.epsilon) continue;

    const double tm = 0.5 * (iv.t0 + iv.t1);
    const Point3 pm = lerp(a, b, tm);
    if (bvh.contains_point(pm.x, pm.y)) {
      ++r.terrain_evaluations;
      r.kernel_evaluations += comps.size();
      if (pm.z <= model.elevation(pm.x, pm.y)) {
        r.visible = false;
        return r;
      }
    }
    work.push_back({iv.t0, tm});
    work.push_back({tm, iv.t1});
  }
  return r;
}

LosResult los_dense_oracle(const TerrainModel& model, const Point3& p1, const Point3& p2,
                           double step) {
  if (!(step > 0.0 && step <= 1e-3))
    throw std::invalid_argument("los_dense_oracle: step must lie in (0, 1e-3]");
  LosResult r;
  const auto n = static_cast<std::size_t>(std::floor(1.0 / step + 1e-9));
  const auto check = [&](double t) {
    const Point3 p = lerp(p1, p2, t);
    ++r.terrain_evaluations;
    r.kernel_evaluations += model.size();
    return p.z <= model.elevation(p.x, p.y);
  };
  for (std::size_t k = 0; k <= n; ++k) {
    if (check(std::min(1.0, static_cast<double>(k) * step))) {
      r.visible = false;
      return r;
    }
  }
  if (static_cast<double>(n) * step < 1.0 && check(1.0)) r.visible = false;
  return r;
}

double tail_safe_scale(const TerrainModel& model, double margin, double floor) {
  if (!(margin > 0.0)) throw std::invalid_argument("tail_safe_scale: margin must be positive");
  const double total = model.abs_height_sum();
  if (total <= margin) return floor;
  return std::max(floor, std::sqrt(2.0 * std::log(total / margin)));
}

}  // namespace terradeploy
