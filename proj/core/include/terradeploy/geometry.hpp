#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace terradeploy {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Point3&, const Point3&) = default;
};

inline double distance(const Point3& a, const Point3& b) {
  return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                   (a.z - b.z) * (a.z - b.z));
}

inline Point3 lerp(const Point3& a, const Point3& b, double t) {
  return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), a.z + t * (b.z - a.z)};
}

// Axis-aligned box in the horizontal plane. A default-constructed box is
// empty (inverted) and contains nothing.
struct Aabb2 {
  double min_x = 1.0;
  double max_x = -1.0;
  double min_y = 1.0;
  double max_y = -1.0;

  bool empty() const { return min_x > max_x || min_y > max_y; }
  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }

  bool contains(double x, double y) const {
    return x >= min_x && x <= max_x && y >= min_y && y <= max_y;
  }

  bool contains(const Aabb2& o) const {
    return o.min_x >= min_x && o.max_x <= max_x && o.min_y >= min_y &&
           o.max_y <= max_y;
  }

  void expand(const Aabb2& o) {
    if (o.empty()) return;
    if (empty()) {
      *this = o;
      return;
    }
    min_x = std::min(min_x, o.min_x);
    max_x = std::max(max_x, o.max_x);
    min_y = std::min(min_y, o.min_y);
    max_y = std::max(max_y, o.max_y);
  }

  // Distance from (x, y) to the box; zero inside.
  double distance_to(double x, double y) const {
    const double dx = std::max({min_x - x, 0.0, x - max_x});
    const double dy = std::max({min_y - y, 0.0, y - max_y});
    return std::hypot(dx, dy);
  }

  friend bool operator==(const Aabb2&, const Aabb2&) = default;
};

// Slab clipping of the 2D segment a + s (b - a), s in [0, 1], against a box.
// Returns false when the segment misses the box.
inline bool segment_intersects(const Aabb2& box, double ax, double ay, double bx,
                               double by) {
  if (box.empty()) return false;
  double s0 = 0.0;
  double s1 = 1.0;
  const double d[2] = {bx - ax, by - ay};
  const double o[2] = {ax, ay};
  const double lo[2] = {box.min_x, box.min_y};
  const double hi[2] = {box.max_x, box.max_y};
  for (int k = 0; k < 2; ++k) {
    if (d[k] == 0.0) {
      if (o[k] < lo[k] || o[k] > hi[k]) return false;
      continue;
    }
    double ta = (lo[k] - o[k]) / d[k];
    double tb = (hi[k] - o[k]) / d[k];
    if (ta > tb) std::swap(ta, tb);
    s0 = std::max(s0, ta);
    s1 = std::min(s1, tb);
    if (s0 > s1) return false;
  }
  return true;
}

// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double kPi = std::numbers::pi;
  constexpr double kTwoPi = 2.0 * kPi;
  double r = std::fmod(a + kPi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  r -= kPi;
  if (r <= -kPi) r += kTwoPi;
  return r;
}

}  // namespace terradeploy
