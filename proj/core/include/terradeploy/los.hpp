#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "terradeploy/geometry.hpp"
#include "terradeploy/terrain.hpp"

namespace terradeploy {

/// Balanced hierarchy of 2D boxes, one leaf per terrain component. Leaf i
/// covers [mu - k_o sigma, mu + k_o sigma] on each axis; internal boxes are
/// tight unions of their children. Immutable after construction.
class Bvh {
 public:
  struct Node {
    Aabb2 box;
    int left = -1;
    int right = -1;
    int component = -1;  // >= 0 for leaves

    bool leaf() const { return component >= 0; }
  };

  Bvh() = default;
  Bvh(const TerrainModel& model, double k_o);

  bool empty() const { return nodes_.empty(); }
  double scale() const { return k_o_; }
  /// Root box; empty (contains nothing) for a component-free model.
  Aabb2 root_box() const { return nodes_.empty() ? Aabb2{} : nodes_.front().box; }
  const std::vector<Node>& nodes() const { return nodes_; }
  /// Number of levels; 0 for an empty hierarchy, 1 for a single leaf.
  int height() const;

  /// True when (x, y) lies inside at least one leaf box.
  bool contains_point(double x, double y) const;
  /// True when the 2D segment a->b touches any leaf box.
  bool intersects_segment(double ax, double ay, double bx, double by) const;

  /// Calls fn(component_index) for every leaf whose box the 2D segment
  /// touches. Returns the number of leaves visited.
  template <typename Fn>
  std::size_t for_each_leaf_on_segment(double ax, double ay, double bx, double by, Fn&& fn) const {
    if (nodes_.empty()) return 0;
    std::size_t hits = 0;
    int stack[128];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
      const Node& n = nodes_[static_cast<std::size_t>(stack[--top])];
      if (!segment_intersects(n.box, ax, ay, bx, by)) continue;
      if (n.leaf()) {
        ++hits;
        fn(static_cast<std::size_t>(n.component));
      } else {
        stack[top++] = n.left;
        stack[top++] = n.right;
      }
    }
    return hits;
  }

 private:
  int build(std::vector<std::size_t>& idx, std::size_t lo, std::size_t hi,
            const std::vector<Aabb2>& boxes, const std::vector<double>& cx,
            const std::vector<double>& cy);

  std::vector<Node> nodes_;
  double k_o_ = 2.0;
};

struct LosQuery {
  Point3 from;
  Point3 to;
  double epsilon = 1e-5;
};

struct LosResult {
  bool visible = true;
  /// Full mixture evaluations (beta_terrain calls).
  std::size_t terrain_evaluations = 0;
  /// Single-component kernel evaluations, including the per-interval bounds.
  std::size_t kernel_evaluations = 0;
  /// Parameter intervals examined.
  std::size_t intervals = 0;

  explicit operator bool() const { return visible; }
};

/// Adaptive binary line-of-sight test. Early-accepts segments whose ground
/// projection misses the root box, otherwise bisects the parameter interval,
/// dropping sub-intervals whose ground track touches no box or whose lowest
/// altitude clears an upper bound of the terrain inside the touched boxes.
/// A midpoint inside a leaf box with z <= elevation blocks the path. Terrain
/// outside every box is taken to be the base elevation.
LosResult los_query(const Bvh& bvh, const TerrainModel& model, const LosQuery& q);

/// Brute-force reference: samples t = 0, step, 2 step, ..., 1 and reports
/// blocked as soon as z(t) <= elevation.
LosResult los_dense_oracle(const TerrainModel& model, const Point3& p1, const Point3& p2,
                           double step);

/// Smallest box scale for which every component's tail outside its box is at
/// most `margin` in total: sum |h_i| exp(-k^2 / 2) <= margin. Never below
/// `floor`.
double tail_safe_scale(const TerrainModel& model, double margin, double floor = 2.0);

}  // namespace terradeploy
