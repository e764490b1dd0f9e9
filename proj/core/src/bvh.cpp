#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "terradeploy/los.hpp"

namespace terradeploy {

Bvh::Bvh(const TerrainModel& model, double k_o) : k_o_(k_o) {
  if (!(k_o > 0.0)) throw std::invalid_argument("BVH scale factor k_o must be positive");
  const auto comps = model.components();
  if (comps.empty()) return;
  std::vector<Aabb2> boxes(comps.size());
  std::vector<double> cx(comps.size()), cy(comps.size());
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const auto& c = comps[i];
    boxes[i] = {c.mu_x - k_o * c.sigma_x, c.mu_x + k_o * c.sigma_x, c.mu_y - k_o * c.sigma_y,
                c.mu_y + k_o * c.sigma_y};
    cx[i] = c.mu_x;
    cy[i] = c.mu_y;
  }
  std::vector<std::size_t> idx(comps.size());
  std::iota(idx.begin(), idx.end(), 0);
  nodes_.reserve(2 * comps.size());
  build(idx, 0, idx.size(), boxes, cx, cy);
}

int Bvh::build(std::vector<std::size_t>& idx, std::size_t lo, std::size_t hi,
               const std::vector<Aabb2>& boxes, const std::vector<double>& cx,
               const std::vector<double>& cy) {
  const int self = static_cast<int>(nodes_.size());
  nodes_.emplace_back();
  Aabb2 box;
  for (std::size_t k = lo; k < hi; ++k) box.expand(boxes[idx[k]]);
  nodes_[self].box = box;
  if (hi - lo == 1) {
    nodes_[self].component = static_cast<int>(idx[lo]);
    return self;
  }
  // Median split of the centers along the longer extent of the node box.
  const bool along_x = box.width() >= box.height();
  const auto& key = along_x ? cx : cy;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::nth_element(idx.begin() + static_cast<std::ptrdiff_t>(lo),
                   idx.begin() + static_cast<std::ptrdiff_t>(mid),
                   idx.begin() + static_cast<std::ptrdiff_t>(hi),
                   [&](std::size_t a, std::size_t b) {
                     return key[a] < key[b] || (key[a] == key[b] && a < b);
                   });
  const int l = build(idx, lo, mid, boxes, cx, cy);
  const int r = build(idx, mid, hi, boxes, cx, cy);
  nodes_[self].left = l;
  nodes_[self].right = r;
  return self;
}

int Bvh::height() const {
  if (nodes_.empty()) return 0;
  int best = 0;
  std::vector<std::pair<int, int>> stack{{0, 1}};
  while (!stack.empty()) {
    auto [n, depth] = stack.back();
    stack.pop_back();
    best = std::max(best, depth);
    const Node& node = nodes_[static_cast<std::size_t>(n)];
    if (!node.leaf()) {
      stack.push_back({node.left, depth + 1});
      stack.push_back({node.right, depth + 1});
    }
  }
  return best;
}

bool Bvh::contains_point(double x, double y) const {
  if (nodes_.empty()) return false;
  int stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& n = nodes_[static_cast<std::size_t>(stack[--top])];
    if (!n.box.contains(x, y)) continue;
    if (n.leaf()) return true;
    stack[top++] = n.left;
    stack[top++] = n.right;
  }
  return false;
}

bool Bvh::intersects_segment(double ax, double ay, double bx, double by) const {
  bool hit = false;
  // A first hit is enough; the traversal is cheap relative to the callers.
  for_each_leaf_on_segment(ax, ay, bx, by, [&](std::size_t) { hit = true; });
  return hit;
}

}  // namespace terradeploy
