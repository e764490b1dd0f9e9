#include "terradeploy/terrain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "terradeploy/rng.hpp"

namespace terradeploy {

double GaussianBump::evaluate(double x, double y) const {
  const double dx = (x - mu_x) / sigma_x;
  const double dy = (y - mu_y) / sigma_y;
  return height * std::exp(-0.5 * (dx * dx + dy * dy));
}

TerrainModel::TerrainModel(std::vector<GaussianBump> components, double base)
    : components_(std::move(components)), base_(base) {
  if (!std::isfinite(base_)) throw std::invalid_argument("terrain base must be finite");
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto& c = components_[i];
    if (!(c.sigma_x > 0.0) || !(c.sigma_y > 0.0) || !std::isfinite(c.sigma_x) ||
        !std::isfinite(c.sigma_y)) {
      throw std::invalid_argument("terrain component " + std::to_string(i) +
                                  ": spreads must be positive and finite");
    }
    if (!std::isfinite(c.height) || !std::isfinite(c.mu_x) || !std::isfinite(c.mu_y)) {
      throw std::invalid_argument("terrain component " + std::to_string(i) +
                                  ": non-finite parameter");
    }
  }
}

double TerrainModel::elevation(double x, double y) const {
  double z = base_;
  for (const auto& c : components_) z += c.evaluate(x, y);
  return z;
}

double TerrainModel::abs_height_sum() const {
  return std::accumulate(components_.begin(), components_.end(), 0.0,
                         [](double acc, const GaussianBump& c) { return acc + std::abs(c.height); });
}

double TerrainModel::upper_bound() const {
  double up = base_;
  for (const auto& c : components_) up += std::max(c.height, 0.0);
  return up;
}

double TerrainModel::lower_bound() const {
  double lo = base_;
  for (const auto& c : components_) lo += std::min(c.height, 0.0);
  return lo;
}

void HeightGrid::validate() const {
  if (!(cell_size > 0.0) || !std::isfinite(cell_size))
    throw std::invalid_argument("grid cell size must be positive");
  if (n_rows == 0 || n_cols == 0) throw std::invalid_argument("grid is empty");
  if (values.size() != n_rows * n_cols)
    throw std::invalid_argument("grid value count does not match n_rows x n_cols");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("grid contains non-finite values");
}

HeightGrid sample_grid(const TerrainModel& model, double origin_x, double origin_y,
                       double cell_size, std::size_t n_rows, std::size_t n_cols) {
  HeightGrid g;
  g.origin_x = origin_x;
  g.origin_y = origin_y;
  g.cell_size = cell_size;
  g.n_rows = n_rows;
  g.n_cols = n_cols;
  g.values.resize(n_rows * n_cols);
  for (std::size_t r = 0; r < n_rows; ++r)
    for (std::size_t c = 0; c < n_cols; ++c)
      g.values[r * n_cols + c] = model.elevation(g.cell_x(c), g.cell_y(r));
  return g;
}

double rmse(const TerrainModel& model, const HeightGrid& grid) {
  double sse = 0.0;
  for (std::size_t r = 0; r < grid.n_rows; ++r)
    for (std::size_t c = 0; c < grid.n_cols; ++c) {
      const double e = model.elevation(grid.cell_x(c), grid.cell_y(r)) - grid.at(r, c);
      sse += e * e;
    }
  return std::sqrt(sse / static_cast<double>(grid.values.size()));
}

TerrainModel make_synthetic_terrain(const SyntheticTerrainSpec& spec, std::uint64_t seed) {
  RandomStream rng(seed, "synthetic-terrain");
  std::vector<GaussianBump> bumps;
  bumps.reserve(spec.components);
  for (std::size_t i = 0; i < spec.components; ++i) {
    GaussianBump b;
    b.height = rng.uniform(spec.min_height, spec.max_height);
    b.mu_x = rng.uniform(0.0, spec.extent_x);
    b.mu_y = rng.uniform(0.0, spec.extent_y);
    b.sigma_x = rng.uniform(spec.min_sigma, spec.max_sigma);
    b.sigma_y = rng.uniform(spec.min_sigma, spec.max_sigma);
    bumps.push_back(b);
  }
  return TerrainModel(std::move(bumps), spec.base);
}

}  // namespace terradeploy
