#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace terradeploy {

/// One anisotropic 2D Gaussian bump of the terrain mixture. Negative heights
/// model depressions relative to the base elevation.
struct GaussianBump {
  double height = 0.0;
  double mu_x = 0.0;
  double mu_y = 0.0;
  double sigma_x = 1.0;
  double sigma_y = 1.0;

  double evaluate(double x, double y) const;

  friend bool operator==(const GaussianBump&, const GaussianBump&) = default;
};

/// Terrain elevation as base + sum of Gaussian bumps. Immutable after
/// construction.
class TerrainModel {
 public:
  TerrainModel() = default;
  explicit TerrainModel(std::vector<GaussianBump> components, double base = 0.0);

  double elevation(double x, double y) const;

  std::span<const GaussianBump> components() const { return components_; }
  std::size_t size() const { return components_.size(); }
  double base() const { return base_; }

  /// Sum of |h_i|; bounds |elevation - base| everywhere.
  double abs_height_sum() const;
  /// Upper bound on elevation over the whole plane.
  double upper_bound() const;
  /// Lower bound on elevation over the whole plane.
  double lower_bound() const;

  friend bool operator==(const TerrainModel&, const TerrainModel&) = default;

 private:
  std::vector<GaussianBump> components_;
  double base_ = 0.0;
};

/// Regularly sampled elevation raster. Row 0 is the northernmost row (ESRI
/// convention); cell centers sit at origin + (col + 0.5, n_rows - row - 0.5)
/// cell sizes.
struct HeightGrid {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double cell_size = 1.0;
  std::size_t n_rows = 0;
  std::size_t n_cols = 0;
  std::vector<double> values;

  double at(std::size_t row, std::size_t col) const { return values[row * n_cols + col]; }
  double cell_x(std::size_t col) const {
    return origin_x + (static_cast<double>(col) + 0.5) * cell_size;
  }
  double cell_y(std::size_t row) const {
    return origin_y + (static_cast<double>(n_rows - row) - 0.5) * cell_size;
  }
  double width() const { return static_cast<double>(n_cols) * cell_size; }
  double height() const { return static_cast<double>(n_rows) * cell_size; }

  /// Throws std::invalid_argument if the invariants do not hold.
  void validate() const;

  friend bool operator==(const HeightGrid&, const HeightGrid&) = default;
};

enum class HeightmapFormat { esri_ascii, csv };

/// Parse failure. line/column are 1-based; column is the token index within
/// the line (0 when the error concerns the whole line).
class HeightmapError : public std::runtime_error {
 public:
  HeightmapError(const std::string& what, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

struct CsvGridOptions {
  double origin_x = 0.0;
  double origin_y = 0.0;
  double cell_size = 1.0;
};

HeightGrid load_heightmap(std::istream& in, HeightmapFormat format,
                          const CsvGridOptions& csv = {});
HeightGrid load_heightmap_file(const std::string& path, const CsvGridOptions& csv = {});
void write_esri_ascii(const HeightGrid& grid, std::ostream& out);

/// Samples a model at every cell center of a grid with the given geometry.
HeightGrid sample_grid(const TerrainModel& model, double origin_x, double origin_y,
                       double cell_size, std::size_t n_rows, std::size_t n_cols);

double rmse(const TerrainModel& model, const HeightGrid& grid);

struct FitConfig {
  /// Upper bound on refinement rounds over all components.
  int max_rounds = 200;
  /// Stop once a round improves the squared error by less than this fraction.
  double relative_tolerance = 1e-12;
  /// Initial spread of a freshly seeded bump, in cell sizes.
  double initial_sigma_cells = 2.0;
  /// Golden-section termination width relative to the bracket.
  double line_search_tolerance = 1e-10;
  /// Refine the additive base in closed form each round.
  bool refine_base = true;
  /// Levenberg-Marquardt iterations over all parameters jointly after the
  /// coordinate-wise rounds; 0 disables the joint stage.
  int joint_iterations = 100;
  /// Attempts to move the least useful bump onto the largest residual and
  /// re-polish; an attempt is kept only when it lowers the squared error.
  int relocations = 10;
};

struct FitResult {
  TerrainModel model;
  double rmse = 0.0;
  /// rmse after greedy seeding, before refinement rounds.
  double seeded_rmse = 0.0;
  /// rmse of the flat base-only model the fit starts from.
  double initial_rmse = 0.0;
  /// rmse after each refinement round; non-increasing.
  std::vector<double> history;
};

/// Fits a G-component Gaussian mixture to a grid. Greedy residual-peak seeding
/// followed by coordinate-wise golden-section refinement of each bump's
/// center and spreads, with its height solved in closed form, then a joint
/// Levenberg-Marquardt stage that only accepts error-reducing steps.
FitResult fit_gaussians(const HeightGrid& grid, std::size_t components,
                        const FitConfig& config = {}, std::uint64_t seed = 0);

/// Random mixture used by tests, benchmarks and synthetic scenarios.
struct SyntheticTerrainSpec {
  std::size_t components = 10;
  double extent_x = 5000.0;
  double extent_y = 5000.0;
  double min_height = 100.0;
  double max_height = 600.0;
  double min_sigma = 200.0;
  double max_sigma = 600.0;
  double base = 0.0;
};

TerrainModel make_synthetic_terrain(const SyntheticTerrainSpec& spec, std::uint64_t seed);

}  // namespace terradeploy
