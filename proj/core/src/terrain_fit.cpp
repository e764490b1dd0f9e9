#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "terradeploy/rng.hpp"
#include "terradeploy/terrain.hpp"

namespace terradeploy {

namespace {

constexpr double kGolden = 0.6180339887498949;

// Residual raster plus the cell-center coordinates. Bumps are separable, so
// every profile evaluation reduces to 1D sums over rows or columns.
struct FitState {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> residual;

  void axis_profile(const std::vector<double>& coords, double mu, double sigma,
                    std::vector<double>& out) const {
    out.resize(coords.size());
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (std::size_t k = 0; k < coords.size(); ++k) {
      const double d = coords[k] - mu;
      out[k] = std::exp(-d * d * inv);
    }
  }

  void add_bump(const GaussianBump& b, double sign) {
    std::vector<double> gx, gy;
    axis_profile(xs, b.mu_x, b.sigma_x, gx);
    axis_profile(ys, b.mu_y, b.sigma_y, gy);
    for (std::size_t r = 0; r < rows; ++r) {
      const double s = sign * b.height * gy[r];
      double* row = residual.data() + r * cols;
      for (std::size_t c = 0; c < cols; ++c) row[c] += s * gx[c];
    }
  }

  double sse() const {
    return std::inner_product(residual.begin(), residual.end(), residual.begin(), 0.0);
  }
};

// Profiled fit of one bump against a fixed residual: for a given shape the
// optimal height is <r, phi> / <phi, phi>, and the squared-error reduction is
// <r, phi>^2 / <phi, phi>. We maximise the reduction.
class BumpProfile {
 public:
  BumpProfile(const FitState& st, const GaussianBump& b) : st_(st), b_(b) {}

  const GaussianBump& bump() const { return b_; }

  double gain() {
    st_.axis_profile(st_.xs, b_.mu_x, b_.sigma_x, gx_);
    st_.axis_profile(st_.ys, b_.mu_y, b_.sigma_y, gy_);
    double a = 0.0;
    for (std::size_t r = 0; r < st_.rows; ++r) {
      const double* row = st_.residual.data() + r * st_.cols;
      double w = 0.0;
      for (std::size_t c = 0; c < st_.cols; ++c) w += row[c] * gx_[c];
      a += w * gy_[r];
    }
    const double bx = std::inner_product(gx_.begin(), gx_.end(), gx_.begin(), 0.0);
    const double by = std::inner_product(gy_.begin(), gy_.end(), gy_.begin(), 0.0);
    const double bb = bx * by;
    if (!(bb > 1e-300)) {
      height_ = 0.0;
      return 0.0;
    }
    height_ = a / bb;
    return a * a / bb;
  }

  // Line search over one parameter; the x-parameters reuse the column sums
  // against the current y-profile and vice versa.
  void refine(double GaussianBump::*param, bool log_scale, double lo, double hi, double tol) {
    const bool is_x = (param == &GaussianBump::mu_x || param == &GaussianBump::sigma_x);
    prepare_marginal(is_x);
    const double current = b_.*param;
    auto eval = [&](double v) {
      GaussianBump t = b_;
      t.*param = log_scale ? std::exp(v) : v;
      return marginal_gain(t, is_x);
    };
    const double v0 = log_scale ? std::log(current) : current;
    double best_v = v0;
    double best_g = eval(v0);

    double a = lo, b = hi;
    double c = b - kGolden * (b - a);
    double d = a + kGolden * (b - a);
    double gc = eval(c), gd = eval(d);
    const double stop = tol * (hi - lo);
    while (b - a > stop) {
      if (gc > gd) {
        b = d;
        d = c;
        gd = gc;
        c = b - kGolden * (b - a);
        gc = eval(c);
      } else {
        a = c;
        c = d;
        gc = gd;
        d = a + kGolden * (b - a);
        gd = eval(d);
      }
    }
    const double cand = gc > gd ? c : d;
    const double cand_g = std::max(gc, gd);
    if (cand_g > best_g) {
      best_g = cand_g;
      best_v = cand;
    }
    b_.*param = log_scale ? std::exp(best_v) : best_v;
  }

  // Sets the height to its closed-form optimum for the current shape.
  void solve_height() {
    gain();
    b_.height = height_;
  }

 private:
  void prepare_marginal(bool vary_x) {
    if (vary_x) {
      st_.axis_profile(st_.ys, b_.mu_y, b_.sigma_y, gy_);
      marginal_.assign(st_.cols, 0.0);
      for (std::size_t r = 0; r < st_.rows; ++r) {
        const double* row = st_.residual.data() + r * st_.cols;
        for (std::size_t c = 0; c < st_.cols; ++c) marginal_[c] += row[c] * gy_[r];
      }
      fixed_norm_ = std::inner_product(gy_.begin(), gy_.end(), gy_.begin(), 0.0);
    } else {
      st_.axis_profile(st_.xs, b_.mu_x, b_.sigma_x, gx_);
      marginal_.assign(st_.rows, 0.0);
      for (std::size_t r = 0; r < st_.rows; ++r) {
        const double* row = st_.residual.data() + r * st_.cols;
        double w = 0.0;
        for (std::size_t c = 0; c < st_.cols; ++c) w += row[c] * gx_[c];
        marginal_[r] = w;
      }
      fixed_norm_ = std::inner_product(gx_.begin(), gx_.end(), gx_.begin(), 0.0);
    }
  }

  double marginal_gain(const GaussianBump& t, bool vary_x) {
    if (vary_x) st_.axis_profile(st_.xs, t.mu_x, t.sigma_x, scratch_);
    else st_.axis_profile(st_.ys, t.mu_y, t.sigma_y, scratch_);
    const double a = std::inner_product(marginal_.begin(), marginal_.end(), scratch_.begin(), 0.0);
    const double bb =
        fixed_norm_ * std::inner_product(scratch_.begin(), scratch_.end(), scratch_.begin(), 0.0);
    if (!(bb > 1e-300)) return 0.0;
    return a * a / bb;
  }

  const FitState& st_;
  GaussianBump b_;
  double height_ = 0.0;
  double fixed_norm_ = 0.0;
  std::vector<double> gx_, gy_, marginal_, scratch_;
};

struct Limits {
  double x_lo, x_hi, y_lo, y_hi, sigma_lo, sigma_hi;
};

GaussianBump refine_bump(const FitState& st, const GaussianBump& start, const Limits& lim,
                         double tol) {
  BumpProfile p(st, start);
  auto clamp_range = [](double v, double lo, double hi) { return std::clamp(v, lo, hi); };
  {
    const auto& b = p.bump();
    p.refine(&GaussianBump::mu_x, false, clamp_range(b.mu_x - 2.0 * b.sigma_x, lim.x_lo, lim.x_hi),
             clamp_range(b.mu_x + 2.0 * b.sigma_x, lim.x_lo, lim.x_hi), tol);
  }
  {
    const auto& b = p.bump();
    p.refine(&GaussianBump::mu_y, false, clamp_range(b.mu_y - 2.0 * b.sigma_y, lim.y_lo, lim.y_hi),
             clamp_range(b.mu_y + 2.0 * b.sigma_y, lim.y_lo, lim.y_hi), tol);
  }
  for (auto param : {&GaussianBump::sigma_x, &GaussianBump::sigma_y}) {
    const double s = p.bump().*param;
    const double lo = std::log(std::max(s / 4.0, lim.sigma_lo));
    const double hi = std::log(std::min(s * 4.0, lim.sigma_hi));
    if (hi > lo) p.refine(param, true, lo, hi, tol);
  }
  p.solve_height();
  return p.bump();
}

// Joint damped Gauss-Newton (Levenberg-Marquardt) over [base, (h, mu_x, mu_y,
// ln sigma_x, ln sigma_y) per bump]. The normal equations are accumulated in
// row blocks so the full Jacobian is never stored. Only steps that lower the
// squared error are taken; every accepted step's rmse is appended to history.
class JointPolish {
 public:
  JointPolish(const HeightGrid& grid, const FitState& st, const Limits& lim)
      : grid_(grid), st_(st), lim_(lim) {}

  double run(std::vector<GaussianBump>& bumps, double& base, int iterations,
             std::vector<double>& history) {
    const auto n_params = static_cast<Eigen::Index>(1 + 5 * bumps.size());
    const double n = static_cast<double>(grid_.values.size());
    Eigen::VectorXd p = pack(bumps, base);
    Eigen::MatrixXd jtj(n_params, n_params);
    Eigen::VectorXd jtr(n_params);
    double sse = normal_equations(p, &jtj, &jtr);
    double lambda = 1e-3;
    for (int it = 0; it < iterations; ++it) {
      bool accepted = false;
      for (int attempt = 0; attempt < 12 && !accepted; ++attempt) {
        Eigen::MatrixXd a = jtj;
        for (Eigen::Index k = 0; k < n_params; ++k) a(k, k) += lambda * std::max(jtj(k, k), 1e-12);
        const Eigen::VectorXd step = a.ldlt().solve(-jtr);
        if (!step.allFinite()) {
          lambda *= 10.0;
          continue;
        }
        Eigen::VectorXd trial = p + step;
        clamp(trial);
        const double trial_sse = normal_equations(trial, nullptr, nullptr);
        if (trial_sse < sse) {
          const double gain = sse - trial_sse;
          p = trial;
          sse = normal_equations(p, &jtj, &jtr);
          lambda = std::max(lambda / 10.0, 1e-12);
          accepted = true;
          history.push_back(std::sqrt(sse / n));
          if (gain <= 1e-12 * sse) it = iterations;
        } else {
          lambda *= 10.0;
        }
      }
      if (!accepted) break;
    }
    unpack(p, bumps, base);
    return sse;
  }

 private:
  static Eigen::VectorXd pack(const std::vector<GaussianBump>& bumps, double base) {
    Eigen::VectorXd p(1 + 5 * static_cast<Eigen::Index>(bumps.size()));
    p(0) = base;
    for (std::size_t i = 0; i < bumps.size(); ++i) {
      const auto k = 1 + 5 * static_cast<Eigen::Index>(i);
      const auto& b = bumps[i];
      p.segment<5>(k) << b.height, b.mu_x, b.mu_y, std::log(b.sigma_x), std::log(b.sigma_y);
    }
    return p;
  }

  static void unpack(const Eigen::VectorXd& p, std::vector<GaussianBump>& bumps, double& base) {
    base = p(0);
    for (std::size_t i = 0; i < bumps.size(); ++i) {
      const auto k = 1 + 5 * static_cast<Eigen::Index>(i);
      bumps[i] = {p(k), p(k + 1), p(k + 2), std::exp(p(k + 3)), std::exp(p(k + 4))};
    }
  }

  void clamp(Eigen::VectorXd& p) const {
    const double ls_lo = std::log(lim_.sigma_lo), ls_hi = std::log(lim_.sigma_hi);
    for (Eigen::Index k = 1; k < p.size(); k += 5) {
      p(k + 1) = std::clamp(p(k + 1), lim_.x_lo, lim_.x_hi);
      p(k + 2) = std::clamp(p(k + 2), lim_.y_lo, lim_.y_hi);
      p(k + 3) = std::clamp(p(k + 3), ls_lo, ls_hi);
      p(k + 4) = std::clamp(p(k + 4), ls_lo, ls_hi);
    }
  }

  // Squared error at p; when jtj/jtr are given, also J^T J and J^T r.
  double normal_equations(const Eigen::VectorXd& p, Eigen::MatrixXd* jtj, Eigen::VectorXd* jtr) const {
    const Eigen::Index n_params = p.size();
    const std::size_t g = static_cast<std::size_t>((n_params - 1) / 5);
    // Per-bump separable axis factors and their derivative weights.
    std::vector<std::vector<double>> ex(g), ey(g);
    for (std::size_t i = 0; i < g; ++i) {
      const auto k = 1 + 5 * static_cast<Eigen::Index>(i);
      st_.axis_profile(st_.xs, p(k + 1), std::exp(p(k + 3)), ex[i]);
      st_.axis_profile(st_.ys, p(k + 2), std::exp(p(k + 4)), ey[i]);
    }
    constexpr Eigen::Index kBlock = 512;
    Eigen::MatrixXd jb;
    Eigen::VectorXd rb;
    if (jtj) {
      jtj->setZero();
      jtr->setZero();
      jb.resize(kBlock, n_params);
      rb.resize(kBlock);
    }
    double sse = 0.0;
    Eigen::Index fill = 0;
    const auto flush = [&] {
      if (!jtj || fill == 0) return;
      const auto rows = jb.topRows(fill);
      jtj->selfadjointView<Eigen::Lower>().rankUpdate(rows.transpose());
      jtr->noalias() += rows.transpose() * rb.head(fill);
      fill = 0;
    };
    for (std::size_t r = 0; r < st_.rows; ++r) {
      for (std::size_t c = 0; c < st_.cols; ++c) {
        double model = p(0);
        if (jtj) jb(fill, 0) = 1.0;
        for (std::size_t i = 0; i < g; ++i) {
          const auto k = 1 + 5 * static_cast<Eigen::Index>(i);
          const double phi = ex[i][c] * ey[i][r];
          const double val = p(k) * phi;
          model += val;
          if (jtj) {
            const double sx2 = std::exp(2.0 * p(k + 3)), sy2 = std::exp(2.0 * p(k + 4));
            const double dx = st_.xs[c] - p(k + 1), dy = st_.ys[r] - p(k + 2);
            jb(fill, k) = phi;
            jb(fill, k + 1) = val * dx / sx2;
            jb(fill, k + 2) = val * dy / sy2;
            jb(fill, k + 3) = val * dx * dx / sx2;
            jb(fill, k + 4) = val * dy * dy / sy2;
          }
        }
        const double res = model - grid_.values[r * st_.cols + c];
        sse += res * res;
        if (jtj) {
          rb(fill) = res;
          if (++fill == kBlock) flush();
        }
      }
    }
    flush();
    if (jtj) *jtj = jtj->selfadjointView<Eigen::Lower>();
    return sse;
  }

  const HeightGrid& grid_;
  const FitState& st_;
  const Limits& lim_;
};

}  // namespace

FitResult fit_gaussians(const HeightGrid& grid, std::size_t components, const FitConfig& config,
                        std::uint64_t seed) {
  if (components == 0) throw std::invalid_argument("fit_gaussians: need at least one component");
  grid.validate();

  FitState st;
  st.rows = grid.n_rows;
  st.cols = grid.n_cols;
  st.xs.resize(st.cols);
  st.ys.resize(st.rows);
  for (std::size_t c = 0; c < st.cols; ++c) st.xs[c] = grid.cell_x(c);
  for (std::size_t r = 0; r < st.rows; ++r) st.ys[r] = grid.cell_y(r);

  const double n = static_cast<double>(grid.values.size());
  double base = *std::min_element(grid.values.begin(), grid.values.end());
  st.residual = grid.values;
  for (double& v : st.residual) v -= base;

  const double cell = grid.cell_size;
  const Limits lim{grid.origin_x - 0.5 * grid.width(),  grid.origin_x + 1.5 * grid.width(),
                   grid.origin_y - 0.5 * grid.height(), grid.origin_y + 1.5 * grid.height(),
                   0.25 * cell,
                   2.0 * std::max(grid.width(), grid.height())};
  const double tol = config.line_search_tolerance;

  FitResult result;
  result.initial_rmse = std::sqrt(st.sse() / n);

  std::vector<GaussianBump> bumps;
  bumps.reserve(components);
  const double sigma0 = config.initial_sigma_cells * cell;

  const auto max_abs = [&] {
    std::size_t best = 0;
    for (std::size_t k = 1; k < st.residual.size(); ++k)
      if (std::abs(st.residual[k]) > std::abs(st.residual[best])) best = k;
    return best;
  };

  if (std::abs(st.residual[max_abs()]) == 0.0) {
    const double cx = grid.origin_x + 0.5 * grid.width();
    const double cy = grid.origin_y + 0.5 * grid.height();
    bumps.assign(components, GaussianBump{0.0, cx, cy, sigma0, sigma0});
    result.model = TerrainModel(std::move(bumps), base);
    return result;
  }

  // Greedy seeding at the largest residual, each new bump refined locally
  // before the next peak is picked.
  const auto seed_bump = [&] {
    const std::size_t k = max_abs();
    GaussianBump b{0.0, st.xs[k % st.cols], st.ys[k / st.cols], sigma0, sigma0};
    BumpProfile p(st, b);
    p.solve_height();
    b = p.bump();
    double before = st.sse();
    for (int pass = 0; pass < 20; ++pass) {
      GaussianBump nb = refine_bump(st, b, lim, tol);
      st.add_bump(nb, -1.0);
      const double after = st.sse();
      st.add_bump(nb, +1.0);
      b = nb;
      if (before - after <= 1e-9 * before) break;
      before = after;
    }
    st.add_bump(b, -1.0);
    return b;
  };
  for (std::size_t i = 0; i < components; ++i) bumps.push_back(seed_bump());

  auto recompute_residual = [&](const std::vector<GaussianBump>& bs, double bs_base) {
    st.residual = grid.values;
    for (double& v : st.residual) v -= bs_base;
    for (const auto& b : bs) st.add_bump(b, -1.0);
    return st.sse();
  };

  double sse = recompute_residual(bumps, base);
  result.seeded_rmse = std::sqrt(sse / n);

  std::vector<std::size_t> order(components);
  std::iota(order.begin(), order.end(), 0);
  for (int round = 0; round < config.max_rounds; ++round) {
    const auto prev_bumps = bumps;
    const double prev_base = base;
    const double prev_sse = sse;

    RandomStream rng(seed, "fit-round:" + std::to_string(round));
    std::shuffle(order.begin(), order.end(), rng.engine());
    for (std::size_t i : order) {
      st.add_bump(bumps[i], +1.0);
      bumps[i] = refine_bump(st, bumps[i], lim, tol);
      st.add_bump(bumps[i], -1.0);
    }
    if (config.refine_base) {
      const double shift = std::accumulate(st.residual.begin(), st.residual.end(), 0.0) / n;
      base += shift;
    }
    sse = recompute_residual(bumps, base);
    if (sse > prev_sse) {
      // Only reachable through rounding; keep the better model.
      bumps = prev_bumps;
      base = prev_base;
      sse = prev_sse;
      break;
    }
    result.history.push_back(std::sqrt(sse / n));
    if (prev_sse - sse <= config.relative_tolerance * prev_sse) break;
  }

  if (config.joint_iterations > 0)
    sse = JointPolish(grid, st, lim).run(bumps, base, config.joint_iterations, result.history);

  // Relocation: the bump whose removal costs least is re-seeded at the
  // largest remaining residual and the mixture is polished again. Candidates
  // are kept only when they lower the squared error, so the history stays
  // non-increasing.
  std::vector<std::size_t> tried;
  for (int attempt = 0; attempt < config.relocations && components > 1; ++attempt) {
    recompute_residual(bumps, base);
    std::size_t weakest = components;
    double weakest_cost = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < components; ++i) {
      if (std::find(tried.begin(), tried.end(), i) != tried.end()) continue;
      st.add_bump(bumps[i], +1.0);
      const double cost = st.sse() - sse;
      st.add_bump(bumps[i], -1.0);
      if (cost < weakest_cost) {
        weakest_cost = cost;
        weakest = i;
      }
    }
    if (weakest == components) break;

    std::vector<GaussianBump> cand = bumps;
    double cand_base = base;
    st.add_bump(cand[weakest], +1.0);
    cand[weakest] = seed_bump();
    std::vector<double> cand_history;
    double cand_sse = recompute_residual(cand, cand_base);
    if (config.joint_iterations > 0)
      cand_sse = JointPolish(grid, st, lim).run(cand, cand_base, config.joint_iterations,
                                                cand_history);
    if (cand_sse < sse) {
      bumps = std::move(cand);
      base = cand_base;
      sse = cand_sse;
      result.history.push_back(std::sqrt(sse / n));
      tried.clear();
    } else {
      tried.push_back(weakest);
    }
  }
  recompute_residual(bumps, base);

  result.model = TerrainModel(std::move(bumps), base);
  result.rmse = std::sqrt(sse / n);
  return result;
}

}  // namespace terradeploy
