#include "terradeploy/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <numeric>
#include <stdexcept>

namespace terradeploy {

void GaConfig::validate() const {
  if (population < 2) throw std::invalid_argument("GA population must be >= 2");
  if (generations < 0) throw std::invalid_argument("GA generations must be >= 0");
  if (!(elites >= 1 && elites < population))
    throw std::invalid_argument("GA elite count must lie in [1, population)");
  if (!(tournament >= 2 && tournament <= population))
    throw std::invalid_argument("GA tournament size must lie in [2, population]");
  if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0))
    throw std::invalid_argument("GA mutation probability must lie in [0, 1]");
  if (mutation_width)
    for (double w : *mutation_width)
      if (!(w >= 0.0)) throw std::invalid_argument("GA mutation widths must be >= 0");
}

void PsoConfig::validate() const {
  if (particles < 1) throw std::invalid_argument("PSO needs at least one particle");
  if (iterations < 0) throw std::invalid_argument("PSO iterations must be >= 0");
  if (!(w_max >= w_min && w_min >= 0.0))
    throw std::invalid_argument("PSO inertia needs w_max >= w_min >= 0");
  if (passes < 1) throw std::invalid_argument("PSO passes must be >= 1");
  if (!(init_velocity_fraction >= 0.0))
    throw std::invalid_argument("PSO initial velocity fraction must be >= 0");
}

std::pair<std::vector<double>, std::vector<double>> uniform_crossover(
    std::span<const double> a, std::span<const double> b, RandomStream& rng) {
  if (a.size() != b.size()) throw std::invalid_argument("crossover: parent size mismatch");
  std::vector<double> c1(a.size()), c2(a.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    const bool keep = rng.uniform01() < 0.5;
    c1[j] = keep ? a[j] : b[j];
    c2[j] = keep ? b[j] : a[j];
  }
  return {std::move(c1), std::move(c2)};
}

void mutate(std::span<double> genes, std::span<const double> width, double p, RandomStream& rng) {
  for (std::size_t j = 0; j < genes.size(); ++j) {
    if (rng.uniform01() >= p) continue;
    const double w = width[j % width.size()];
    genes[j] += w > 0.0 ? rng.uniform(-w, w) : 0.0;
  }
}

std::pair<std::size_t, std::size_t> tournament_select(std::span<const double> fitness,
                                                      std::size_t l, RandomStream& rng) {
  const std::size_t n = fitness.size();
  if (l < 2 || l > n) throw std::invalid_argument("tournament size must lie in [2, n]");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates: the first l entries are a uniform draw without replacement.
  for (std::size_t k = 0; k < l; ++k) std::swap(idx[k], idx[k + rng.index(n - k)]);
  std::sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(l),
            [&](std::size_t a, std::size_t b) {
              return fitness[a] > fitness[b] || (fitness[a] == fitness[b] && a < b);
            });
  return {idx[0], idx[1]};
}

void pso_velocity(std::span<double> v, std::span<const double> s, std::span<const double> pbest,
                  std::span<const double> gbest, double w, double c1, double c2, double r1,
                  double r2) {
  for (std::size_t j = 0; j < v.size(); ++j)
    v[j] = w * v[j] + c1 * r1 * (pbest[j] - s[j]) + c2 * r2 * (gbest[j] - s[j]);
}

namespace {

struct Candidate {
  Deployment deployment;
  FitnessReport report;
};

std::array<double, kGenesPerUav> gene_range(const Problem& p) {
  const auto lo = p.gene_lower();
  const auto hi = p.gene_upper();
  std::array<double, kGenesPerUav> r{};
  for (std::size_t j = 0; j < kGenesPerUav; ++j) r[j] = hi[j] - lo[j];
  return r;
}

}  // namespace

StageResult ga_stage(const Problem& problem, const GaConfig& ga, std::uint64_t seed) {
  ga.validate();
  const auto n = static_cast<std::size_t>(ga.population);
  StageResult out;

  std::array<double, kGenesPerUav> width{};
  if (ga.mutation_width) {
    width = *ga.mutation_width;
  } else {
    width = gene_range(problem);
    for (double& w : width) w *= 0.1;
  }

  std::vector<Candidate> pop;
  pop.reserve(n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream rng(seed, "ga-init:" + std::to_string(i));
    Candidate c{problem.random_deployment(rng), {}};
    c.report = problem.evaluate(c.deployment);
    ++out.evaluations;
    pop.push_back(std::move(c));
  }

  const auto by_fitness = [](const Candidate& a, const Candidate& b) {
    return a.report.fitness > b.report.fitness;
  };
  std::stable_sort(pop.begin(), pop.end(), by_fitness);
  out.ga_best.push_back(pop.front().report.fitness);

  const std::size_t pairs =
      ga.offspring == GaConfig::Offspring::pair ? 1 : std::max<std::size_t>(1, n / 2);
  std::vector<double> fit(n);
  for (int t = 0; t < ga.generations; ++t) {
    RandomStream rng(seed, "ga-gen:" + std::to_string(t));
    for (std::size_t i = 0; i < n; ++i) fit[i] = pop[i].report.fitness;

    std::vector<Candidate> children;
    for (std::size_t k = 0; k < pairs; ++k) {
      const auto [a, b] = tournament_select(fit, static_cast<std::size_t>(ga.tournament), rng);
      const auto ga_genes = to_genes(pop[a].deployment);
      const auto gb_genes = to_genes(pop[b].deployment);
      auto [c1, c2] = uniform_crossover(ga_genes, gb_genes, rng);
      for (auto* genes : {&c1, &c2}) {
        mutate(*genes, width, ga.mutation_prob, rng);
        Deployment d = pop[a].deployment;
        assign_genes(d, *genes);
        Candidate c{problem.repair(d).deployment, {}};
        c.report = problem.evaluate(c.deployment);
        ++out.evaluations;
        children.push_back(std::move(c));
      }
    }
    // Truncating population + children to the top N_g keeps every elite.
    // The population is kept sorted, so the stable sort breaks ties toward
    // lower candidate index.
    for (auto& c : children) pop.push_back(std::move(c));
    std::stable_sort(pop.begin(), pop.end(), by_fitness);
    pop.resize(n);
    out.ga_best.push_back(pop.front().report.fitness);
  }

  out.deployment = pop.front().deployment;
  out.report = pop.front().report;
  return out;
}

StageResult pso_stage(const Problem& problem, const Deployment& start, const PsoConfig& pso,
                      std::uint64_t seed) {
  pso.validate();
  const std::size_t m_count = problem.uav_count();
  if (start.size() != m_count) throw std::invalid_argument("pso_stage: deployment size mismatch");

  StageResult out;
  out.deployment = start;
  std::vector<Problem::UavTerms> terms;
  terms.reserve(m_count);
  for (const auto& u : start.uavs) terms.push_back(problem.uav_terms(u));

  const auto range = gene_range(problem);
  const auto np = static_cast<std::size_t>(pso.particles);
  using Genes = std::array<double, kGenesPerUav>;

  for (int pass = 0; pass < pso.passes; ++pass) {
    for (std::size_t m = 0; m < m_count; ++m) {
      const std::string tag = "pso:" + std::to_string(pass) + ":" + std::to_string(m);
      const std::unique_ptr<bool[]> mask(new bool[m_count]());
      mask[m] = true;
      const std::span<const bool> movable(mask.get(), m_count);

      Deployment work = out.deployment;
      auto score = [&](const UavState& u, Problem::UavTerms& t_out) {
        work.uavs[m] = u;
        t_out = problem.uav_terms(u);
        auto saved = std::move(terms[m]);
        terms[m] = t_out;
        const FitnessReport r = problem.combine(work, terms);
        terms[m] = std::move(saved);
        ++out.evaluations;
        return r;
      };
      auto place = [&](const Genes& g) {
        Deployment d = out.deployment;
        assign_uav_genes(d.uavs[m], g);
        return problem.repair(d, movable).deployment.uavs[m];
      };

      std::vector<Genes> pos(np), vel(np), pbest(np);
      std::vector<double> pbest_fit(np);
      Genes gbest{};
      double gbest_fit = 0.0;
      Problem::UavTerms gbest_terms;
      FitnessReport gbest_report;

      RandomStream init(seed, tag + ":init");
      for (std::size_t i = 0; i < np; ++i) {
        UavState u = i == 0 ? out.deployment.uavs[m] : problem.random_uav(m, init);
        if (i != 0) u = place(uav_genes(u));
        pos[i] = uav_genes(u);
        for (std::size_t j = 0; j < kGenesPerUav; ++j) {
          const double v = pso.init_velocity_fraction * range[j];
          vel[i][j] = v > 0.0 ? init.uniform(-v, v) : 0.0;
        }
        Problem::UavTerms t;
        const FitnessReport r = score(u, t);
        pbest[i] = pos[i];
        pbest_fit[i] = r.fitness;
        if (i == 0 || r.fitness > gbest_fit) {
          gbest = pos[i];
          gbest_fit = r.fitness;
          gbest_terms = std::move(t);
          gbest_report = r;
        }
      }
      std::vector<double> history{gbest_fit};

      for (int t = 0; t < pso.iterations; ++t) {
        const double w = pso.inertia(t);
        for (std::size_t i = 0; i < np; ++i) {
          RandomStream rng(seed, tag + ":" + std::to_string(i) + ":" + std::to_string(t));
          const double r1 = rng.uniform01();
          const double r2 = rng.uniform01();
          pso_velocity(vel[i], pos[i], pbest[i], gbest, w, pso.c1, pso.c2, r1, r2);
          Genes moved;
          for (std::size_t j = 0; j < kGenesPerUav; ++j) moved[j] = pos[i][j] + vel[i][j];
          const UavState u = place(moved);
          pos[i] = uav_genes(u);
          Problem::UavTerms terms_i;
          const FitnessReport r = score(u, terms_i);
          if (r.fitness > pbest_fit[i]) {
            pbest[i] = pos[i];
            pbest_fit[i] = r.fitness;
          }
          if (r.fitness > gbest_fit) {
            gbest = pos[i];
            gbest_fit = r.fitness;
            gbest_terms = std::move(terms_i);
            gbest_report = r;
          }
        }
        history.push_back(gbest_fit);
      }

      assign_uav_genes(out.deployment.uavs[m], gbest);
      terms[m] = std::move(gbest_terms);
      out.report = gbest_report;
      out.pso_gbest.push_back(std::move(history));
    }
  }
  if (m_count == 0) out.report = problem.evaluate(out.deployment);
  return out;
}

OptimizeResult optimize(const Problem& problem, const GaConfig& ga, const PsoConfig& pso,
                        std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  StageResult g = ga_stage(problem, ga, seed);
  StageResult p = pso_stage(problem, g.deployment, pso, seed);
  OptimizeResult r;
  r.deployment = std::move(p.deployment);
  r.trace.seed = seed;
  r.trace.ga_best = std::move(g.ga_best);
  r.trace.pso_gbest = std::move(p.pso_gbest);
  r.trace.ga_report = g.report;
  r.trace.final_report = p.report;
  r.trace.evaluations = g.evaluations + p.evaluations;
  r.trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

OptimizeResult baseline_pso_only(const Problem& problem, const PsoConfig& pso, std::uint64_t seed) {
  const auto t0 = std::chrono::steady_clock::now();
  RandomStream rng(seed, "pso-only:init");
  const Deployment start = problem.random_deployment(rng);
  StageResult p = pso_stage(problem, start, pso, seed);
  OptimizeResult r;
  r.deployment = std::move(p.deployment);
  r.trace.seed = seed;
  r.trace.pso_gbest = std::move(p.pso_gbest);
  r.trace.final_report = p.report;
  r.trace.evaluations = p.evaluations;
  r.trace.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace terradeploy
