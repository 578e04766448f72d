#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstddef>
#include <optional>
#include <vector>

#include "mudsim/errors.hpp"
#include "mudsim/fpa.hpp"
#include "mudsim/objective.hpp"
#include "mudsim/rng.hpp"

namespace mudsim {

// Generic generational GA over the same [d | a] encoding and fitness as the
// FPA detector. The budget is expressed in fitness evaluations so the two
// heuristics can be compared at equal computational load.
struct GaConfig {
  std::size_t population = 100;
  std::size_t max_evaluations = 25 * 2001;  // matches the FPA default budget
  double crossover_rate = 0.9;              // per-pair uniform crossover probability
  double mutation_std = 0.05;
  std::size_t tournament_size = 2;
  std::size_t elite_count = 1;
  double d_init_halfwidth = 1.0;
  double a_init_lo = 0.1;
  double a_init_hi = 1.2;
  double warm_jitter_std = 0.02;
  SymbolMetric symbol_metric = SymbolMetric::kContinuous;
};

inline void validate(const GaConfig& cfg) {
  if (cfg.population < 2) throw ConfigError("ga: population must be >= 2");
  if (cfg.max_evaluations < cfg.population)
    throw ConfigError("ga: evaluation budget smaller than one generation");
  if (cfg.crossover_rate < 0.0 || cfg.crossover_rate > 1.0)
    throw ConfigError("ga: crossover_rate must lie in [0, 1]");
  if (cfg.mutation_std < 0.0) throw ConfigError("ga: mutation_std must be >= 0");
  if (cfg.tournament_size < 1) throw ConfigError("ga: tournament_size must be >= 1");
  if (cfg.elite_count >= cfg.population) throw ConfigError("ga: elite_count must be < population");
}

// Tournament selection, uniform crossover, per-gene Gaussian mutation at rate
// 1/(2U), elitism. Mutated children are clipped to the same search box as the
// FPA operators. Returns the same DetectionResult shape as fpa_detect.
inline DetectionResult ga_detect(LikelihoodEvaluator& eval, const GaConfig& cfg,
                                 const std::optional<Eigen::VectorXd>& warm_fading, Rng& rng) {
  validate(cfg);
  const Eigen::Index u = eval.sqrt_energies().size();
  if (warm_fading && warm_fading->size() != u)
    throw ConfigError("ga: warm_fading has wrong length");

  const std::size_t pop_n = cfg.population;
  const double mutation_rate = 1.0 / (2.0 * static_cast<double>(u));
  std::uniform_real_distribution<double> unif01(0.0, 1.0);
  std::uniform_real_distribution<double> d_init(-cfg.d_init_halfwidth, cfg.d_init_halfwidth);
  std::uniform_real_distribution<double> a_init(cfg.a_init_lo, cfg.a_init_hi);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick(0, pop_n - 1);

  std::vector<Candidate> pop(pop_n), next(pop_n);
  std::vector<double> fitness(pop_n), next_fitness(pop_n);
  std::size_t evaluations = 0;

  for (std::size_t p = 0; p < pop_n; ++p) {
    Candidate& c = pop[p];
    c.d.resize(u);
    c.a.resize(u);
    for (Eigen::Index i = 0; i < u; ++i) c.d[i] = d_init(rng);
    if (warm_fading) {
      for (Eigen::Index i = 0; i < u; ++i)
        c.a[i] = (*warm_fading)[i] + (cfg.warm_jitter_std > 0.0 ? cfg.warm_jitter_std * gauss(rng) : 0.0);
    } else {
      for (Eigen::Index i = 0; i < u; ++i) c.a[i] = a_init(rng);
    }
    detail::clip_candidate(c);
    fitness[p] = eval(c);
    ++evaluations;
    if (!std::isfinite(fitness[p])) throw NumericalError("ga: non-finite fitness in init");
    next[p].d.resize(u);
    next[p].a.resize(u);
  }

  auto tournament = [&](void) -> std::size_t {
    std::size_t winner = pick(rng);
    for (std::size_t c = 1; c < cfg.tournament_size; ++c) {
      const std::size_t rival = pick(rng);
      if (fitness[rival] > fitness[winner]) winner = rival;
    }
    return winner;
  };

  // Each generation re-evaluates everything except the carried-over elites.
  while (evaluations + (pop_n - cfg.elite_count) <= cfg.max_evaluations) {
    std::vector<std::size_t> order(pop_n);
    for (std::size_t p = 0; p < pop_n; ++p) order[p] = p;
    std::partial_sort(order.begin(), order.begin() + static_cast<long>(cfg.elite_count), order.end(),
                      [&](std::size_t lhs, std::size_t rhs) { return fitness[lhs] > fitness[rhs]; });
    for (std::size_t e = 0; e < cfg.elite_count; ++e) {
      next[e] = pop[order[e]];
      next_fitness[e] = fitness[order[e]];
    }

    for (std::size_t slot = cfg.elite_count; slot < pop_n; slot += 2) {
      const Candidate& pa = pop[tournament()];
      const Candidate& pb = pop[tournament()];
      Candidate& ca = next[slot];
      const bool has_second = slot + 1 < pop_n;
      Candidate& cb = has_second ? next[slot + 1] : next[slot];

      const bool cross = unif01(rng) < cfg.crossover_rate;
      for (Eigen::Index i = 0; i < u; ++i) {
        const bool swap_d = cross && unif01(rng) < 0.5;
        ca.d[i] = swap_d ? pb.d[i] : pa.d[i];
        if (has_second) cb.d[i] = swap_d ? pa.d[i] : pb.d[i];
      }
      for (Eigen::Index i = 0; i < u; ++i) {
        const bool swap_a = cross && unif01(rng) < 0.5;
        ca.a[i] = swap_a ? pb.a[i] : pa.a[i];
        if (has_second) cb.a[i] = swap_a ? pa.a[i] : pb.a[i];
      }

      for (std::size_t which = 0; which < (has_second ? 2u : 1u); ++which) {
        Candidate& child = which == 0 ? ca : cb;
        for (Eigen::Index i = 0; i < u; ++i) {
          if (unif01(rng) < mutation_rate) child.d[i] += cfg.mutation_std * gauss(rng);
          if (unif01(rng) < mutation_rate) child.a[i] += cfg.mutation_std * gauss(rng);
        }
        detail::clip_candidate(child);
      }
    }

    for (std::size_t p = cfg.elite_count; p < pop_n; ++p) {
      next_fitness[p] = eval(next[p]);
      ++evaluations;
      if (!std::isfinite(next_fitness[p])) throw NumericalError("ga: non-finite fitness");
    }
    std::swap(pop, next);
    std::swap(fitness, next_fitness);
  }

  std::size_t best = 0;
  for (std::size_t p = 1; p < pop_n; ++p)
    if (fitness[p] > fitness[best]) best = p;

  Candidate winner = pop[best];
  canonicalize(winner);  // resolve the (a,d) <-> (-a,-d) pairing; fitness-neutral
  DetectionResult res;
  res.symbols.resize(u);
  for (Eigen::Index i = 0; i < u; ++i) res.symbols[i] = winner.d[i] < 0.0 ? -1.0 : 1.0;
  res.soft_symbols = winner.d;
  res.fading_estimates = winner.a;
  res.best_fitness = fitness[best];
  res.evaluations = evaluations;
  return res;
}

inline DetectionResult ga_detect(const Eigen::VectorXd& z, const Eigen::MatrixXd& r,
                                 const Eigen::VectorXd& energies, const GaConfig& cfg,
                                 const std::optional<Eigen::VectorXd>& warm_fading, Rng& rng) {
  LikelihoodEvaluator eval(r, energies, cfg.symbol_metric);
  eval.set_observation(z);
  return ga_detect(eval, cfg, warm_fading, rng);
}

}  // namespace mudsim
