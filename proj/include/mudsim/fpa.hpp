#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mudsim/errors.hpp"
#include "mudsim/objective.hpp"
#include "mudsim/rng.hpp"

namespace mudsim {

// Tuning knobs of the modified flower pollination detector. Defaults are the
// published baseline; experiment configs may shrink max_iter for runtime.
struct FpaConfig {
  std::size_t num_flowers = 25;
  std::size_t max_iter = 2000;
  double p_change0 = 0.35;   // initial probability of global pollination
  double gamma_d0 = 0.1;     // symbol-part step scale, constant over iterations
  double gamma_a0 = 0.05;    // fading-part step scale at t=0, decays 10% every max_iter/4
  double levy_lambda = 1.0;  // tail exponent of the Levy step, admissible [0.75, 1.95]
  double levy_beta = 1.5;    // documentation constant: exponent of the target density
  double pc_step0 = 0.05;    // delta0 of the entropy controller
  double entropy_low = 0.6;  // dead-band (fractions of ln num_flowers)
  double entropy_high = 0.9;
  double pc_min = 0.05;
  double pc_max = 0.95;
  double d_init_halfwidth = 1.0;  // d-part init Uniform[-w, w]
  double a_init_lo = 0.1;         // cold-start a-part init Uniform[lo, hi]
  double a_init_hi = 1.2;
  double warm_jitter_std = 0.02;  // jitter around the warm-start fading estimate
  SymbolMetric symbol_metric = SymbolMetric::kContinuous;
  bool record_traces = false;
};

inline void validate(const FpaConfig& cfg) {
  if (cfg.num_flowers < 2) throw ConfigError("fpa: num_flowers must be >= 2");
  if (cfg.max_iter < 1) throw ConfigError("fpa: max_iter must be >= 1");
  if (cfg.p_change0 < 0.0 || cfg.p_change0 > 1.0)
    throw ConfigError("fpa: p_change0 must lie in [0, 1]");
  if (cfg.levy_lambda < 0.75 || cfg.levy_lambda > 1.95)
    throw ConfigError("fpa: levy_lambda must lie in the admissible range [0.75, 1.95], got " +
                      std::to_string(cfg.levy_lambda));
  if (cfg.gamma_d0 <= 0.0 || cfg.gamma_a0 <= 0.0)
    throw ConfigError("fpa: step scales gamma_d0 and gamma_a0 must be positive");
  if (cfg.gamma_d0 <= cfg.gamma_a0)
    throw ConfigError("fpa: gamma_d0 must exceed gamma_a0 (symbol part moves faster)");
  if (cfg.pc_step0 <= 0.0) throw ConfigError("fpa: pc_step0 must be positive");
  if (!(cfg.entropy_low < cfg.entropy_high) || cfg.entropy_low < 0.0 || cfg.entropy_high > 1.0)
    throw ConfigError("fpa: entropy band must satisfy 0 <= low < high <= 1");
  if (!(cfg.pc_min < cfg.pc_max) || cfg.pc_min < 0.0 || cfg.pc_max > 1.0)
    throw ConfigError("fpa: p_change clamp must satisfy 0 <= min < max <= 1");
  if (cfg.d_init_halfwidth <= 0.0 || cfg.d_init_halfwidth > kSymbolBox)
    throw ConfigError("fpa: d_init_halfwidth must lie in (0, 1.5]");
  if (!(cfg.a_init_lo < cfg.a_init_hi))
    throw ConfigError("fpa: a-part init range is empty");
  if (cfg.warm_jitter_std < 0.0) throw ConfigError("fpa: warm_jitter_std must be >= 0");
}

// Mantegna scale for a Levy step of exponent lambda:
//   sigma = { Gamma(1+l) sin(pi l/2) / [ Gamma((1+l)/2) l 2^((l-1)/2) ] }^(1/l).
inline double mantegna_sigma(double lambda) {
  const double num = std::tgamma(1.0 + lambda) * std::sin(M_PI * lambda / 2.0);
  const double den = std::tgamma((1.0 + lambda) / 2.0) * lambda * std::pow(2.0, (lambda - 1.0) / 2.0);
  return std::pow(num / den, 1.0 / lambda);
}

// Fading-part step scale at iteration t (1-based): 10% decay every max_iter/4.
inline double gamma_a_at(std::size_t t, const FpaConfig& cfg) {
  const std::size_t stage = (4 * t) / cfg.max_iter;
  return cfg.gamma_a0 * std::pow(0.9, static_cast<double>(stage));
}

namespace detail {

// Heavy-tailed step per coordinate: s = u / |v|^(1/lambda), u ~ N(0, sigma^2),
// v ~ N(0,1). Draw order (u then v, coordinate by coordinate) is part of the
// reproducibility contract.
inline void levy_fill(Eigen::Ref<Eigen::VectorXd> out, double lambda, double sigma, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double u = sigma * gauss(rng);
    const double v = gauss(rng);
    out[i] = u / std::pow(std::abs(v), 1.0 / lambda);
  }
}

inline void clip_candidate(Candidate& c) {
  for (Eigen::Index i = 0; i < c.d.size(); ++i) c.d[i] = std::clamp(c.d[i], -kSymbolBox, kSymbolBox);
  for (Eigen::Index i = 0; i < c.a.size(); ++i) c.a[i] = std::clamp(c.a[i], kFadingBoxLo, kFadingBoxHi);
}

// Global pollination with the Levy vectors supplied (test hook and hot path).
inline void global_step_with(Candidate& out, const Candidate& flower, const Candidate& best,
                             const Eigen::VectorXd& levy_d, const Eigen::VectorXd& levy_a,
                             double gamma_d, double gamma_a) {
  out.d = flower.d.array() + gamma_d * levy_d.array() * (best.d - flower.d).array();
  out.a = flower.a.array() + gamma_a * levy_a.array() * (best.a - flower.a).array();
  clip_candidate(out);
}

// Local pollination with the blend factor supplied (test hook and hot path).
inline void local_step_with(Candidate& out, const Candidate& flower, const Candidate& xj,
                            const Candidate& xk, double eps) {
  out.d = flower.d + eps * (xj.d - xk.d);
  out.a = flower.a + eps * (xj.a - xk.a);
  clip_candidate(out);
}

}  // namespace detail

// Heavy-tailed step vector via the Mantegna construction.
inline Eigen::VectorXd levy_step(std::size_t dim, double lambda, Rng& rng) {
  if (lambda < 0.75 || lambda > 1.95)
    throw ConfigError("fpa: levy_lambda outside the admissible range [0.75, 1.95]");
  Eigen::VectorXd out(static_cast<Eigen::Index>(dim));
  detail::levy_fill(out, lambda, mantegna_sigma(lambda), rng);
  return out;
}

// Move a flower toward the population best, with independent Levy vectors for
// the symbol and fading parts and distinct step scales (gamma_d > gamma_a).
inline Candidate global_pollinate(const Candidate& flower, const Candidate& best, double gamma_d,
                                  double gamma_a, double lambda, Rng& rng) {
  const double sigma = mantegna_sigma(lambda);
  Eigen::VectorXd levy_d(flower.d.size()), levy_a(flower.a.size());
  detail::levy_fill(levy_d, lambda, sigma, rng);
  detail::levy_fill(levy_a, lambda, sigma, rng);
  Candidate out;
  detail::global_step_with(out, flower, best, levy_d, levy_a, gamma_d, gamma_a);
  return out;
}

// Blend a flower with the difference of two population members; one scalar
// blend factor per call, applied to all coordinates.
inline Candidate local_pollinate(const Candidate& flower, const Candidate& xj, const Candidate& xk,
                                 Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double eps = unif(rng);
  Candidate out;
  detail::local_step_with(out, flower, xj, xk, eps);
  return out;
}

// Entropy-driven adaptation of the global-pollination probability. The caller
// enforces the update cadence (every max_iter/10 iterations, skipping the
// first and last windows); this function applies the banded step and clamp.
inline double update_change_probability(double p_change, double entropy, std::size_t t,
                                        const FpaConfig& cfg) {
  const double h = entropy / std::log(static_cast<double>(cfg.num_flowers));
  const double delta = cfg.pc_step0 * (1.0 - static_cast<double>(t) / static_cast<double>(cfg.max_iter));
  double p = p_change;
  if (h > cfg.entropy_high)
    p += delta;  // population stagnating: boost global pollination
  else if (h < cfg.entropy_low)
    p -= delta;  // fitness widely spread: favor local refinement
  return std::clamp(p, cfg.pc_min, cfg.pc_max);
}

// Per-symbol detection output. fading_estimates doubles as the warm state for
// the next symbol period.
struct DetectionResult {
  Eigen::VectorXd symbols;           // hard decisions, entries +-1 (sign(0) := +1)
  Eigen::VectorXd soft_symbols;      // best flower's d part, unquantized
  Eigen::VectorXd fading_estimates;  // best flower's a part
  double best_fitness = 0.0;
  std::size_t evaluations = 0;
  std::vector<double> fitness_trace;  // [0] = after init, [t] = after sweep t
  std::vector<double> entropy_trace;  // raw population entropy, nats
  std::vector<double> pc_trace;       // p_change in effect after iteration t
};

// Full detection loop for one symbol period (steps: init population, iterate
// global/local pollination with greedy replacement, adapt p_change on the
// max_iter/10 grid, return the best flower).
inline DetectionResult fpa_detect(LikelihoodEvaluator& eval, const FpaConfig& cfg,
                                  const std::optional<Eigen::VectorXd>& warm_fading, Rng& rng) {
  validate(cfg);
  const Eigen::Index u = eval.sqrt_energies().size();
  if (warm_fading && warm_fading->size() != u)
    throw ConfigError("fpa: warm_fading has wrong length");

  const std::size_t n_fl = cfg.num_flowers;
  const double sigma = mantegna_sigma(cfg.levy_lambda);
  std::uniform_real_distribution<double> unif01(0.0, 1.0);
  std::uniform_real_distribution<double> d_init(-cfg.d_init_halfwidth, cfg.d_init_halfwidth);
  std::uniform_real_distribution<double> a_init(cfg.a_init_lo, cfg.a_init_hi);
  std::normal_distribution<double> jitter(0.0, 1.0);

  // Population init: d always re-randomized; a warm-started when available.
  std::vector<Candidate> flowers(n_fl);
  Eigen::VectorXd fitness(static_cast<Eigen::Index>(n_fl));
  std::size_t evaluations = 0;
  for (std::size_t f = 0; f < n_fl; ++f) {
    Candidate& c = flowers[f];
    c.d.resize(u);
    c.a.resize(u);
    for (Eigen::Index i = 0; i < u; ++i) c.d[i] = d_init(rng);
    if (warm_fading) {
      for (Eigen::Index i = 0; i < u; ++i)
        c.a[i] = (*warm_fading)[i] + (cfg.warm_jitter_std > 0.0 ? cfg.warm_jitter_std * jitter(rng) : 0.0);
    } else {
      for (Eigen::Index i = 0; i < u; ++i) c.a[i] = a_init(rng);
    }
    detail::clip_candidate(c);
    fitness[static_cast<Eigen::Index>(f)] = eval(c);
    ++evaluations;
  }
  if (!fitness.allFinite())
    throw NumericalError("fpa: non-finite fitness after population init");

  Eigen::Index best_idx = 0;
  fitness.maxCoeff(&best_idx);
  Candidate best = flowers[static_cast<std::size_t>(best_idx)];
  double best_fit = fitness[best_idx];

  DetectionResult res;
  const std::size_t grid = std::max<std::size_t>(1, cfg.max_iter / 10);
  double p_change = cfg.p_change0;
  if (cfg.record_traces) {
    res.fitness_trace.reserve(cfg.max_iter + 1);
    res.entropy_trace.reserve(cfg.max_iter + 1);
    res.pc_trace.reserve(cfg.max_iter + 1);
    res.fitness_trace.push_back(best_fit);
    res.entropy_trace.push_back(population_entropy(normalize_fitness(fitness)));
    res.pc_trace.push_back(p_change);
  }

  Candidate trial;
  trial.d.resize(u);
  trial.a.resize(u);
  Eigen::VectorXd levy_d(u), levy_a(u);
  std::uniform_int_distribution<std::size_t> pick_j(0, n_fl - 1);
  std::uniform_int_distribution<std::size_t> pick_k(0, n_fl - 2);

  for (std::size_t t = 1; t <= cfg.max_iter; ++t) {
    const double gamma_a = gamma_a_at(t, cfg);
    for (std::size_t f = 0; f < n_fl; ++f) {
      if (unif01(rng) < p_change) {
        detail::levy_fill(levy_d, cfg.levy_lambda, sigma, rng);
        detail::levy_fill(levy_a, cfg.levy_lambda, sigma, rng);
        detail::global_step_with(trial, flowers[f], best, levy_d, levy_a, cfg.gamma_d0, gamma_a);
      } else {
        const std::size_t j = pick_j(rng);
        std::size_t k = pick_k(rng);
        if (k >= j) ++k;
        const double eps = unif01(rng);
        detail::local_step_with(trial, flowers[f], flowers[j], flowers[k], eps);
      }
      const double fit = eval(trial);
      ++evaluations;
      if (!std::isfinite(fit))
        throw NumericalError("fpa: non-finite fitness at iteration " + std::to_string(t));
      if (fit > fitness[static_cast<Eigen::Index>(f)]) {  // strict greedy replacement
        std::swap(flowers[f].d, trial.d);
        std::swap(flowers[f].a, trial.a);
        fitness[static_cast<Eigen::Index>(f)] = fit;
      }
    }

    Eigen::Index sweep_idx = 0;
    const double sweep_best = fitness.maxCoeff(&sweep_idx);
    if (sweep_best > best_fit) {
      best_fit = sweep_best;
      best = flowers[static_cast<std::size_t>(sweep_idx)];
    }

    const bool on_grid = (t % grid == 0) && t > grid && t + grid <= cfg.max_iter;
    if (on_grid || cfg.record_traces) {
      const double entropy = population_entropy(normalize_fitness(fitness));
      if (on_grid) p_change = update_change_probability(p_change, entropy, t, cfg);
      if (cfg.record_traces) {
        res.fitness_trace.push_back(best_fit);
        res.entropy_trace.push_back(entropy);
        res.pc_trace.push_back(p_change);
      }
    }
  }

  canonicalize(best);  // resolve the (a,d) <-> (-a,-d) pairing; fitness-neutral
  res.symbols.resize(u);
  for (Eigen::Index i = 0; i < u; ++i) res.symbols[i] = best.d[i] < 0.0 ? -1.0 : 1.0;
  res.soft_symbols = best.d;
  res.fading_estimates = best.a;
  res.best_fitness = best_fit;
  res.evaluations = evaluations;
  return res;
}

// Convenience overload building the evaluator in place.
inline DetectionResult fpa_detect(const Eigen::VectorXd& z, const Eigen::MatrixXd& r,
                                  const Eigen::VectorXd& energies, const FpaConfig& cfg,
                                  const std::optional<Eigen::VectorXd>& warm_fading, Rng& rng) {
  LikelihoodEvaluator eval(r, energies, cfg.symbol_metric);
  eval.set_observation(z);
  return fpa_detect(eval, cfg, warm_fading, rng);
}

}  // namespace mudsim
