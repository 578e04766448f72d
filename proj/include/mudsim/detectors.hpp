#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "mudsim/errors.hpp"
#include "mudsim/objective.hpp"

namespace mudsim {

inline double sign_decision(double x) { return x < 0.0 ? -1.0 : 1.0; }  // sign(0) := +1

// Bank of single-user matched filters: decide each user from its own output.
inline Eigen::VectorXd matched_filter_detect(const Eigen::VectorXd& z) {
  Eigen::VectorXd d(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) d[i] = sign_decision(z[i]);
  return d;
}

// Shared solver core for the linear multiuser detectors. Factorizing once per
// problem instance keeps sweep loops cheap without changing any decision.
class LinearDetector {
 public:
  LinearDetector(const Eigen::MatrixXd& filter_matrix, const std::string& name) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(filter_matrix);
    if (eig.eigenvalues().minCoeff() <= 1e-9)
      throw DetectorUnavailable(name + ": filter matrix is singular (min eigenvalue " +
                                std::to_string(eig.eigenvalues().minCoeff()) + ")");
    solver_.compute(filter_matrix);
  }

  Eigen::VectorXd soft(const Eigen::VectorXd& z) const { return solver_.solve(z); }

  // Batch form: rows of z_rows are per-symbol observations.
  Eigen::MatrixXd soft_frame(const Eigen::MatrixXd& z_rows) const {
    return solver_.solve(z_rows.transpose()).transpose();
  }

  Eigen::VectorXd decide(const Eigen::VectorXd& z) const {
    Eigen::VectorXd y = soft(z);
    for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = sign_decision(y[i]);
    return y;
  }

 private:
  Eigen::LDLT<Eigen::MatrixXd> solver_;
};

inline LinearDetector make_decorrelator(const Eigen::MatrixXd& r) {
  return LinearDetector(r, "decorrelator");
}

// MMSE with genie-aided noise variance and energies: filter (R + s^2 D)^{-1},
// D = diag(1/E_i). noise_var is the matched-filter noise scale N0/2.
inline LinearDetector make_mmse(const Eigen::MatrixXd& r, double noise_var,
                                const Eigen::VectorXd& energies) {
  if (noise_var < 0.0) throw ConfigError("mmse: noise_var must be >= 0");
  if ((energies.array() <= 0.0).any()) throw ConfigError("mmse: energies must be positive");
  Eigen::MatrixXd m = r;
  m.diagonal() += noise_var * energies.cwiseInverse();
  return LinearDetector(m, "mmse");
}

// d_hat = sign(R^{-1} z).
inline Eigen::VectorXd decorrelator_detect(const Eigen::VectorXd& z, const Eigen::MatrixXd& r) {
  return make_decorrelator(r).decide(z);
}

// d_hat = sign((R + noise_var * diag(1/E_i))^{-1} z).
inline Eigen::VectorXd mmse_detect(const Eigen::VectorXd& z, const Eigen::MatrixXd& r,
                                   double noise_var, const Eigen::VectorXd& energies) {
  return make_mmse(r, noise_var, energies).decide(z);
}

struct MlResult {
  Eigen::VectorXd symbols;
  double fitness = 0.0;
};

// Brute-force maximization of the joint likelihood over all 2^U sign vectors
// with the fading pinned to a_true. Enumeration is lexicographic with -1
// ordered before +1, and only strict improvements replace the incumbent, so
// ties resolve to the lexicographically smallest maximizer.
inline MlResult ml_exhaustive(const Eigen::VectorXd& z, const Eigen::MatrixXd& r,
                              const Eigen::VectorXd& energies, const Eigen::VectorXd& a_true) {
  const Eigen::Index u = z.size();
  if (u > 16)
    throw ConfigError("ml_exhaustive: refused for num_users > 16 (2^U enumeration)");
  LikelihoodEvaluator eval(r, energies, SymbolMetric::kContinuous);
  eval.set_observation(z);

  MlResult best;
  best.fitness = -std::numeric_limits<double>::infinity();
  Eigen::VectorXd d(u);
  const std::size_t total = std::size_t{1} << u;
  for (std::size_t m = 0; m < total; ++m) {
    for (Eigen::Index i = 0; i < u; ++i)
      d[i] = ((m >> (u - 1 - i)) & 1u) ? 1.0 : -1.0;
    const double fit = eval(d, a_true);
    if (fit > best.fitness) {
      best.fitness = fit;
      best.symbols = d;
    }
  }
  return best;
}

}  // namespace mudsim
