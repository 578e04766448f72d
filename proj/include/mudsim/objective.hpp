#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "mudsim/errors.hpp"

namespace mudsim {

// One search point: continuous symbol part d (hard decision is sign(d)) and
// fading-estimate part a. Operators clip d to [-1.5, 1.5] and a to [-2, 2].
struct Candidate {
  Eigen::VectorXd d;
  Eigen::VectorXd a;
};

inline constexpr double kSymbolBox = 1.5;
inline constexpr double kFadingBoxLo = -2.0;
inline constexpr double kFadingBoxHi = 2.0;

// The likelihood depends on a and d only through the products a_i * d_i, so
// (a_i, d_i) and (-a_i, -d_i) are indistinguishable candidates. Fading
// amplitudes are physically nonnegative, which picks a canonical
// representative: flip every pair with a_i < 0. Fitness is unchanged exactly.
inline void canonicalize(Candidate& c) {
  for (Eigen::Index i = 0; i < c.a.size(); ++i)
    if (c.a[i] < 0.0) {
      c.a[i] = -c.a[i];
      c.d[i] = -c.d[i];
    }
}

// Joint log-likelihood of (d, a) given the matched-filter observation z:
//   L = 2 y^T z - y^T R y,  y_i = sqrt(E_i) a_i d_i.
// Evaluated on the continuous d; quantization is a caller-side policy.
inline double log_likelihood(const Candidate& c, const Eigen::VectorXd& z,
                             const Eigen::MatrixXd& r, const Eigen::VectorXd& energies) {
  const Eigen::Index u = z.size();
  if (c.d.size() != u || c.a.size() != u || r.rows() != u || r.cols() != u ||
      energies.size() != u)
    throw std::invalid_argument("objective: dimension mismatch in log_likelihood");
  Eigen::VectorXd y = energies.cwiseSqrt().array() * c.a.array() * c.d.array();
  return 2.0 * y.dot(z) - y.dot(r * y);
}

// Shift-by-min normalization turning raw fitness values into a probability
// vector (monotone, ranking-preserving; epsilon keeps all entries positive).
inline Eigen::VectorXd normalize_fitness(const Eigen::VectorXd& raw) {
  if (raw.size() < 2) throw std::invalid_argument("objective: need at least two fitness values");
  constexpr double eps = 1e-9;
  Eigen::VectorXd shifted = raw.array() - raw.minCoeff() + eps;
  return shifted / shifted.sum();
}

// Shannon entropy in nats, 0*ln(0) := 0.
inline double population_entropy(const Eigen::VectorXd& normalized) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < normalized.size(); ++i) {
    const double p = normalized[i];
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

// How the per-symbol objective consumes the d part of a candidate.
enum class SymbolMetric {
  kContinuous,  // L evaluated on d as-is
  kSign,        // L evaluated on sign(d): rewards correct hard decisions only
};

// Reusable evaluator for one symbol period. Holds R and sqrt(E), takes a new z
// per symbol, and evaluates candidates without allocating. Not thread-safe;
// one instance per Monte Carlo worker.
class LikelihoodEvaluator {
 public:
  LikelihoodEvaluator(Eigen::MatrixXd r, const Eigen::VectorXd& energies,
                      SymbolMetric metric = SymbolMetric::kContinuous)
      : r_(std::move(r)), sqrt_e_(energies.cwiseSqrt()), metric_(metric) {
    if (r_.rows() != r_.cols() || r_.rows() != sqrt_e_.size())
      throw std::invalid_argument("objective: R and energies dimensions disagree");
    const Eigen::Index u = sqrt_e_.size();
    z_.setZero(u);
    y_.resize(u);
    ry_.resize(u);
  }

  void set_observation(const Eigen::VectorXd& z) {
    if (z.size() != sqrt_e_.size())
      throw std::invalid_argument("objective: observation has wrong length");
    z_ = z;
  }

  double operator()(const Eigen::VectorXd& d, const Eigen::VectorXd& a) const {
    if (d.size() != sqrt_e_.size() || a.size() != sqrt_e_.size())
      throw std::invalid_argument("objective: candidate has wrong length");
    if (metric_ == SymbolMetric::kSign) {
      for (Eigen::Index i = 0; i < y_.size(); ++i)
        y_[i] = sqrt_e_[i] * a[i] * (d[i] < 0.0 ? -1.0 : 1.0);
    } else {
      y_ = sqrt_e_.array() * a.array() * d.array();
    }
    ry_.noalias() = r_ * y_;
    return 2.0 * y_.dot(z_) - y_.dot(ry_);
  }

  double operator()(const Candidate& c) const { return (*this)(c.d, c.a); }

  const Eigen::MatrixXd& correlation() const { return r_; }
  const Eigen::VectorXd& sqrt_energies() const { return sqrt_e_; }
  const Eigen::VectorXd& observation() const { return z_; }
  SymbolMetric metric() const { return metric_; }

 private:
  Eigen::MatrixXd r_;
  Eigen::VectorXd sqrt_e_;
  Eigen::VectorXd z_;
  SymbolMetric metric_;
  mutable Eigen::VectorXd y_, ry_;
};

}  // namespace mudsim
