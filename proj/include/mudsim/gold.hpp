#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "mudsim/errors.hpp"

namespace mudsim {

// Spreading codebook: the full Gold family generated by a preferred pair of
// m-sequences. signatures[u] is the unit-energy chip vector of sequence u
// (bit 0 -> +1/sqrt(N), bit 1 -> -1/sqrt(N)), N = 2^degree - 1 chips.
struct Codebook {
  unsigned degree = 0;
  std::uint32_t poly1 = 0;
  std::uint32_t poly2 = 0;
  std::size_t chips_per_symbol = 0;
  std::vector<Eigen::VectorXd> signatures;

  std::size_t family_size() const { return signatures.size(); }
};

namespace detail {

// Galois LFSR run over one full period. poly has bit i set when the coefficient
// of x^i is 1 and must contain both the x^degree and the constant term.
// Throws unless the polynomial is primitive (period exactly 2^degree - 1).
inline std::vector<std::uint8_t> m_sequence(unsigned degree, std::uint32_t poly) {
  if (degree < 3 || degree > 16)
    throw ConfigError("spreading: polynomial degree must be in [3, 16], got " +
                      std::to_string(degree));
  if (((poly >> degree) & 1u) == 0 || (poly & 1u) == 0)
    throw ConfigError("spreading: polynomial 0x" + std::to_string(poly) +
                      " must include the x^degree and constant terms");
  if (poly >> (degree + 1))
    throw ConfigError("spreading: polynomial has terms above x^degree");

  const std::uint32_t period = (1u << degree) - 1;
  const std::uint32_t taps = poly >> 1;  // feedback taps for the Galois form
  std::vector<std::uint8_t> seq(period);
  std::uint32_t state = 1;
  for (std::uint32_t i = 0; i < period; ++i) {
    seq[i] = static_cast<std::uint8_t>(state & 1u);
    state = (state >> 1) ^ (seq[i] ? taps : 0u);
    if (state == 1 && i + 1 < period)
      throw ConfigError("spreading: polynomial is not primitive (LFSR period " +
                        std::to_string(i + 1) + " < " + std::to_string(period) + ")");
  }
  if (state != 1)
    throw ConfigError("spreading: LFSR did not return to its start state (degenerate polynomial)");
  return seq;
}

inline Eigen::VectorXd to_signature(const std::vector<std::uint8_t>& bits) {
  const double amp = 1.0 / std::sqrt(static_cast<double>(bits.size()));
  Eigen::VectorXd s(static_cast<Eigen::Index>(bits.size()));
  for (std::size_t c = 0; c < bits.size(); ++c) s[static_cast<Eigen::Index>(c)] = bits[c] ? -amp : amp;
  return s;
}

}  // namespace detail

// Full Gold family of a preferred pair: [u1, u2, u1 ^ T^k u2 for k = 0..N-1],
// i.e. 2^degree + 1 sequences of length N = 2^degree - 1. The first two entries
// are the m-sequences themselves, so small user counts get the strongest codes.
inline Codebook gold_codebook(unsigned degree, std::uint32_t poly1, std::uint32_t poly2) {
  if (poly1 == poly2)
    throw ConfigError("spreading: the two generator polynomials must differ");
  const std::vector<std::uint8_t> u1 = detail::m_sequence(degree, poly1);
  const std::vector<std::uint8_t> u2 = detail::m_sequence(degree, poly2);
  const std::size_t n = u1.size();

  Codebook cb;
  cb.degree = degree;
  cb.poly1 = poly1;
  cb.poly2 = poly2;
  cb.chips_per_symbol = n;
  cb.signatures.reserve(n + 2);
  cb.signatures.push_back(detail::to_signature(u1));
  cb.signatures.push_back(detail::to_signature(u2));
  std::vector<std::uint8_t> sum(n);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t c = 0; c < n; ++c) sum[c] = u1[c] ^ u2[(c + k) % n];
    cb.signatures.push_back(detail::to_signature(sum));
  }
  return cb;
}

// Default preferred pairs (octal 45/75, 103/147, 211/217 for degrees 5/6/7).
inline Codebook gold_codebook(unsigned degree) {
  switch (degree) {
    case 5:
      return gold_codebook(5, 045, 075);
    case 6:
      return gold_codebook(6, 0103, 0147);
    case 7:
      return gold_codebook(7, 0211, 0217);
    default:
      throw ConfigError("spreading: no default preferred pair for degree " +
                        std::to_string(degree) + "; pass the polynomials explicitly");
  }
}

// N x U matrix whose columns are the first num_users signatures.
inline Eigen::MatrixXd signature_matrix(const Codebook& cb, std::size_t num_users) {
  if (num_users == 0) throw ConfigError("spreading: num_users must be >= 1");
  if (num_users > cb.family_size())
    throw ConfigError("spreading: num_users " + std::to_string(num_users) +
                      " exceeds the Gold family size " + std::to_string(cb.family_size()));
  Eigen::MatrixXd s(static_cast<Eigen::Index>(cb.chips_per_symbol),
                    static_cast<Eigen::Index>(num_users));
  for (std::size_t u = 0; u < num_users; ++u) s.col(static_cast<Eigen::Index>(u)) = cb.signatures[u];
  return s;
}

// Normalized cross-correlation matrix R = S^T S of the first num_users codes.
// Unit diagonal by construction; symmetry is exact because entries are shared.
inline Eigen::MatrixXd correlation_matrix(const Codebook& cb, std::size_t num_users) {
  const Eigen::MatrixXd s = signature_matrix(cb, num_users);
  Eigen::MatrixXd r = s.transpose() * s;
  r = ((r + r.transpose()) / 2.0).eval();
  for (Eigen::Index i = 0; i < r.rows(); ++i) r(i, i) = 1.0;
  return r;
}

}  // namespace mudsim
