#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>

#include "mudsim/errors.hpp"
#include "mudsim/gold.hpp"
#include "mudsim/rng.hpp"

namespace mudsim {

// AR(1) pole of the fading process.
inline double fading_alpha(double doppler_rate) { return std::exp(-2.0 * M_PI * doppler_rate); }

// Default innovation std: scaled so the AR(1) stationary std is `scale`
// regardless of the pole (1% amplitude spread by default).
inline double default_innovation_std(double doppler_rate, double scale = 0.01) {
  const double alpha = fading_alpha(doppler_rate);
  return scale * std::sqrt(std::max(0.0, 1.0 - alpha * alpha));
}

// Synchronous flat-fading uplink parameters. Energies are linear (not dB);
// noise_psd is N0 with chip-noise variance N0/2 per real dimension.
struct ChannelParams {
  std::size_t num_users = 10;
  std::size_t frame_length = 100;
  Eigen::VectorXd bit_energies;        // length num_users, all > 0
  double doppler_rate = 0.001;         // dimensionless f_d * T
  double noise_psd = 1.0;              // N0
  double fading_innovation_std = default_innovation_std(0.001);
  // Initial fading distribution: Gaussian clipped to a positive box so frames
  // start from a working link. Overridable (set std=0 for deterministic gains).
  double fading_init_mean = 0.8;
  double fading_init_std = 0.2;
  double fading_init_min = 0.1;
  double fading_init_max = 1.5;
};

struct ChannelState {
  Eigen::VectorXd fading;      // a_i(n), one real coefficient per user
  std::size_t symbol_index = 0;
};

// One simulated frame as seen by the detectors: matched-filter outputs plus
// the ground truth needed for scoring. Rows index symbol periods.
struct FrameObservation {
  Eigen::MatrixXd z;             // F x U matched-filter bank outputs
  Eigen::MatrixXd true_symbols;  // F x U, entries +-1
  Eigen::MatrixXd true_fading;   // F x U
  Eigen::MatrixXd r;             // U x U code correlation matrix
  Eigen::VectorXd energies;      // length U
};

inline void validate(const ChannelParams& p, const Codebook& cb) {
  if (p.num_users == 0) throw ConfigError("channel: num_users must be >= 1");
  if (p.num_users > cb.family_size())
    throw ConfigError("channel: num_users " + std::to_string(p.num_users) +
                      " exceeds the codebook family size " + std::to_string(cb.family_size()));
  if (p.frame_length == 0) throw ConfigError("channel: frame_length must be >= 1");
  if (p.bit_energies.size() != static_cast<Eigen::Index>(p.num_users))
    throw ConfigError("channel: bit_energies must have one entry per user");
  if ((p.bit_energies.array() <= 0.0).any())
    throw ConfigError("channel: bit_energies must be strictly positive");
  if (p.doppler_rate < 0) throw ConfigError("channel: doppler_rate must be >= 0");
  if (p.noise_psd < 0) throw ConfigError("channel: noise_psd must be >= 0");
  if (p.fading_innovation_std < 0) throw ConfigError("channel: fading_innovation_std must be >= 0");
  if (p.fading_init_std < 0) throw ConfigError("channel: fading_init_std must be >= 0");
  if (p.fading_init_min > p.fading_init_max)
    throw ConfigError("channel: fading init clip box is empty");
}

namespace detail {
inline double gauss(Rng& rng, double mean, double std) {
  if (std <= 0.0) return mean;
  std::normal_distribution<double> n(mean, std);
  return n(rng);
}
}  // namespace detail

// a_i(0) ~ clipped Gaussian, i.i.d. across users.
inline ChannelState init_channel_state(const ChannelParams& p, Rng& rng) {
  ChannelState st;
  st.fading.resize(static_cast<Eigen::Index>(p.num_users));
  for (Eigen::Index i = 0; i < st.fading.size(); ++i)
    st.fading[i] = std::clamp(detail::gauss(rng, p.fading_init_mean, p.fading_init_std),
                              p.fading_init_min, p.fading_init_max);
  st.symbol_index = 0;
  return st;
}

// a_i(n+1) = alpha * a_i(n) + nu, nu ~ N(0, fading_innovation_std^2), per user.
inline ChannelState advance_fading(const ChannelState& state, const ChannelParams& p, Rng& rng) {
  ChannelState next;
  next.fading.resize(state.fading.size());
  const double alpha = fading_alpha(p.doppler_rate);
  for (Eigen::Index i = 0; i < state.fading.size(); ++i)
    next.fading[i] = alpha * state.fading[i] + detail::gauss(rng, 0.0, p.fading_innovation_std);
  next.symbol_index = state.symbol_index + 1;
  return next;
}

// Chip-rate transmit of a whole frame: r_n = S A(n) E^{1/2} d(n) + g(n), with
// g i.i.d. N(0, N0/2) per chip. Fading advances between symbol periods.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> transmit_frame(const Eigen::MatrixXd& symbols,
                                                                  const Codebook& cb,
                                                                  const ChannelParams& p,
                                                                  const ChannelState& initial_state,
                                                                  Rng& rng) {
  validate(p, cb);
  const Eigen::Index f = symbols.rows();
  const Eigen::Index u = symbols.cols();
  if (u != static_cast<Eigen::Index>(p.num_users) ||
      f != static_cast<Eigen::Index>(p.frame_length))
    throw ConfigError("channel: symbols matrix must be frame_length x num_users");
  if (initial_state.fading.size() != u)
    throw ConfigError("channel: initial fading state has wrong length");

  const Eigen::MatrixXd s = signature_matrix(cb, p.num_users);
  const Eigen::VectorXd sqrt_e = p.bit_energies.cwiseSqrt();
  const double chip_std = std::sqrt(p.noise_psd / 2.0);
  const Eigen::Index n_chips = s.rows();

  Eigen::MatrixXd chips(f, n_chips);
  Eigen::MatrixXd fading_trace(f, u);
  ChannelState st = initial_state;
  Eigen::VectorXd amp(u), r_n(n_chips);
  std::normal_distribution<double> noise(0.0, chip_std > 0.0 ? chip_std : 1.0);
  for (Eigen::Index n = 0; n < f; ++n) {
    fading_trace.row(n) = st.fading.transpose();
    amp = sqrt_e.array() * st.fading.array() * symbols.row(n).transpose().array();
    r_n.noalias() = s * amp;
    if (chip_std > 0.0)
      for (Eigen::Index c = 0; c < n_chips; ++c) r_n[c] += noise(rng);
    chips.row(n) = r_n.transpose();
    if (n + 1 < f) st = advance_fading(st, p, rng);
  }
  return {chips, fading_trace};
}

// z(n) = S^T r_n. The noise seen after the bank automatically has covariance
// (N0/2) R because it is the same chip noise passed through the correlators.
inline Eigen::MatrixXd matched_filter_bank(const Eigen::MatrixXd& chip_samples, const Codebook& cb,
                                           std::size_t num_users) {
  const Eigen::MatrixXd s = signature_matrix(cb, num_users);
  if (chip_samples.cols() != s.rows())
    throw ConfigError("channel: chip rows must have length " + std::to_string(s.rows()));
  return chip_samples * s;  // row n of the result is (S^T r_n)^T
}

// Draw symbols, run the chip-rate channel, and filter: everything a detector
// bench needs for one independent frame.
inline FrameObservation simulate_frame(const ChannelParams& p, const Codebook& cb, Rng& rng) {
  validate(p, cb);
  const Eigen::Index f = static_cast<Eigen::Index>(p.frame_length);
  const Eigen::Index u = static_cast<Eigen::Index>(p.num_users);
  Eigen::MatrixXd symbols(f, u);
  std::uniform_int_distribution<int> bit(0, 1);
  for (Eigen::Index n = 0; n < f; ++n)
    for (Eigen::Index i = 0; i < u; ++i) symbols(n, i) = bit(rng) ? 1.0 : -1.0;

  const ChannelState st0 = init_channel_state(p, rng);
  auto [chips, fading_trace] = transmit_frame(symbols, cb, p, st0, rng);

  FrameObservation obs;
  obs.z = matched_filter_bank(chips, cb, p.num_users);
  obs.true_symbols = std::move(symbols);
  obs.true_fading = std::move(fading_trace);
  obs.r = correlation_matrix(cb, p.num_users);
  obs.energies = p.bit_energies;
  return obs;
}

}  // namespace mudsim
