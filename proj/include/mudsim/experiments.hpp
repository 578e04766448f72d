#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "mudsim/channel.hpp"
#include "mudsim/detectors.hpp"
#include "mudsim/errors.hpp"
#include "mudsim/fpa.hpp"
#include "mudsim/ga.hpp"
#include "mudsim/gold.hpp"
#include "mudsim/io.hpp"
#include "mudsim/objective.hpp"
#include "mudsim/rng.hpp"
#include "mudsim/stats.hpp"

namespace mudsim {

enum class DetectorKind { kMatchedFilter, kDecorrelator, kMmse, kExhaustiveMl, kStandardGa, kFpa };

inline std::string detector_name(DetectorKind k) {
  switch (k) {
    case DetectorKind::kMatchedFilter: return "matched-filter";
    case DetectorKind::kDecorrelator: return "decorrelator";
    case DetectorKind::kMmse: return "mmse";
    case DetectorKind::kExhaustiveMl: return "exhaustive-ml";
    case DetectorKind::kStandardGa: return "standard-ga";
    case DetectorKind::kFpa: return "fpa";
  }
  throw ConfigError("experiments: unknown detector kind");
}

inline DetectorKind detector_from_name(const std::string& name) {
  for (DetectorKind k :
       {DetectorKind::kMatchedFilter, DetectorKind::kDecorrelator, DetectorKind::kMmse,
        DetectorKind::kExhaustiveMl, DetectorKind::kStandardGa, DetectorKind::kFpa})
    if (detector_name(k) == name) return k;
  throw ConfigError("experiments: unknown detector '" + name +
                    "' (valid: matched-filter, decorrelator, mmse, exhaustive-ml, "
                    "standard-ga, fpa)");
}

// Analytic single-user antipodal error rate oracle.
inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// Full campaign description. Defaults reproduce the baseline scenario: U=10,
// N=31 Gold codes, 4 dB near-far, 50 runs, SNR swept over 7..14 dB.
struct ExperimentConfig {
  std::string exp_id = "ber-sweep";
  std::vector<DetectorKind> detectors = {DetectorKind::kFpa, DetectorKind::kStandardGa,
                                         DetectorKind::kMatchedFilter, DetectorKind::kDecorrelator,
                                         DetectorKind::kMmse};
  std::string axis_name = "snr_db";
  std::vector<double> axis_values = {7, 8, 9, 10, 11, 12, 13, 14};
  std::size_t runs = 50;
  std::size_t min_bits = 100000;
  std::size_t extended_min_bits = 1000000;
  double extended_threshold_db = 12.0;
  bool extended = false;
  std::uint64_t base_seed = 1;
  std::size_t workers = 0;  // 0 = hardware concurrency

  // Codebook / channel scenario.
  unsigned degree = 5;
  std::optional<std::uint32_t> poly1, poly2;  // default preferred pair when unset
  std::size_t num_users = 10;
  std::size_t frame_length = 100;
  double snr_db = 10.0;      // used when the axis is not snr_db
  double nearfar_db = 4.0;   // E_k/E_1 for k >= 2
  double noise_psd = 1.0;
  double doppler_rate = 0.001;
  std::optional<double> fading_innovation_std;  // default derived from doppler_rate
  double fading_init_mean = 0.8;
  double fading_init_std = 0.2;
  double fading_init_min = 0.1;
  double fading_init_max = 1.5;

  FpaConfig fpa;
  GaConfig ga;
  bool ga_budget_explicit = false;  // when false, GA budget = FPA evaluation count
};

// One output row: statistics of one detector at one axis value.
struct RecordRow {
  std::string exp_id;
  DetectorKind detector = DetectorKind::kFpa;
  std::string axis_name;
  double axis_value = 0.0;
  std::size_t runs = 0;
  std::size_t bits = 0;  // decisions for user 1 aggregated into this row
  double ber_best = 0.0, ber_mean = 0.0, ber_worst = 0.0, ber_std = 0.0;
  std::optional<double> mse_mean;
  double seconds = 0.0;
  std::vector<double> per_run_ber;  // retained for significance tests; not a CSV column
};

inline Codebook make_codebook(const ExperimentConfig& cfg) {
  if (cfg.poly1 && cfg.poly2) return gold_codebook(cfg.degree, *cfg.poly1, *cfg.poly2);
  if (cfg.poly1 || cfg.poly2)
    throw ConfigError("experiments: poly1 and poly2 must be given together");
  return gold_codebook(cfg.degree);
}

// Per-user symbol energies: user 1 at snr_db over noise_psd, interferers
// offset by nearfar_db.
inline Eigen::VectorXd make_energies(double snr_db, double nearfar_db, std::size_t num_users,
                                     double noise_psd) {
  const double ref = noise_psd > 0.0 ? noise_psd : 1.0;
  const double e1 = ref * std::pow(10.0, snr_db / 10.0);
  Eigen::VectorXd e(static_cast<Eigen::Index>(num_users));
  e[0] = e1;
  for (Eigen::Index j = 1; j < e.size(); ++j) e[j] = e1 * std::pow(10.0, nearfar_db / 10.0);
  return e;
}

inline ChannelParams make_channel_params(const ExperimentConfig& cfg, std::size_t num_users,
                                         double snr_db, double nearfar_db) {
  ChannelParams p;
  p.num_users = num_users;
  p.frame_length = cfg.frame_length;
  p.bit_energies = make_energies(snr_db, nearfar_db, num_users, cfg.noise_psd);
  p.doppler_rate = cfg.doppler_rate;
  p.noise_psd = cfg.noise_psd;
  p.fading_innovation_std =
      cfg.fading_innovation_std ? *cfg.fading_innovation_std : default_innovation_std(cfg.doppler_rate);
  p.fading_init_mean = cfg.fading_init_mean;
  p.fading_init_std = cfg.fading_init_std;
  p.fading_init_min = cfg.fading_init_min;
  p.fading_init_max = cfg.fading_init_max;
  return p;
}

namespace detail {

inline std::size_t resolve_workers(std::size_t requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// Static work distribution over [0, n_tasks); results must be written to
// task-indexed slots so scheduling never affects output.
inline void parallel_for(std::size_t n_tasks, std::size_t workers,
                         const std::function<void(std::size_t)>& body) {
  workers = std::min(workers, n_tasks);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n_tasks; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_tasks) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// GA budget at equal computational load: the FPA evaluation count.
inline std::size_t fpa_evaluation_budget(const FpaConfig& cfg) {
  return cfg.num_flowers * (cfg.max_iter + 1);
}

struct CellResult {
  // errors[d] / seconds[d] for each detector in config order; bits shared.
  std::vector<std::size_t> errors;
  std::vector<double> seconds;
  std::size_t bits = 0;
};

// One Monte Carlo cell: a single run at a single axis point. All detectors
// consume the same frames (paired comparison); heuristics get their own
// deterministic substreams.
inline CellResult run_cell(const ExperimentConfig& cfg, const Codebook& cb,
                           const ChannelParams& params, double axis_value, std::size_t run_idx,
                           std::size_t frames_per_run) {
  using clock = std::chrono::steady_clock;
  const std::size_t n_det = cfg.detectors.size();
  CellResult cell;
  cell.errors.assign(n_det, 0);
  cell.seconds.assign(n_det, 0.0);

  const Eigen::MatrixXd r = correlation_matrix(cb, params.num_users);
  const double noise_var = params.noise_psd / 2.0;

  // Prepared linear filters and evaluators, one set per cell.
  std::optional<LinearDetector> decorr, mmse;
  std::optional<LikelihoodEvaluator> fpa_eval, ga_eval;
  std::optional<Rng> fpa_rng, ga_rng;
  for (std::size_t d = 0; d < n_det; ++d) {
    switch (cfg.detectors[d]) {
      case DetectorKind::kDecorrelator:
        decorr.emplace(make_decorrelator(r));
        break;
      case DetectorKind::kMmse:
        mmse.emplace(make_mmse(r, noise_var, params.bit_energies));
        break;
      case DetectorKind::kFpa:
        fpa_eval.emplace(r, params.bit_energies, cfg.fpa.symbol_metric);
        fpa_rng = make_rng(derive_seed(cfg.base_seed, {hash_word(cfg.exp_id), hash_word(cfg.axis_name),
                                                       hash_word(axis_value), run_idx,
                                                       hash_word("fpa")}));
        break;
      case DetectorKind::kStandardGa:
        ga_eval.emplace(r, params.bit_energies, cfg.ga.symbol_metric);
        ga_rng = make_rng(derive_seed(cfg.base_seed, {hash_word(cfg.exp_id), hash_word(cfg.axis_name),
                                                      hash_word(axis_value), run_idx,
                                                      hash_word("standard-ga")}));
        break;
      case DetectorKind::kExhaustiveMl:
        if (params.num_users > 16)
          throw DetectorUnavailable("exhaustive-ml: num_users > 16");
        break;
      default:
        break;
    }
  }
  GaConfig ga_cfg = cfg.ga;
  if (!cfg.ga_budget_explicit) ga_cfg.max_evaluations = fpa_evaluation_budget(cfg.fpa);

  Rng ch_rng = make_rng(derive_seed(cfg.base_seed, {hash_word(cfg.exp_id), hash_word(cfg.axis_name),
                                                    hash_word(axis_value), run_idx,
                                                    hash_word("channel")}));

  const Eigen::Index f_len = static_cast<Eigen::Index>(params.frame_length);
  for (std::size_t frame = 0; frame < frames_per_run; ++frame) {
    const FrameObservation obs = simulate_frame(params, cb, ch_rng);
    cell.bits += params.frame_length;

    for (std::size_t d = 0; d < n_det; ++d) {
      const auto t0 = clock::now();
      std::size_t errors = 0;
      switch (cfg.detectors[d]) {
        case DetectorKind::kMatchedFilter: {
          for (Eigen::Index n = 0; n < f_len; ++n)
            if (sign_decision(obs.z(n, 0)) != obs.true_symbols(n, 0)) ++errors;
          break;
        }
        case DetectorKind::kDecorrelator: {
          const Eigen::MatrixXd soft = decorr->soft_frame(obs.z);
          for (Eigen::Index n = 0; n < f_len; ++n)
            if (sign_decision(soft(n, 0)) != obs.true_symbols(n, 0)) ++errors;
          break;
        }
        case DetectorKind::kMmse: {
          const Eigen::MatrixXd soft = mmse->soft_frame(obs.z);
          for (Eigen::Index n = 0; n < f_len; ++n)
            if (sign_decision(soft(n, 0)) != obs.true_symbols(n, 0)) ++errors;
          break;
        }
        case DetectorKind::kExhaustiveMl: {
          for (Eigen::Index n = 0; n < f_len; ++n) {
            const MlResult ml = ml_exhaustive(obs.z.row(n).transpose(), r, params.bit_energies,
                                              obs.true_fading.row(n).transpose());
            if (ml.symbols[0] != obs.true_symbols(n, 0)) ++errors;
          }
          break;
        }
        case DetectorKind::kFpa: {
          std::optional<Eigen::VectorXd> warm;  // reset at every frame boundary
          for (Eigen::Index n = 0; n < f_len; ++n) {
            fpa_eval->set_observation(obs.z.row(n).transpose());
            const DetectionResult res = fpa_detect(*fpa_eval, cfg.fpa, warm, *fpa_rng);
            warm = res.fading_estimates;
            if (res.symbols[0] != obs.true_symbols(n, 0)) ++errors;
          }
          break;
        }
        case DetectorKind::kStandardGa: {
          std::optional<Eigen::VectorXd> warm;
          for (Eigen::Index n = 0; n < f_len; ++n) {
            ga_eval->set_observation(obs.z.row(n).transpose());
            const DetectionResult res = ga_detect(*ga_eval, ga_cfg, warm, *ga_rng);
            warm = res.fading_estimates;
            if (res.symbols[0] != obs.true_symbols(n, 0)) ++errors;
          }
          break;
        }
      }
      cell.errors[d] += errors;
      cell.seconds[d] += std::chrono::duration<double>(clock::now() - t0).count();
    }
  }
  return cell;
}

inline void aggregate_point(const ExperimentConfig& cfg, double axis_value,
                            const std::vector<CellResult>& cells, std::vector<RecordRow>& out) {
  for (std::size_t d = 0; d < cfg.detectors.size(); ++d) {
    RecordRow row;
    row.exp_id = cfg.exp_id;
    row.detector = cfg.detectors[d];
    row.axis_name = cfg.axis_name;
    row.axis_value = axis_value;
    row.runs = cells.size();
    row.per_run_ber.reserve(cells.size());
    double total_seconds = 0.0;
    std::size_t total_bits = 0;
    for (const CellResult& cell : cells) {
      row.per_run_ber.push_back(static_cast<double>(cell.errors[d]) /
                                static_cast<double>(cell.bits));
      total_seconds += cell.seconds[d];
      total_bits += cell.bits;
    }
    row.bits = total_bits;
    row.seconds = total_seconds;
    row.ber_best = *std::min_element(row.per_run_ber.begin(), row.per_run_ber.end());
    row.ber_worst = *std::max_element(row.per_run_ber.begin(), row.per_run_ber.end());
    row.ber_mean = std::accumulate(row.per_run_ber.begin(), row.per_run_ber.end(), 0.0) /
                   static_cast<double>(row.per_run_ber.size());
    double var = 0.0;
    for (double b : row.per_run_ber) var += (b - row.ber_mean) * (b - row.ber_mean);
    row.ber_std = row.per_run_ber.size() > 1
                      ? std::sqrt(var / static_cast<double>(row.per_run_ber.size() - 1))
                      : 0.0;
    if (row.ber_mean == 0.0)
      std::cerr << "note: " << cfg.exp_id << " " << detector_name(row.detector) << " at "
                << cfg.axis_name << "=" << format_double(axis_value)
                << " saw zero errors (below resolution 1/" << row.bits << ")\n";
    out.push_back(std::move(row));
  }
}

}  // namespace detail

// Shared sweep driver: one Monte Carlo campaign over cfg.axis_values with the
// axis interpreted per experiment kind (see run_ber_sweep / run_capacity /
// run_nearfar below).
inline std::vector<RecordRow> run_sweep(const ExperimentConfig& cfg) {
  if (cfg.axis_values.empty()) throw ConfigError("experiments: axis_values must be nonempty");
  if (cfg.runs < 1) throw ConfigError("experiments: runs must be >= 1");
  if (cfg.detectors.empty()) throw ConfigError("experiments: detector list must be nonempty");
  validate(cfg.fpa);
  validate(cfg.ga);
  const Codebook cb = make_codebook(cfg);

  struct Point {
    double axis_value;
    ChannelParams params;
    std::size_t frames_per_run;
  };
  std::vector<Point> points;
  for (double v : cfg.axis_values) {
    Point pt;
    pt.axis_value = v;
    if (cfg.axis_name == "snr_db") {
      pt.params = make_channel_params(cfg, cfg.num_users, v, cfg.nearfar_db);
    } else if (cfg.axis_name == "num_users") {
      const auto u = static_cast<std::size_t>(v);
      if (static_cast<double>(u) != v)
        throw ConfigError("experiments: num_users axis values must be integers");
      if (u > cb.family_size()) {
        std::cerr << "warning: skipping num_users=" << u << " (exceeds family size "
                  << cb.family_size() << ")\n";
        continue;
      }
      pt.params = make_channel_params(cfg, u, cfg.snr_db, 0.0);  // capacity: equal energies
    } else if (cfg.axis_name == "nearfar_db") {
      pt.params = make_channel_params(cfg, cfg.num_users, cfg.snr_db, v);
    } else {
      throw ConfigError("experiments: unknown axis '" + cfg.axis_name +
                        "' (valid: snr_db, num_users, nearfar_db)");
    }
    validate(pt.params, cb);

    std::size_t min_bits = cfg.min_bits;
    if (cfg.axis_name == "snr_db" && v >= cfg.extended_threshold_db) {
      if (cfg.extended) {
        min_bits = cfg.extended_min_bits;
        std::cerr << "warning: extended point " << cfg.axis_name << "=" << format_double(v)
                  << " runs " << min_bits << " bits; expect a long runtime\n";
      } else {
        std::cerr << "warning: " << cfg.axis_name << "=" << format_double(v)
                  << " is under-resolved at " << min_bits
                  << " bits; pass --extended for publication-grade depth\n";
      }
    }
    const std::size_t bits_per_run = (min_bits + cfg.runs - 1) / cfg.runs;
    pt.frames_per_run = std::max<std::size_t>(1, (bits_per_run + cfg.frame_length - 1) / cfg.frame_length);
    points.push_back(std::move(pt));
  }

  // Cells are (point, run) pairs; each writes its own slot, so any worker
  // count yields identical results.
  std::vector<std::vector<detail::CellResult>> cells(points.size());
  for (auto& c : cells) c.resize(cfg.runs);
  const std::size_t n_tasks = points.size() * cfg.runs;
  std::atomic<std::size_t> done{0};
  detail::parallel_for(n_tasks, detail::resolve_workers(cfg.workers), [&](std::size_t task) {
    const std::size_t pt_idx = task / cfg.runs;
    const std::size_t run_idx = task % cfg.runs;
    const Point& pt = points[pt_idx];
    cells[pt_idx][run_idx] =
        detail::run_cell(cfg, cb, pt.params, pt.axis_value, run_idx, pt.frames_per_run);
    const std::size_t d = done.fetch_add(1) + 1;
    if (run_idx + 1 == cfg.runs || d == n_tasks)
      std::cerr << "progress: " << cfg.exp_id << " " << d << "/" << n_tasks << " cells\n";
  });

  std::vector<RecordRow> rows;
  rows.reserve(points.size() * cfg.detectors.size());
  for (std::size_t p = 0; p < points.size(); ++p)
    detail::aggregate_point(cfg, points[p].axis_value, cells[p], rows);
  return rows;
}

// BER vs SNR for user 1 at fixed near-far ratio.
inline std::vector<RecordRow> run_ber_sweep(ExperimentConfig cfg) {
  cfg.axis_name = "snr_db";
  return run_sweep(cfg);
}

// BER vs number of active users at equal energies and fixed SNR. The expected
// MAI growth is asserted softly (warning only).
inline std::vector<RecordRow> run_capacity(ExperimentConfig cfg) {
  cfg.axis_name = "num_users";
  if (cfg.exp_id == "ber-sweep") cfg.exp_id = "capacity";
  std::vector<RecordRow> rows = run_sweep(cfg);
  for (DetectorKind k : cfg.detectors) {
    const RecordRow* prev = nullptr;
    for (const RecordRow& row : rows) {
      if (row.detector != k) continue;
      if (prev && row.ber_mean + 1e-12 < prev->ber_mean * 0.5)
        std::cerr << "warning: capacity trend check: " << detector_name(k) << " BER fell from "
                  << format_double(prev->ber_mean) << " to " << format_double(row.ber_mean)
                  << " when users grew " << format_double(prev->axis_value) << " -> "
                  << format_double(row.axis_value) << "\n";
      prev = &row;
    }
  }
  return rows;
}

// BER vs interferer-to-UOI energy ratio at fixed SNR.
inline std::vector<RecordRow> run_nearfar(ExperimentConfig cfg) {
  cfg.axis_name = "nearfar_db";
  if (cfg.exp_id == "ber-sweep") cfg.exp_id = "nearfar";
  return run_sweep(cfg);
}

// Channel-estimation MSE trajectory over one frame, averaged over runs. Row 0
// measures the raw a-part initializer against the true a(0) (before any
// fitting); row m >= 1 is the error of the best-flower estimate after
// detecting the m-th symbol of the frame.
inline std::vector<RecordRow> run_channel_mse(ExperimentConfig cfg) {
  cfg.axis_name = "symbol";
  if (cfg.exp_id == "ber-sweep") cfg.exp_id = "mse";
  validate(cfg.fpa);
  const Codebook cb = make_codebook(cfg);
  const ChannelParams params = make_channel_params(cfg, cfg.num_users, cfg.snr_db, cfg.nearfar_db);
  validate(params, cb);
  const Eigen::MatrixXd r = correlation_matrix(cb, params.num_users);
  const Eigen::Index f_len = static_cast<Eigen::Index>(params.frame_length);
  const Eigen::Index u = static_cast<Eigen::Index>(params.num_users);

  std::vector<std::vector<double>> run_mse(cfg.runs);  // per run: F+1 samples
  std::vector<double> run_seconds(cfg.runs, 0.0);
  detail::parallel_for(cfg.runs, detail::resolve_workers(cfg.workers), [&](std::size_t run_idx) {
    using clock = std::chrono::steady_clock;
    Rng ch_rng = make_rng(derive_seed(cfg.base_seed, {hash_word(cfg.exp_id), hash_word("channel"),
                                                      run_idx}));
    Rng det_rng = make_rng(derive_seed(cfg.base_seed, {hash_word(cfg.exp_id), hash_word("fpa"),
                                                       run_idx}));
    const FrameObservation obs = simulate_frame(params, cb, ch_rng);
    std::vector<double>& mse = run_mse[run_idx];
    mse.assign(static_cast<std::size_t>(f_len) + 1, 0.0);

    // Pre-fit sample: the cold-start a initializer vs the true a(0).
    std::uniform_real_distribution<double> a_init(cfg.fpa.a_init_lo, cfg.fpa.a_init_hi);
    double acc = 0.0;
    for (std::size_t fl = 0; fl < cfg.fpa.num_flowers; ++fl)
      for (Eigen::Index i = 0; i < u; ++i) {
        const double err = a_init(det_rng) - obs.true_fading(0, i);
        acc += err * err;
      }
    mse[0] = acc / static_cast<double>(cfg.fpa.num_flowers * params.num_users);

    const auto t0 = clock::now();
    LikelihoodEvaluator eval(r, params.bit_energies, cfg.fpa.symbol_metric);
    std::optional<Eigen::VectorXd> warm;
    for (Eigen::Index n = 0; n < f_len; ++n) {
      eval.set_observation(obs.z.row(n).transpose());
      const DetectionResult res = fpa_detect(eval, cfg.fpa, warm, det_rng);
      warm = res.fading_estimates;
      double e = 0.0;
      for (Eigen::Index i = 0; i < u; ++i) {
        const double err = res.fading_estimates[i] - obs.true_fading(n, i);
        e += err * err;
      }
      mse[static_cast<std::size_t>(n) + 1] = e / static_cast<double>(params.num_users);
    }
    run_seconds[run_idx] = std::chrono::duration<double>(clock::now() - t0).count();
  });

  double total_seconds = 0.0;
  for (double s : run_seconds) total_seconds += s;
  std::vector<RecordRow> rows;
  rows.reserve(static_cast<std::size_t>(f_len) + 1);
  for (std::size_t m = 0; m <= static_cast<std::size_t>(f_len); ++m) {
    RecordRow row;
    row.exp_id = cfg.exp_id;
    row.detector = DetectorKind::kFpa;
    row.axis_name = cfg.axis_name;
    row.axis_value = static_cast<double>(m);
    row.runs = cfg.runs;
    row.bits = cfg.runs;  // samples aggregated into this row
    double acc = 0.0;
    for (std::size_t rr = 0; rr < cfg.runs; ++rr) acc += run_mse[rr][m];
    row.mse_mean = acc / static_cast<double>(cfg.runs);
    row.seconds = m == 0 ? 0.0 : total_seconds / static_cast<double>(f_len);
    rows.push_back(std::move(row));
  }
  return rows;
}

// First symbol index whose MSE falls below 1.1x the final-20-symbol average.
// Rows must be a run_channel_mse trajectory (symbol axis, one detector).
inline std::size_t mse_plateau_index(const std::vector<RecordRow>& rows) {
  if (rows.size() < 25) throw ConfigError("experiments: trajectory too short for plateau search");
  double tail = 0.0;
  const std::size_t tail_len = 20;
  for (std::size_t i = rows.size() - tail_len; i < rows.size(); ++i) tail += rows[i].mse_mean.value();
  tail /= static_cast<double>(tail_len);
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].mse_mean.value() < 1.1 * tail) return i;
  return rows.size() - 1;
}

struct SignificanceRow {
  double axis_value = 0.0;
  DetectorKind baseline = DetectorKind::kMatchedFilter;
  double h = 0.0;
  double p_raw = 1.0;
  double p_adj = 1.0;
  std::string verdict;  // win | ns | loss (from the FPA side)
};

// Pairwise FPA-vs-baseline Kruskal-Wallis per axis point with Bonferroni
// correction over the number of baselines at that point.
inline std::vector<SignificanceRow> run_significance(const std::vector<RecordRow>& rows,
                                                     double alpha = 0.05) {
  std::map<double, std::map<DetectorKind, const RecordRow*>> by_point;
  for (const RecordRow& row : rows) by_point[row.axis_value][row.detector] = &row;

  std::vector<SignificanceRow> out;
  for (const auto& [axis_value, dets] : by_point) {
    const auto fpa_it = dets.find(DetectorKind::kFpa);
    if (fpa_it == dets.end())
      throw ConfigError("significance: rows must include the fpa detector");
    const RecordRow& fpa_row = *fpa_it->second;
    if (fpa_row.per_run_ber.size() < 5)
      throw ConfigError("significance: need at least 5 runs, got " +
                        std::to_string(fpa_row.per_run_ber.size()));
    const std::size_t m = dets.size() - 1;
    for (const auto& [kind, row] : dets) {
      if (kind == DetectorKind::kFpa) continue;
      const KruskalWallisResult kw = kruskal_wallis({fpa_row.per_run_ber, row->per_run_ber});
      SignificanceRow sig;
      sig.axis_value = axis_value;
      sig.baseline = kind;
      sig.h = kw.h;
      sig.p_raw = kw.p_value;
      sig.p_adj = bonferroni_adjust({kw.p_value}, std::max<std::size_t>(1, m)).front();
      if (sig.p_adj < alpha)
        sig.verdict = fpa_row.ber_mean < row->ber_mean ? "win" : "loss";
      else
        sig.verdict = "ns";
      out.push_back(std::move(sig));
    }
  }
  return out;
}

// Friedman over the simulated detectors' mean-BER matrix (rows = axis points).
inline FriedmanResult friedman_over_rows(const std::vector<RecordRow>& rows,
                                         std::vector<DetectorKind>* detector_order = nullptr) {
  std::map<double, std::map<DetectorKind, double>> by_point;
  std::map<DetectorKind, std::size_t> seen;
  for (const RecordRow& row : rows) {
    by_point[row.axis_value][row.detector] = row.ber_mean;
    ++seen[row.detector];
  }
  std::vector<DetectorKind> order;
  for (const auto& [kind, count] : seen) {
    if (count != by_point.size())
      throw ConfigError("friedman: detector " + detector_name(kind) + " missing at some points");
    order.push_back(kind);
  }
  std::vector<std::vector<double>> matrix;
  for (const auto& [axis_value, dets] : by_point) {
    std::vector<double> row;
    for (DetectorKind k : order) row.push_back(dets.at(k));
    matrix.push_back(std::move(row));
  }
  if (detector_order) *detector_order = order;
  return friedman(matrix, /*lower_is_better=*/true);
}

// ---- CSV emission -------------------------------------------------------

inline std::string records_csv(const std::vector<RecordRow>& rows) {
  std::string out = csv_line({"exp_id", "detector", "axis_name", "axis_value", "runs", "bits",
                              "ber_best", "ber_mean", "ber_worst", "ber_std", "mse_mean",
                              "seconds"});
  for (const RecordRow& row : rows) {
    const bool has_ber = !row.per_run_ber.empty();
    out += csv_line({row.exp_id, detector_name(row.detector), row.axis_name,
                     format_double(row.axis_value), std::to_string(row.runs),
                     std::to_string(row.bits), has_ber ? format_double(row.ber_best) : "",
                     has_ber ? format_double(row.ber_mean) : "",
                     has_ber ? format_double(row.ber_worst) : "",
                     has_ber ? format_double(row.ber_std) : "",
                     row.mse_mean ? format_double(*row.mse_mean) : "",
                     format_double(row.seconds)});
  }
  return out;
}

inline std::string significance_csv(const std::vector<SignificanceRow>& rows,
                                    const std::string& axis_name) {
  std::string out = csv_line({axis_name, "baseline", "H", "p_raw", "p_adj", "verdict"});
  for (const SignificanceRow& row : rows)
    out += csv_line({format_double(row.axis_value), detector_name(row.baseline),
                     format_double(row.h), format_double(row.p_raw), format_double(row.p_adj),
                     row.verdict});
  return out;
}

}  // namespace mudsim
