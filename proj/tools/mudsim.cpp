// mudsim — command-line front end for the DS/CDMA multiuser-detection
// simulator. Subcommands map one-to-one onto the experiment runners; all
// randomness flows from --seed (or the config base_seed), progress goes to
// stderr, and stdout carries machine-readable key=value summaries only.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mudsim/channel.hpp"
#include "mudsim/config.hpp"
#include "mudsim/detectors.hpp"
#include "mudsim/experiments.hpp"
#include "mudsim/fpa.hpp"
#include "mudsim/gold.hpp"
#include "mudsim/io.hpp"
#include "mudsim/objective.hpp"
#include "mudsim/published.hpp"
#include "mudsim/rng.hpp"
#include "mudsim/stats.hpp"

namespace fs = std::filesystem;
using namespace mudsim;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  std::size_t workers = 0;
  std::uint64_t min_bits = 0;
  bool extended = false;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* workers_opt = nullptr;
  CLI::Option* min_bits_opt = nullptr;
};

void attach_common(CLI::App* sub, CommonOpts& c, const std::string& default_out) {
  c.out_dir = default_out;
  sub->add_option("--config", c.config_path, "JSON config file (omit for baseline defaults)");
  sub->add_option("--out", c.out_dir, "output directory")->capture_default_str();
  c.seed_opt = sub->add_option("--seed", c.seed, "base seed (overrides config)");
  c.workers_opt = sub->add_option("--workers", c.workers, "worker threads (0 = all hardware)");
  c.min_bits_opt = sub->add_option("--min-bits", c.min_bits, "minimum bits per point (overrides config)");
  sub->add_flag("--extended", c.extended, "enable extended (>= 1e6-bit) high-SNR points");
}

// Resolve file + env + flag layers into one config. Flags win over env wins
// over file. When the document never mentioned axis_values, the subcommand's
// natural axis default applies; likewise default_symbol_metric (when given)
// fills in a symbol_metric the document left unset.
ExperimentConfig resolve_config(const CommonOpts& c, const std::vector<double>& default_axis,
                                const char* default_symbol_metric = nullptr) {
  nlohmann::json j = load_config_json(c.config_path);
  const bool axis_given = j.is_object() && j.contains("axis_values");
  if (default_symbol_metric && !(j.is_object() && j.contains("symbol_metric")))
    j["symbol_metric"] = default_symbol_metric;
  ExperimentConfig cfg = config_from_json(j);
  if (c.seed_opt && c.seed_opt->count()) cfg.base_seed = c.seed;
  if (c.workers_opt && c.workers_opt->count()) cfg.workers = c.workers;
  if (c.min_bits_opt && c.min_bits_opt->count()) cfg.min_bits = c.min_bits;
  if (c.extended) cfg.extended = true;
  if (!axis_given && !default_axis.empty()) cfg.axis_values = default_axis;
  return cfg;
}

void write_manifest_file(const fs::path& out_dir, const nlohmann::json& manifest) {
  write_text_file((out_dir / "manifest.json").string(), manifest.dump(2) + "\n");
}

// gnuplot-ready companion: one block per detector, columns
// axis mean std best worst (or symbol mse for trajectory records).
std::string dat_text(const std::vector<RecordRow>& rows) {
  std::ostringstream os;
  std::map<DetectorKind, std::vector<const RecordRow*>> by_det;
  for (const RecordRow& row : rows) by_det[row.detector].push_back(&row);
  bool first = true;
  for (const auto& [kind, det_rows] : by_det) {
    if (!first) os << "\n\n";
    first = false;
    os << "# detector: " << detector_name(kind) << "\n";
    if (!det_rows.empty() && det_rows.front()->mse_mean.has_value()) {
      os << "# " << det_rows.front()->axis_name << " mse_mean\n";
      for (const RecordRow* row : det_rows)
        os << format_double(row->axis_value) << " " << format_double(row->mse_mean.value()) << "\n";
    } else {
      os << "# " << det_rows.front()->axis_name << " ber_mean ber_std ber_best ber_worst\n";
      for (const RecordRow* row : det_rows)
        os << format_double(row->axis_value) << " " << format_double(row->ber_mean) << " "
           << format_double(row->ber_std) << " " << format_double(row->ber_best) << " "
           << format_double(row->ber_worst) << "\n";
    }
  }
  return os.str();
}

std::optional<double> published_timing_percent(const std::string& name) {
  for (const PublishedTimingRow& row : kPublishedTiming)
    if (row.detector == name) return row.percent_of_fpa;
  return std::nullopt;
}

// Wall-clock report relative to the FPA detector (report-only; the absolute
// numbers are hardware-dependent). Published-only rows carry reference
// percentages for detectors this tool does not simulate.
std::string timing_csv(const std::vector<RecordRow>& rows) {
  std::map<DetectorKind, double> seconds;
  for (const RecordRow& row : rows) seconds[row.detector] += row.seconds;
  const double fpa_seconds =
      seconds.count(DetectorKind::kFpa) ? seconds.at(DetectorKind::kFpa) : 0.0;
  std::ostringstream os;
  os << "detector,source,seconds,percent_of_fpa_measured,percent_of_fpa_published\n";
  for (const auto& [kind, secs] : seconds) {
    const std::string name = detector_name(kind);
    os << name << ",simulated," << format_double(secs) << ",";
    if (fpa_seconds > 0.0) os << format_double(100.0 * secs / fpa_seconds);
    os << ",";
    if (const auto pub = published_timing_percent(name)) os << format_double(*pub);
    os << "\n";
  }
  for (const PublishedTimingRow& row : kPublishedTiming) {
    bool simulated = false;
    for (const auto& [kind, secs] : seconds)
      if (detector_name(kind) == row.detector) simulated = true;
    if (simulated) continue;
    os << row.detector << ",published,,," << format_double(row.percent_of_fpa) << "\n";
  }
  return os.str();
}

std::string published_reference_csv() {
  std::ostringstream os;
  os << "detector,snr_db,ber_mean,ber_std,implemented\n";
  for (const PublishedBerRow& row : kPublishedBerTable)
    for (std::size_t i = 0; i < kPublishedSnrDb.size(); ++i)
      os << row.detector << "," << format_double(kPublishedSnrDb[i]) << ","
         << format_double(row.mean_ber[i]) << "," << format_double(row.std_ber[i]) << ","
         << (row.implemented ? "yes" : "no") << "\n";
  return os.str();
}

std::string friedman_csv(const FriedmanResult& fr, const std::vector<std::string>& names) {
  std::ostringstream os;
  os << "detector,average_rank,statistic,p_value,dof\n";
  for (std::size_t i = 0; i < names.size(); ++i)
    os << names[i] << "," << format_double(fr.average_ranks[i]) << ","
       << format_double(fr.statistic) << "," << format_double(fr.p_value) << ","
       << format_double(static_cast<double>(fr.dof)) << "\n";
  return os.str();
}

void print_friedman_summary(const std::string& tag, const FriedmanResult& fr,
                            const std::vector<std::string>& names) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < names.size(); ++i)
    if (fr.average_ranks[i] < fr.average_ranks[best]) best = i;
  std::cout << tag << "_best=" << names[best] << "\n"
            << tag << "_best_rank=" << format_double(fr.average_ranks[best]) << "\n"
            << tag << "_statistic=" << format_double(fr.statistic) << "\n"
            << tag << "_p=" << format_double(fr.p_value) << "\n";
}

// ---------------------------------------------------------------------------
// Sweep-style subcommands (ber-sweep, capacity, nearfar, mse)
// ---------------------------------------------------------------------------

int run_sweep_command(const std::string& subcommand, const CommonOpts& opts,
                      const std::vector<double>& default_axis) {
  // Tracking the fading trajectory needs the amplitude to be identifiable from
  // the likelihood, which holds under the hard-decision symbol metric; BER
  // sweeps keep the continuous default.
  ExperimentConfig cfg =
      resolve_config(opts, default_axis, subcommand == "mse" ? "sign" : nullptr);
  const fs::path out_dir(opts.out_dir);
  nlohmann::json manifest = make_manifest(subcommand, opts.config_path, cfg, opts.out_dir);
  write_manifest_file(out_dir, manifest);

  std::vector<RecordRow> rows;
  if (subcommand == "ber-sweep")
    rows = run_ber_sweep(cfg);
  else if (subcommand == "capacity")
    rows = run_capacity(cfg);
  else if (subcommand == "nearfar")
    rows = run_nearfar(cfg);
  else
    rows = run_channel_mse(cfg);

  const fs::path records_path = out_dir / "records.csv";
  write_text_file(records_path.string(), records_csv(rows));
  std::cout << "records_csv=" << records_path.string() << "\n";
  const std::string exp_id = rows.empty() ? subcommand : rows.front().exp_id;
  const fs::path dat_path = out_dir / (exp_id + ".dat");
  write_text_file(dat_path.string(), dat_text(rows));
  std::cout << "dat=" << dat_path.string() << "\n";

  if (subcommand == "mse") {
    try {
      const std::size_t plateau = mse_plateau_index(rows);
      std::cout << "plateau_index=" << plateau << "\n";
    } catch (const ConfigError& e) {
      std::cerr << "note: plateau detection skipped: " << e.what() << "\n";
    }
    std::cout << "final_mse=" << format_double(rows.back().mse_mean.value()) << "\n";
  } else {
    const fs::path timing_path = out_dir / "timing.csv";
    write_text_file(timing_path.string(), timing_csv(rows));
    std::cout << "timing_csv=" << timing_path.string() << "\n";

    const bool has_fpa =
        std::find(cfg.detectors.begin(), cfg.detectors.end(), DetectorKind::kFpa) !=
        cfg.detectors.end();
    if (has_fpa && cfg.detectors.size() >= 2 && cfg.runs >= 5) {
      const std::vector<SignificanceRow> sig = run_significance(rows);
      const fs::path sig_path = out_dir / "significance.csv";
      write_text_file(sig_path.string(), significance_csv(sig, cfg.axis_name));
      std::cout << "significance_csv=" << sig_path.string() << "\n";
    } else {
      std::cerr << "note: significance tests skipped (need the fpa detector, >= 2 detectors and "
                   ">= 5 runs)\n";
    }
    if (cfg.detectors.size() >= 2) {
      try {
        std::vector<DetectorKind> order;
        const FriedmanResult fr = friedman_over_rows(rows, &order);
        std::vector<std::string> names;
        for (DetectorKind k : order) names.push_back(detector_name(k));
        const fs::path fr_path = out_dir / "friedman.csv";
        write_text_file(fr_path.string(), friedman_csv(fr, names));
        std::cout << "friedman_csv=" << fr_path.string() << "\n";
        print_friedman_summary("friedman", fr, names);
      } catch (const ConfigError& e) {
        std::cerr << "note: friedman skipped: " << e.what() << "\n";
      }
    }
  }
  if (subcommand == "ber-sweep") {
    const fs::path pub_path = out_dir / "published_reference.csv";
    write_text_file(pub_path.string(), published_reference_csv());
    std::cout << "published_reference_csv=" << pub_path.string() << "\n";
  }

  manifest["finished_at"] = iso8601_utc_now();
  write_manifest_file(out_dir, manifest);
  std::cout << "manifest=" << (out_dir / "manifest.json").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// codebook
// ---------------------------------------------------------------------------

int run_codebook(const CommonOpts& opts, unsigned degree_flag, std::uint32_t poly1_flag,
                 std::uint32_t poly2_flag, bool degree_set, bool polys_set) {
  ExperimentConfig cfg = resolve_config(opts, {});
  if (degree_set) cfg.degree = degree_flag;
  if (polys_set) {
    cfg.poly1 = poly1_flag;
    cfg.poly2 = poly2_flag;
  }
  const Codebook cb = cfg.poly1 && cfg.poly2 ? gold_codebook(cfg.degree, *cfg.poly1, *cfg.poly2)
                                             : gold_codebook(cfg.degree);
  std::ostringstream os;
  const double scale = std::sqrt(static_cast<double>(cb.chips_per_symbol));
  for (const Eigen::VectorXd& sig : cb.signatures) {
    for (Eigen::Index n = 0; n < sig.size(); ++n) {
      if (n) os << ",";
      os << (sig[n] * scale > 0 ? 1 : -1);
    }
    os << "\n";
  }
  std::cout << os.str();
  if (!opts.out_dir.empty() && opts.out_dir != "-") {
    const fs::path out_dir(opts.out_dir);
    nlohmann::json manifest = make_manifest("codebook", opts.config_path, cfg, opts.out_dir);
    write_manifest_file(out_dir, manifest);
    write_text_file((out_dir / "codebook.csv").string(), os.str());
    manifest["finished_at"] = iso8601_utc_now();
    write_manifest_file(out_dir, manifest);
    std::cerr << "wrote " << (out_dir / "codebook.csv").string() << "\n";
  }
  return 0;
}

// ---------------------------------------------------------------------------
// stats — offline rank/significance analysis
// ---------------------------------------------------------------------------

std::vector<RecordRow> read_records_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("stats: cannot open records file '" + path + "'");
  std::vector<RecordRow> rows;
  std::string line;
  bool header = true;
  while (std::getline(f, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    while (fields.size() < 12) fields.emplace_back();
    RecordRow row;
    row.exp_id = fields[0];
    row.detector = detector_from_name(fields[1]);
    row.axis_name = fields[2];
    row.axis_value = std::stod(fields[3]);
    row.runs = static_cast<std::size_t>(std::stoull(fields[4]));
    row.bits = static_cast<std::size_t>(std::stoull(fields[5]));
    if (!fields[7].empty()) row.ber_mean = std::stod(fields[7]);
    rows.push_back(std::move(row));
  }
  return rows;
}

int run_stats(const CommonOpts& opts, const std::string& records_path) {
  ExperimentConfig cfg = resolve_config(opts, {});
  const fs::path out_dir(opts.out_dir);
  nlohmann::json manifest = make_manifest("stats", opts.config_path, cfg, opts.out_dir);
  write_manifest_file(out_dir, manifest);

  write_text_file((out_dir / "published_reference.csv").string(), published_reference_csv());
  std::cout << "published_reference_csv=" << (out_dir / "published_reference.csv").string()
            << "\n";

  // Friedman over the published means of the four nature-inspired detectors.
  const std::vector<std::string> pub_names = {"fpa", "standard-ga", "tabu-search",
                                              "simulated-quenching"};
  std::vector<std::vector<double>> matrix(kPublishedSnrDb.size(),
                                          std::vector<double>(pub_names.size()));
  for (std::size_t c = 0; c < pub_names.size(); ++c) {
    const PublishedBerRow* src = nullptr;
    for (const PublishedBerRow& row : kPublishedBerTable)
      if (row.detector == pub_names[c]) src = &row;
    for (std::size_t p = 0; p < kPublishedSnrDb.size(); ++p) matrix[p][c] = src->mean_ber[p];
  }
  const FriedmanResult fr = friedman(matrix, /*lower_is_better=*/true);
  write_text_file((out_dir / "friedman_published.csv").string(), friedman_csv(fr, pub_names));
  std::cout << "friedman_published_csv=" << (out_dir / "friedman_published.csv").string() << "\n";
  print_friedman_summary("friedman_published", fr, pub_names);

  if (!records_path.empty()) {
    const std::vector<RecordRow> rows = read_records_csv(records_path);
    std::vector<DetectorKind> order;
    const FriedmanResult fr2 = friedman_over_rows(rows, &order);
    std::vector<std::string> names;
    for (DetectorKind k : order) names.push_back(detector_name(k));
    write_text_file((out_dir / "friedman.csv").string(), friedman_csv(fr2, names));
    std::cout << "friedman_csv=" << (out_dir / "friedman.csv").string() << "\n";
    print_friedman_summary("friedman", fr2, names);
  }

  manifest["finished_at"] = iso8601_utc_now();
  write_manifest_file(out_dir, manifest);
  std::cout << "manifest=" << (out_dir / "manifest.json").string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// selftest — fast built-in oracle checks
// ---------------------------------------------------------------------------

bool check(bool ok, const std::string& name, const std::string& detail, int& failures) {
  std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
  if (!ok) ++failures;
  return ok;
}

int run_selftest(const CommonOpts& opts) {
  int failures = 0;
  const std::uint64_t seed = (opts.seed_opt && opts.seed_opt->count()) ? opts.seed : 1;

  {  // Gold property: zero-shift cross-correlations take only three values.
    const Codebook cb = gold_codebook(5);
    const double n = static_cast<double>(cb.chips_per_symbol);
    bool ok = true;
    double worst = 0.0;
    for (std::size_t i = 0; i < cb.family_size() && ok; ++i)
      for (std::size_t j = i + 1; j < cb.family_size(); ++j) {
        const double c = cb.signatures[i].dot(cb.signatures[j]) * n;
        const double err = std::min({std::abs(c + 9.0), std::abs(c + 1.0), std::abs(c - 7.0)});
        worst = std::max(worst, err);
        if (err > 1e-9) {
          ok = false;
          break;
        }
      }
    check(ok, "gold-three-valued",
          "33 signatures, pairwise unnormalized correlations in {-9,-1,+7}, max deviation " +
              format_double(worst),
          failures);
  }

  {  // ML equivalence: exhaustive search equals direct enumeration and
     // recovers the transmitted symbols in the noiseless known-channel case.
    const Codebook cb = gold_codebook(5);
    const Eigen::MatrixXd r = correlation_matrix(cb, 4);
    const Eigen::VectorXd energies = Eigen::VectorXd::Ones(4);
    Rng rng = make_rng(derive_seed(seed, {hash_word("selftest"), hash_word("ml")}));
    std::uniform_real_distribution<double> a_dist(0.5, 1.2);
    std::uniform_int_distribution<int> bit(0, 1);
    bool ok = true;
    std::string why = "50 noiseless U=4 instances match brute-force enumeration";
    for (int trial = 0; trial < 50 && ok; ++trial) {
      Eigen::VectorXd a(4), d(4);
      for (int i = 0; i < 4; ++i) {
        a[i] = a_dist(rng);
        d[i] = bit(rng) ? 1.0 : -1.0;
      }
      const Eigen::VectorXd z = r * (energies.cwiseSqrt().cwiseProduct(a).cwiseProduct(d));
      const MlResult ml = ml_exhaustive(z, r, energies, a);
      double best_fit = -std::numeric_limits<double>::infinity();
      Eigen::VectorXd best_d(4);
      for (unsigned m = 0; m < 16; ++m) {
        Eigen::VectorXd cand(4);
        for (int i = 0; i < 4; ++i) cand[i] = ((m >> (3 - i)) & 1u) ? 1.0 : -1.0;
        const Eigen::VectorXd y = energies.cwiseSqrt().cwiseProduct(a).cwiseProduct(cand);
        const double fit = 2.0 * y.dot(z) - y.dot(r * y);
        if (fit > best_fit) {
          best_fit = fit;
          best_d = cand;
        }
      }
      if ((ml.symbols - best_d).cwiseAbs().maxCoeff() > 0 ||
          std::abs(ml.fitness - best_fit) > 1e-9 * std::max(1.0, std::abs(best_fit)) ||
          (ml.symbols - d).cwiseAbs().maxCoeff() > 0) {
        ok = false;
        why = "mismatch at trial " + std::to_string(trial);
      }
    }
    check(ok, "ml-equivalence", why, failures);
  }

  {  // Q-function calibration: single-user matched filter against the
     // analytic BER for antipodal signaling.
    ExperimentConfig cfg;
    cfg.exp_id = "selftest-qfunc";
    cfg.detectors = {DetectorKind::kMatchedFilter};
    cfg.axis_values = {6.0};
    cfg.num_users = 1;
    cfg.runs = 2;
    cfg.min_bits = 200000;
    cfg.base_seed = seed;
    cfg.doppler_rate = 0.0;
    cfg.fading_innovation_std = 0.0;
    cfg.fading_init_mean = 1.0;
    cfg.fading_init_std = 0.0;
    cfg.fading_init_min = 0.5;
    cfg.fading_init_max = 1.5;
    const std::vector<RecordRow> rows = run_ber_sweep(cfg);
    const double expected = q_function(std::sqrt(2.0 * std::pow(10.0, 0.6)));
    const double ratio = rows.front().ber_mean / expected;
    check(ratio > 0.8 && ratio < 1.25, "q-function-calibration",
          "U=1 MF at 6 dB: simulated " + format_double(rows.front().ber_mean) + " vs analytic " +
              format_double(expected) + " (ratio " + format_double(ratio) + ")",
          failures);
  }

  {  // Levy tail: at lambda=1 the step-size survival function decays like
     // x^{-1}; fit the tail exponent on a log-log CCDF.
    Rng rng = make_rng(derive_seed(seed, {hash_word("selftest"), hash_word("levy")}));
    const Eigen::VectorXd steps = levy_step(100000, 1.0, rng);
    std::vector<double> mags(static_cast<std::size_t>(steps.size()));
    for (Eigen::Index i = 0; i < steps.size(); ++i)
      mags[static_cast<std::size_t>(i)] = std::abs(steps[i]);
    std::sort(mags.begin(), mags.end(), std::greater<double>());
    const std::size_t lo = 20, hi = 2000;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n_total = static_cast<double>(mags.size());
    for (std::size_t k = lo; k < hi; ++k) {
      const double x = std::log(mags[k]);
      const double y = std::log(static_cast<double>(k + 1) / n_total);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double m = static_cast<double>(hi - lo);
    const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    const double exponent = -slope;
    const bool sigma_ok = mantegna_sigma(1.0) == 1.0;
    check(sigma_ok && std::abs(exponent - 1.0) <= 0.15, "levy-tail",
          "lambda=1 tail exponent " + format_double(exponent) + " (sigma(1)=" +
              format_double(mantegna_sigma(1.0)) + ")",
          failures);
  }

  std::cout << "selftest_failures=" << failures << "\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DS/CDMA multiuser uplink simulator and detector benchmark"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolName) + " " + std::string(kToolVersion));

  CommonOpts ber_opts, cap_opts, nf_opts, mse_opts, stats_opts, cb_opts, st_opts;

  CLI::App* ber = app.add_subcommand("ber-sweep", "BER vs SNR for the user of interest");
  attach_common(ber, ber_opts, "out/ber-sweep");

  CLI::App* cap = app.add_subcommand("capacity", "BER vs number of active users (equal energies)");
  attach_common(cap, cap_opts, "out/capacity");

  CLI::App* nf = app.add_subcommand("nearfar", "BER vs interferer-to-UOI energy ratio");
  attach_common(nf, nf_opts, "out/nearfar");

  CLI::App* mse = app.add_subcommand("mse", "channel-estimation MSE trajectory over a frame");
  attach_common(mse, mse_opts, "out/mse");

  CLI::App* stats_cmd = app.add_subcommand("stats", "rank tests and published reference tables");
  attach_common(stats_cmd, stats_opts, "out/stats");
  std::string records_path;
  stats_cmd->add_option("--records", records_path, "records.csv to analyze with the Friedman test");

  CLI::App* cb = app.add_subcommand("codebook", "dump Gold signatures as CSV rows of +/-1 chips");
  attach_common(cb, cb_opts, "");
  unsigned cb_degree = 0;
  std::uint32_t cb_poly1 = 0, cb_poly2 = 0;
  CLI::Option* cb_degree_opt = cb->add_option("--degree", cb_degree, "LFSR degree (3..16)");
  CLI::Option* cb_poly1_opt = cb->add_option("--poly1", cb_poly1, "first primitive polynomial mask");
  CLI::Option* cb_poly2_opt = cb->add_option("--poly2", cb_poly2, "second primitive polynomial mask");

  CLI::App* st = app.add_subcommand("selftest", "run the built-in oracle checks");
  attach_common(st, st_opts, "");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(ber)) return run_sweep_command("ber-sweep", ber_opts, {7, 8, 9, 10, 11, 12, 13, 14});
    if (app.got_subcommand(cap)) return run_sweep_command("capacity", cap_opts, {1, 2, 4, 6, 8, 10});
    if (app.got_subcommand(nf)) return run_sweep_command("nearfar", nf_opts, {0, 5, 10, 15});
    if (app.got_subcommand(mse)) return run_sweep_command("mse", mse_opts, {});
    if (app.got_subcommand(stats_cmd)) return run_stats(stats_opts, records_path);
    if (app.got_subcommand(cb))
      return run_codebook(cb_opts, cb_degree, cb_poly1, cb_poly2, cb_degree_opt->count() > 0,
                          cb_poly1_opt->count() > 0 && cb_poly2_opt->count() > 0);
    if (app.got_subcommand(st)) return run_selftest(st_opts);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no subcommand dispatched\n";
  return 2;
}
