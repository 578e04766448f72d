#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "mudsim/errors.hpp"

namespace mudsim {

// Chi-square survival function via the exact finite closed forms for integer
// degrees of freedom (no incomplete-gamma iteration needed; all terms are
// positive so there is no cancellation).
inline double chi_square_sf(double x, int dof) {
  if (dof < 1) throw ConfigError("chi_square_sf: dof must be >= 1");
  if (x < 0.0) throw ConfigError("chi_square_sf: x must be >= 0");
  if (x == 0.0) return 1.0;
  const double half_x = x / 2.0;
  if (dof % 2 == 0) {
    double term = 1.0;
    double sum = 1.0;
    for (int j = 1; j < dof / 2; ++j) {
      term *= half_x / j;
      sum += term;
    }
    return std::min(1.0, std::exp(-half_x) * sum);
  }
  double sum = 0.0;
  double term = std::sqrt(half_x) / std::tgamma(1.5);
  for (int j = 1; j <= (dof - 1) / 2; ++j) {
    sum += term;
    term *= half_x / (static_cast<double>(j) + 0.5);
  }
  return std::min(1.0, std::erfc(std::sqrt(half_x)) + std::exp(-half_x) * sum);
}

namespace detail {

// Midranks of `values` (1-based; tied entries share the average of their rank
// range). Optionally reports the size of every tie group for corrections.
inline std::vector<double> midranks(const std::vector<double>& values,
                                    std::vector<std::size_t>* tie_sizes = nullptr) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    const double mid = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mid;
    if (tie_sizes && j > i) tie_sizes->push_back(j - i + 1);
    i = j + 1;
  }
  return ranks;
}

}  // namespace detail

struct KruskalWallisResult {
  double h = 0.0;
  double p_value = 1.0;
  int dof = 0;
};

// Kruskal-Wallis one-way rank test with midrank tie correction. Completely
// tied data (every observation equal) is reported as H = 0, p = 1.
inline KruskalWallisResult kruskal_wallis(const std::vector<std::vector<double>>& groups) {
  if (groups.size() < 2) throw ConfigError("kruskal_wallis: need at least two groups");
  std::vector<double> pooled;
  for (const auto& g : groups) {
    if (g.empty()) throw ConfigError("kruskal_wallis: every group must be nonempty");
    pooled.insert(pooled.end(), g.begin(), g.end());
  }
  const double n = static_cast<double>(pooled.size());

  std::vector<std::size_t> tie_sizes;
  const std::vector<double> ranks = detail::midranks(pooled, &tie_sizes);

  double stat = 0.0;
  std::size_t offset = 0;
  for (const auto& g : groups) {
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) rank_sum += ranks[offset + i];
    stat += rank_sum * rank_sum / static_cast<double>(g.size());
    offset += g.size();
  }
  double h = 12.0 / (n * (n + 1.0)) * stat - 3.0 * (n + 1.0);

  double tie_term = 0.0;
  for (std::size_t t : tie_sizes) {
    const double td = static_cast<double>(t);
    tie_term += td * td * td - td;
  }
  const double correction = 1.0 - tie_term / (n * n * n - n);

  KruskalWallisResult res;
  res.dof = static_cast<int>(groups.size()) - 1;
  if (correction <= 0.0) {  // all observations identical
    res.h = 0.0;
    res.p_value = 1.0;
    return res;
  }
  res.h = h / correction;
  res.p_value = chi_square_sf(std::max(0.0, res.h), res.dof);
  return res;
}

// p'_i = min(1, m * p_i).
inline std::vector<double> bonferroni_adjust(const std::vector<double>& p_values, std::size_t m) {
  if (m < 1) throw ConfigError("bonferroni_adjust: m must be >= 1");
  std::vector<double> out(p_values.size());
  for (std::size_t i = 0; i < p_values.size(); ++i)
    out[i] = std::min(1.0, static_cast<double>(m) * p_values[i]);
  return out;
}

struct FriedmanResult {
  std::vector<double> average_ranks;  // per algorithm (column), rank 1 = best
  double statistic = 0.0;             // classic chi-square form
  double p_value = 1.0;
  int dof = 0;
};

// Friedman rank test over a problems x algorithms matrix (row-major). With
// lower_is_better, rank 1 goes to the smallest value in each row.
inline FriedmanResult friedman(const std::vector<std::vector<double>>& matrix,
                               bool lower_is_better = true) {
  const std::size_t n_rows = matrix.size();
  if (n_rows < 2) throw ConfigError("friedman: need at least two problems (rows)");
  const std::size_t k = matrix.front().size();
  if (k < 2) throw ConfigError("friedman: need at least two algorithms (columns)");

  std::vector<double> rank_sums(k, 0.0);
  std::vector<double> row(k);
  for (const auto& r : matrix) {
    if (r.size() != k) throw ConfigError("friedman: ragged matrix");
    for (std::size_t j = 0; j < k; ++j) row[j] = lower_is_better ? r[j] : -r[j];
    const std::vector<double> ranks = detail::midranks(row);
    for (std::size_t j = 0; j < k; ++j) rank_sums[j] += ranks[j];
  }

  FriedmanResult res;
  res.average_ranks.resize(k);
  const double nd = static_cast<double>(n_rows);
  const double kd = static_cast<double>(k);
  double dev_sq = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    res.average_ranks[j] = rank_sums[j] / nd;
    const double dev = res.average_ranks[j] - (kd + 1.0) / 2.0;
    dev_sq += dev * dev;
  }
  res.statistic = 12.0 * nd / (kd * (kd + 1.0)) * dev_sq;
  res.dof = static_cast<int>(k) - 1;
  res.p_value = chi_square_sf(res.statistic, res.dof);
  return res;
}

}  // namespace mudsim
