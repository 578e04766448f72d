#pragma once

#include <array>
#include <string_view>

namespace mudsim {

// Published reference results for the baseline scenario (synchronous uplink,
// U=10, 4 dB near-far, 50 independent runs, SNR swept 7..14 dB). These rows
// are passthrough constants for side-by-side reporting and rank tests; they
// are never simulated here. Detectors marked simulated=false have no
// implementation in this library at all.
struct PublishedBerRow {
  std::string_view detector;
  bool implemented;               // whether this library also simulates the detector
  std::array<double, 8> mean_ber;
  std::array<double, 8> std_ber;
};

inline constexpr std::array<double, 8> kPublishedSnrDb = {7, 8, 9, 10, 11, 12, 13, 14};

inline constexpr std::array<PublishedBerRow, 8> kPublishedBerTable = {{
    {"standard-ga", true,
     {0.028, 0.018, 0.0101, 0.007, 0.005, 0.0038, 0.003, 0.0029},
     {0.012, 0.004, 0.002, 0.019, 0.001, 0.002, 0.0014, 0.0009}},
    {"matched-filter", true,
     {0.031, 0.022, 0.016, 0.013, 0.011, 0.011, 0.009, 0.009},
     {0.009, 0.009, 0.009, 0.004, 0.002, 0.001, 0.0012, 0.0011}},
    {"decorrelator", true,
     {0.027, 0.017, 0.009, 0.005, 0.002, 0.0009, 3.6e-4, 2.0e-4},
     {0.005, 0.002, 0.001, 0.001, 0.0010, 1.4e-4, 0.9e-4, 7.0e-5}},
    {"mahalanobis-rbf", false,
     {0.025, 0.011, 0.0047, 0.0018, 0.0006, 2.0e-4, 6.0e-5, 1.9e-5},
     {0.005, 0.0019, 0.0020, 0.0011, 0.0002, 1.1e-5, 1.2e-5, 0.18e-5}},
    {"mmse", true,
     {0.027, 0.013, 0.006, 0.0025, 0.0008, 3.0e-4, 1.1e-4, 6.5e-5},
     {0.010, 0.005, 0.001, 0.0011, 0.0001, 7.9e-5, 6.9e-5, 2.0e-5}},
    {"fpa", true,
     {0.018, 0.0085, 0.004, 0.0017, 5.2e-4, 1.5e-4, 3.5e-5, 7.2e-6},
     {0.012, 0.0011, 0.0007, 0.0006, 1.3e-4, 1.6e-5, 0.8e-6, 0.9e-6}},
    {"tabu-search", false,
     {0.034, 0.018, 0.0093, 0.005, 0.0013, 0.0002, 4.4e-5, 6.1e-6},
     {0.005, 0.003, 0.002, 0.0008, 0.0006, 2.0e-5, 2.2e-6, 1.4e-6}},
    {"simulated-quenching", false,
     {0.033, 0.018, 0.008, 0.0035, 8.5e-4, 1.1e-4, 2.0e-5, 6.1e-6},
     {0.015, 0.011, 0.0015, 0.0007, 1.0e-4, 1.4e-4, 8.0e-6, 1.1e-6}},
}};

// Published processing-time comparison at matched BER, percent of the FPA
// detector's wall clock.
struct PublishedTimingRow {
  std::string_view detector;
  double percent_of_fpa;
};

inline constexpr std::array<PublishedTimingRow, 4> kPublishedTiming = {{
    {"fpa", 100.0},
    {"standard-ga", 445.0},
    {"tabu-search", 150.0},
    {"simulated-quenching", 155.0},
}};

// Published Friedman average ranks over the four nature-inspired detectors
// (problems = the 8 SNR values above).
struct PublishedRankRow {
  std::string_view detector;
  double average_rank;
};

inline constexpr std::array<PublishedRankRow, 4> kPublishedFriedmanRanks = {{
    {"fpa", 1.625},
    {"simulated-quenching", 1.875},
    {"tabu-search", 3.00},
    {"standard-ga", 3.50},
}};

}  // namespace mudsim
