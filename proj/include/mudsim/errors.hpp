#pragma once

#include <stdexcept>
#include <string>

namespace mudsim {

// Invalid or inconsistent user-supplied configuration (bad polynomial, out-of-range
// parameter, unknown key, ...). Carries a message naming the offending field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A detector cannot run on this problem instance (e.g. decorrelator on a singular
// correlation matrix). Distinct from ConfigError so harness code can skip the
// detector instead of aborting the whole experiment.
class DetectorUnavailable : public std::runtime_error {
 public:
  explicit DetectorUnavailable(const std::string& what) : std::runtime_error(what) {}
};

// Numerical breakdown inside an optimizer (non-finite fitness and similar).
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mudsim
