#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "sdv/single/error_state.hpp"

namespace sdv {

/// Smallest sample whose strict-exceedance count is at most floor(r * N).
/// r = 0 gives the maximum sample. Throws CalibrationError on an empty
/// sample or r outside [0, 1].
double calibrate_threshold(std::span<const double> samples, double r);

/// Fraction of samples strictly above theta.
double exceedance_rate(std::span<const double> samples, double theta);

/// Per-triple disparity-error thresholds.
class ThresholdTable {
 public:
  ThresholdTable() = default;
  explicit ThresholdTable(double r) : r_(r) {}

  /// Throws InvariantError unless theta is in [0, 1].
  void set(const Triple& t, double theta, std::size_t sample_count);
  bool contains(const Triple& t) const noexcept { return entries_.count(t) != 0; }
  /// Throws ConfigError when the triple is missing.
  double at(const Triple& t) const;
  std::size_t sample_count(const Triple& t) const;
  double r() const noexcept { return r_; }
  std::size_t size() const noexcept { return entries_.size(); }

  struct Entry {
    double theta = 0.0;
    std::size_t samples = 0;
    bool operator==(const Entry&) const = default;
  };
  const std::map<Triple, Entry>& entries() const noexcept { return entries_; }
  /// Throws InvariantError on any theta outside [0, 1] or r outside [0, 1].
  void validate() const;
  bool operator==(const ThresholdTable&) const = default;

 private:
  double r_ = 0.0;
  std::map<Triple, Entry> entries_;
};

ThresholdTable calibrate_thresholds(const std::map<Triple, std::vector<double>>& samples, double r);

/// Strict E > theta. Throws DomainError unless both lie in [0, 1].
bool detect_attack(double error, double theta);

}  // namespace sdv
