#include "sdv/single/calibration.hpp"

#include <algorithm>
#include <cmath>

#include "sdv/core/errors.hpp"

namespace sdv {

double calibrate_threshold(std::span<const double> samples, double r) {
  if (samples.empty()) throw CalibrationError("cannot calibrate on an empty sample");
  if (!(r >= 0.0 && r <= 1.0)) throw CalibrationError("false-alarm rate must lie in [0, 1]");
  std::vector<double> sorted(samples.begin(), samples.end());
  for (double x : sorted) {
    if (!std::isfinite(x)) throw CalibrationError("calibration sample is not finite");
  }
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const auto allowed = static_cast<std::size_t>(std::floor(r * static_cast<double>(n) + 1e-9));
  return allowed >= n ? sorted.front() : sorted[n - 1 - allowed];
}

double exceedance_rate(std::span<const double> samples, double theta) {
  if (samples.empty()) return 0.0;
  const auto above = std::count_if(samples.begin(), samples.end(), [&](double x) { return x > theta; });
  return static_cast<double>(above) / static_cast<double>(samples.size());
}

void ThresholdTable::set(const Triple& t, double theta, std::size_t sample_count) {
  if (!(theta >= 0.0 && theta <= 1.0))
    throw InvariantError("threshold for triple " + t.to_string() + " outside [0, 1]");
  entries_[t] = Entry{theta, sample_count};
}

double ThresholdTable::at(const Triple& t) const {
  const auto it = entries_.find(t);
  if (it == entries_.end()) throw ConfigError("no threshold for triple " + t.to_string());
  return it->second.theta;
}

std::size_t ThresholdTable::sample_count(const Triple& t) const {
  const auto it = entries_.find(t);
  if (it == entries_.end()) throw ConfigError("no threshold for triple " + t.to_string());
  return it->second.samples;
}

void ThresholdTable::validate() const {
  if (!(r_ >= 0.0 && r_ <= 1.0)) throw InvariantError("false-alarm rate outside [0, 1]");
  for (const auto& [t, e] : entries_) {
    if (!(e.theta >= 0.0 && e.theta <= 1.0))
      throw InvariantError("threshold for triple " + t.to_string() + " outside [0, 1]");
    if (!(t.i < t.j && t.j < t.k)) throw InvariantError("malformed triple " + t.to_string());
  }
}

ThresholdTable calibrate_thresholds(const std::map<Triple, std::vector<double>>& samples,
                                    double r) {
  ThresholdTable table(r);
  for (const auto& [t, values] : samples) {
    if (values.empty()) throw CalibrationError("no samples for triple " + t.to_string());
    table.set(t, calibrate_threshold(values, r), values.size());
  }
  table.validate();
  return table;
}

bool detect_attack(double error, double theta) {
  if (!(error >= 0.0 && error <= 1.0) || !(theta >= 0.0 && theta <= 1.0))
    throw DomainError("disparity error and threshold must lie in [0, 1]");
  return error > theta;
}

}  // namespace sdv
