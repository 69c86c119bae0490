#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace sdv {

/// Hidden attack bits s_0..s_n, one per sensor (1 = attacked).
class SensorStateVector {
 public:
  SensorStateVector() = default;
  explicit SensorStateVector(std::size_t sensor_count) : bits_(sensor_count, false) {}
  explicit SensorStateVector(std::vector<bool> bits) : bits_(std::move(bits)) {}

  std::size_t size() const noexcept { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_.at(i); }
  void set(std::size_t i, bool attacked = true) { bits_.at(i) = attacked; }
  std::size_t popcount() const noexcept;
  bool any() const noexcept { return popcount() > 0; }

  /// Indices of attacked sensors in increasing order.
  std::vector<std::size_t> attacked() const;

  /// State of the first `count` sensors.
  SensorStateVector prefix(std::size_t count) const;

  const std::vector<bool>& bits() const noexcept { return bits_; }
  std::string to_string() const;

  bool operator==(const SensorStateVector&) const = default;

 private:
  std::vector<bool> bits_;
};

}  // namespace sdv
