#include "sdv/core/sensor_state.hpp"

#include <algorithm>
#include <stdexcept>

namespace sdv {

std::size_t SensorStateVector::popcount() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true));
}

std::vector<std::size_t> SensorStateVector::attacked() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) out.push_back(i);
  }
  return out;
}

SensorStateVector SensorStateVector::prefix(std::size_t count) const {
  if (count > bits_.size()) throw std::out_of_range("sensor state prefix longer than vector");
  return SensorStateVector(std::vector<bool>(bits_.begin(), bits_.begin() + count));
}

std::string SensorStateVector::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (i) s += ',';
    s += bits_[i] ? '1' : '0';
  }
  return s + "]";
}

}  // namespace sdv
