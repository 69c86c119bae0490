#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

#include "sdv/core/sensor_state.hpp"

namespace sdv {

/// Sensor triple (i, j, k) with i < j < k; k is the reference camera.
struct Triple {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t k = 0;
  std::string to_string() const;
  auto operator<=>(const Triple&) const = default;
};

/// Bits e_{i,j,n} for 0 <= i < j <= n-1, ordered lexicographically by (i, j).
class ErrorStateVector {
 public:
  ErrorStateVector() = default;
  /// Throws DomainError unless bits.size() == length_for(reference).
  ErrorStateVector(std::size_t reference, std::vector<bool> bits);

  static std::size_t length_for(std::size_t reference) noexcept {
    return reference * (reference - 1) / 2;
  }
  /// Triples in bit order for the given reference.
  static std::vector<Triple> triples(std::size_t reference);
  /// Bit position of pair (i, j), i < j < reference.
  static std::size_t position(std::size_t i, std::size_t j, std::size_t reference);

  std::size_t reference() const noexcept { return reference_; }
  std::size_t size() const noexcept { return bits_.size(); }
  bool operator[](std::size_t pos) const { return bits_.at(pos); }
  /// e_{min(a,b), max(a,b), n}.
  bool pair(std::size_t a, std::size_t b) const;
  bool all_zero() const noexcept;
  bool all_one() const noexcept;
  const std::vector<bool>& bits() const noexcept { return bits_; }
  std::string to_string() const;
  bool operator==(const ErrorStateVector&) const = default;

 private:
  std::size_t reference_ = 0;
  std::vector<bool> bits_;
};

/// e_{i,j,n} = s_i | s_j | s_n with n the last sensor. Needs at least three
/// sensors.
ErrorStateVector predict_error_state(const SensorStateVector& s);

}  // namespace sdv
