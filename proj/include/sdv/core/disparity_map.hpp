#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace sdv {

/// Per-pixel disparity grid with a validity mask, row-major.
class DisparityMap {
 public:
  DisparityMap() = default;
  DisparityMap(int width, int height);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  bool valid(std::size_t i) const noexcept { return valid_[i] != 0; }
  double value(std::size_t i) const noexcept { return values_[i]; }
  bool valid(int x, int y) const noexcept { return valid(index(x, y)); }
  double value(int x, int y) const noexcept { return value(index(x, y)); }

  /// Stores a valid disparity; throws DomainError if not finite and > 0.
  void set(std::size_t i, double disparity);
  void set(int x, int y, double disparity) { set(index(x, y), disparity); }
  void invalidate(std::size_t i) noexcept;

  std::size_t valid_count() const noexcept;

  /// Multiplies every valid disparity by `factor` (> 0).
  void scale(double factor);

  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<std::uint8_t>& mask() const noexcept { return valid_; }

  /// Rebuilds from raw buffers; checks sizes and the positivity invariant.
  static DisparityMap from_buffers(int width, int height, std::vector<double> values,
                                   std::vector<std::uint8_t> mask);

  bool operator==(const DisparityMap&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
  std::vector<std::uint8_t> valid_;
};

}  // namespace sdv
