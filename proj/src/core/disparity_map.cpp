#include "sdv/core/disparity_map.hpp"

#include <algorithm>
#include <cmath>

#include "sdv/core/errors.hpp"

namespace sdv {

DisparityMap::DisparityMap(int width, int height) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) throw InvariantError("disparity map dimensions must be positive");
  const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  values_.assign(n, 0.0);
  valid_.assign(n, 0);
}

void DisparityMap::set(std::size_t i, double disparity) {
  if (!(disparity > 0.0) || !std::isfinite(disparity)) {
    throw DomainError("disparity must be finite and > 0");
  }
  values_[i] = disparity;
  valid_[i] = 1;
}

void DisparityMap::invalidate(std::size_t i) noexcept {
  values_[i] = 0.0;
  valid_[i] = 0;
}

std::size_t DisparityMap::valid_count() const noexcept {
  return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), std::uint8_t{1}));
}

void DisparityMap::scale(double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor)) throw DomainError("scale factor must be > 0");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (valid_[i]) values_[i] *= factor;
  }
}

DisparityMap DisparityMap::from_buffers(int width, int height, std::vector<double> values,
                                        std::vector<std::uint8_t> mask) {
  DisparityMap m(width, height);
  if (values.size() != m.size() || mask.size() != m.size()) {
    throw InvariantError("disparity buffer size does not match dimensions");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (mask[i] > 1) throw InvariantError("validity mask entries must be 0 or 1");
    if (mask[i] && (!(values[i] > 0.0) || !std::isfinite(values[i]))) {
      throw InvariantError("valid disparity must be finite and > 0");
    }
    if (!mask[i]) values[i] = 0.0;
  }
  m.values_ = std::move(values);
  m.valid_ = std::move(mask);
  return m;
}

}  // namespace sdv
