#include "sdv/core/camera.hpp"

#include <cmath>

#include "sdv/core/errors.hpp"

namespace sdv {

void CameraModel::validate() const {
  if (!(focal_length > 0.0) || !std::isfinite(focal_length)) {
    throw InvariantError("camera focal length must be positive");
  }
  if (image_width <= 0 || image_height <= 0) {
    throw InvariantError("camera image dimensions must be positive");
  }
  if (!std::isfinite(cx) || !std::isfinite(cy) || !std::isfinite(rig_offset)) {
    throw InvariantError("camera has non-finite parameters");
  }
}

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw DomainError(std::string(name) + " must be finite and > 0");
  }
}

}  // namespace

double disparity_to_depth(double disparity, double focal_length, double baseline) {
  require_positive(disparity, "disparity");
  require_positive(focal_length, "focal length");
  require_positive(baseline, "baseline");
  return focal_length * baseline / disparity;
}

double depth_to_disparity(double depth, double focal_length, double baseline) {
  require_positive(depth, "depth");
  require_positive(focal_length, "focal length");
  require_positive(baseline, "baseline");
  return focal_length * baseline / depth;
}

void validate_rig_order(const std::vector<CameraModel>& cameras) {
  for (std::size_t i = 1; i < cameras.size(); ++i) {
    if (!(cameras[i].rig_offset > cameras[i - 1].rig_offset)) {
      throw InvariantError("camera rig offsets must increase strictly from right to left");
    }
  }
}

}  // namespace sdv
