#pragma once

#include <cstddef>
#include <vector>

namespace sdv {

/// Pinhole camera of a rectified rig. Cameras of a rig differ only by their
/// lateral offset; offsets grow from right to left.
struct CameraModel {
  double focal_length = 721.0;  // pixels
  int image_width = 1242;
  int image_height = 375;
  double cx = 621.0;
  double cy = 187.5;
  double rig_offset = 0.0;  // meters, positive to the left

  void validate() const;
  bool operator==(const CameraModel&) const = default;
};

/// Depth from disparity, z = f * b / d. All arguments must be > 0.
double disparity_to_depth(double disparity, double focal_length, double baseline);

/// Inverse of disparity_to_depth.
double depth_to_disparity(double depth, double focal_length, double baseline);

/// Throws InvariantError unless offsets are strictly increasing.
void validate_rig_order(const std::vector<CameraModel>& cameras);

}  // namespace sdv
