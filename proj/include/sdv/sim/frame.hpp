#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sdv/core/disparity_map.hpp"
#include "sdv/core/geometry.hpp"
#include "sdv/core/sensor_state.hpp"
#include "sdv/sim/rig.hpp"

namespace sdv {

/// Disparity map DM_{source,reference} in the reference camera's image.
struct StereoMap {
  std::size_t source = 0;
  std::size_t reference = 0;
  DisparityMap estimated;
  DisparityMap ground_truth;
  bool operator==(const StereoMap&) const = default;
};

struct SensorFrame {
  std::uint64_t frame_id = 0;
  SensorRig rig;
  std::vector<Vec3> lidar_cloud;  // LiDAR sensor frame
  std::vector<StereoMap> stereo_maps;
  SensorStateVector attack_truth;

  bool has_map(std::size_t source, std::size_t reference) const noexcept;
  /// Throws DomainError if the frame holds no such map.
  const StereoMap& map(std::size_t source, std::size_t reference) const;
  StereoMap& map(std::size_t source, std::size_t reference);
  void validate() const;
  bool operator==(const SensorFrame&) const = default;
};

}  // namespace sdv
