#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "sdv/core/camera.hpp"
#include "sdv/core/geometry.hpp"

namespace sdv {

/// Spinning LiDAR: a regular azimuth x elevation ray grid in the sensor frame
/// (x forward, y left, z up). `pose` maps sensor to vehicle/world frame.
struct LidarConfig {
  RigidTransform pose = RigidTransform(Mat3::Identity(), Vec3(-0.27, 0.0, 1.73));
  double azimuth_min = -3.141592653589793;
  double azimuth_step = 2.0 * 3.141592653589793 / 900.0;
  int azimuth_count = 900;
  double elevation_min = -24.8 * 3.141592653589793 / 180.0;
  double elevation_step = 26.8 * 3.141592653589793 / 180.0 / 63.0;
  int elevation_count = 64;
  double max_range = 80.0;
  double range_noise = 0.0;  // meters, Gaussian sigma

  void validate() const;
  Vec3 ray_direction(int azimuth_index, int elevation_index) const noexcept;
  bool operator==(const LidarConfig&) const = default;
};

/// Optional LiDAR (S_0) plus cameras ordered right to left. The last camera
/// is the reference. Sensor numbering: with a LiDAR, sensor 0 is the LiDAR
/// and sensor k >= 1 is cameras[k-1]; without one, sensor k is cameras[k].
struct SensorRig {
  std::optional<LidarConfig> lidar;
  std::vector<CameraModel> cameras;
  double camera_height = 1.65;
  double camera_x = 0.0;

  void validate() const;
  std::size_t sensor_count() const noexcept { return cameras.size() + (lidar ? 1 : 0); }
  std::size_t reference() const noexcept { return sensor_count() - 1; }
  bool is_lidar(std::size_t sensor) const noexcept { return lidar && sensor == 0; }
  bool is_camera(std::size_t sensor) const noexcept {
    return sensor < sensor_count() && !is_lidar(sensor);
  }
  std::size_t first_camera() const noexcept { return lidar ? 1 : 0; }
  /// Throws DomainError unless the sensor is a camera.
  const CameraModel& camera(std::size_t sensor) const;
  /// World position of a camera's optical center.
  Vec3 camera_position(std::size_t sensor) const;
  /// Distance between two cameras' optical centers.
  double baseline(std::size_t a, std::size_t b) const;
  bool operator==(const SensorRig&) const = default;
};

/// One LiDAR and a stereo pair with 0.54 m baseline.
SensorRig make_lidar_stereo_rig();
/// Three cameras at offsets 0, 0.27 and 0.81 m, no LiDAR.
SensorRig make_trinocular_rig();
/// One LiDAR plus cameras at the given offsets (default 0, 0.27, 0.81 m).
SensorRig make_identification_rig(std::vector<double> offsets = {0.0, 0.27, 0.81});

}  // namespace sdv
