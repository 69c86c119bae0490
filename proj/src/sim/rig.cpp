#include "sdv/sim/rig.hpp"

#include <cmath>
#include <string>

#include "sdv/core/errors.hpp"

namespace sdv {

void LidarConfig::validate() const {
  if (azimuth_count < 1 || elevation_count < 1) throw InvariantError("empty LiDAR ray grid");
  if (!(azimuth_step > 0.0) || !(elevation_step > 0.0))
    throw InvariantError("LiDAR angular steps must be > 0");
  if (!(max_range > 0.0)) throw InvariantError("LiDAR max range must be > 0");
  if (range_noise < 0.0) throw InvariantError("LiDAR range noise must be >= 0");
}

Vec3 LidarConfig::ray_direction(int azimuth_index, int elevation_index) const noexcept {
  const double az = azimuth_min + azimuth_step * azimuth_index;
  const double el = elevation_min + elevation_step * elevation_index;
  return {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
}

void SensorRig::validate() const {
  if (cameras.empty()) throw InvariantError("rig has no cameras");
  for (const auto& c : cameras) c.validate();
  validate_rig_order(cameras);
  for (const auto& c : cameras) {
    if (c.image_width != cameras.front().image_width ||
        c.image_height != cameras.front().image_height)
      throw InvariantError("rig cameras must share image dimensions");
  }
  if (lidar) lidar->validate();
  if (!(camera_height > 0.0)) throw InvariantError("camera height must be > 0");
}

const CameraModel& SensorRig::camera(std::size_t sensor) const {
  if (!is_camera(sensor)) throw DomainError("sensor " + std::to_string(sensor) + " is not a camera");
  return cameras[sensor - first_camera()];
}

Vec3 SensorRig::camera_position(std::size_t sensor) const {
  const CameraModel& cam = camera(sensor);
  const double center = 0.5 * (cameras.front().rig_offset + cameras.back().rig_offset);
  return {camera_x, cam.rig_offset - center, camera_height};
}

double SensorRig::baseline(std::size_t a, std::size_t b) const {
  return std::abs(camera(a).rig_offset - camera(b).rig_offset);
}

namespace {

std::vector<CameraModel> cameras_at(const std::vector<double>& offsets) {
  std::vector<CameraModel> cams;
  for (double o : offsets) {
    CameraModel c;
    c.rig_offset = o;
    cams.push_back(c);
  }
  return cams;
}

}  // namespace

SensorRig make_lidar_stereo_rig() {
  SensorRig rig;
  rig.lidar = LidarConfig{};
  rig.cameras = cameras_at({0.0, 0.54});
  return rig;
}

SensorRig make_trinocular_rig() {
  SensorRig rig;
  rig.cameras = cameras_at({0.0, 0.27, 0.81});
  return rig;
}

SensorRig make_identification_rig(std::vector<double> offsets) {
  SensorRig rig;
  rig.lidar = LidarConfig{};
  rig.cameras = cameras_at(offsets);
  rig.validate();
  return rig;
}

}  // namespace sdv
