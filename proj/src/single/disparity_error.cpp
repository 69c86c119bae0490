#include "sdv/single/disparity_error.hpp"

#include <cmath>
#include <limits>

#include "sdv/core/errors.hpp"

namespace sdv {

bool pixel_inconsistent(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
    throw DomainError("disparities must be finite and > 0");
  const double diff = std::abs(a - b);
  return diff > 3.0 && diff / std::min(a, b) > 0.05;
}

double disparity_error(const DisparityMap& a, const DisparityMap& b) {
  if (a.width() != b.width() || a.height() != b.height())
    throw DomainError("disparity maps differ in size");
  std::size_t joint = 0, bad = 0;
  for (std::size_t p = 0; p < a.size(); ++p) {
    if (!a.valid(p) || !b.valid(p)) continue;
    ++joint;
    const double x = a.value(p), y = b.value(p);
    const double diff = std::abs(x - y);
    bad += diff > 3.0 && diff > 0.05 * std::min(x, y);
  }
  if (joint == 0) throw InsufficientOverlapError("no jointly valid pixels");
  return static_cast<double>(bad) / static_cast<double>(joint);
}

double reference_baseline(const SensorRig& rig, std::size_t reference) {
  if (!rig.is_camera(reference) || reference == rig.first_camera())
    throw DomainError("reference " + std::to_string(reference) + " has no camera to its right");
  return rig.baseline(reference - 1, reference);
}

DisparityMap project_lidar(const std::vector<Vec3>& cloud, const SensorRig& rig,
                           std::size_t reference, double baseline) {
  if (!rig.lidar) throw DomainError("rig has no LiDAR");
  const CameraModel& cam = rig.camera(reference);
  const Vec3 center = rig.camera_position(reference);
  const int w = cam.image_width, h = cam.image_height;
  std::vector<double> nearest(static_cast<std::size_t>(w) * h,
                              std::numeric_limits<double>::infinity());
  for (const Vec3& p : cloud) {
    const Vec3 q = rig.lidar->pose.apply(p) - center;
    const double z = q.x();
    if (z <= 0.1) continue;
    const double u = std::floor(cam.cx - cam.focal_length * q.y() / z);
    const double v = std::floor(cam.cy - cam.focal_length * q.z() / z);
    if (u < 0 || v < 0 || u >= w || v >= h) continue;
    double& best = nearest[static_cast<std::size_t>(v) * w + static_cast<std::size_t>(u)];
    best = std::min(best, z);
  }
  DisparityMap map(w, h);
  const double fb = cam.focal_length * baseline;
  for (std::size_t i = 0; i < nearest.size(); ++i) {
    if (std::isfinite(nearest[i])) map.set(i, fb / nearest[i]);
  }
  return map;
}

DisparityMap comparison_map(const SensorFrame& frame, std::size_t source, std::size_t reference) {
  const SensorRig& rig = frame.rig;
  const double b_ref = reference_baseline(rig, reference);
  if (rig.is_lidar(source)) return project_lidar(frame.lidar_cloud, rig, reference, b_ref);
  DisparityMap map = frame.map(source, reference).estimated;
  const double b = rig.baseline(source, reference);
  if (b != b_ref) map.scale(b_ref / b);
  return map;
}

}  // namespace sdv
