#include "sdv/sim/attack.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdv/core/errors.hpp"
#include "sdv/core/rng.hpp"

namespace sdv {

void AttackSpec::validate(int image_width, int image_height) const {
  if (!(lidar.width > 0.0) || !(lidar.height > 0.0))
    throw ConfigError("bogus signal width and height must be > 0");
  if (!(lidar.distance_min > 0.0) || lidar.distance_max < lidar.distance_min)
    throw ConfigError("bogus signal distance range is invalid");
  if (lidar.azimuth_spread < 0.0) throw ConfigError("bogus signal azimuth spread must be >= 0");
  if (lidar.density < 0.0 || !std::isfinite(lidar.density))
    throw ConfigError("spoof point density must be finite and >= 0");
  if (!(facula.radius_min > 0.0) || facula.radius_max < facula.radius_min)
    throw ConfigError("facula radius range is invalid");
  if (facula.radius_max > 0.5 * std::max(image_width, image_height))
    throw ConfigError("facula radius exceeds the image");
  if (facula.center && (facula.center->x() < 0.0 || facula.center->x() > image_width ||
                        facula.center->y() < 0.0 || facula.center->y() > image_height))
    throw ConfigError("facula center lies outside the image");
  if (!(facula.depth_floor > 0.0)) throw ConfigError("facula depth floor must be > 0");
}

bool FaculaDisc::contains(int x, int y) const noexcept {
  const double dx = x + 0.5 - center.x();
  const double dy = y + 0.5 - center.y();
  return dx * dx + dy * dy <= radius * radius;
}

FaculaDisc facula_disc(const FaculaSpec& spec, int image_width, int image_height,
                       std::uint64_t seed) {
  RandomStream rng(seed, "facula");
  FaculaDisc disc;
  disc.radius = rng.uniform(spec.radius_min, spec.radius_max);
  const double cx = rng.uniform(0.0, image_width);
  const double cy = rng.uniform(0.0, image_height);
  disc.center = spec.center ? *spec.center : Vec2(cx, cy);
  return disc;
}

std::vector<Vec3> spoofed_points(const LidarSpoofSpec& spec, const LidarConfig& lidar,
                                 std::uint64_t seed) {
  RandomStream rng(seed, "bogus-lidar");
  const double distance = rng.uniform(spec.distance_min, spec.distance_max);
  const double offset = rng.uniform(-spec.azimuth_spread, spec.azimuth_spread);
  if (spec.density <= 0.0) return {};

  const Vec3 origin = lidar.pose.translation();
  const Vec3 forward = lidar.pose.rotation().col(0);
  const double heading = std::atan2(forward.y(), forward.x()) + offset;
  const Vec2 normal(std::cos(heading), std::sin(heading));
  const Vec2 lateral(-normal.y(), normal.x());
  const Vec2 center = origin.head<2>() + distance * normal;

  // Columns are symmetric about the center so narrower signals nest inside
  // wider ones for the same seed.
  const double spacing = 1.0 / spec.density;
  const int half_cols = static_cast<int>(std::floor(0.5 * spec.width * spec.density + 1e-9));
  const int rows = static_cast<int>(std::floor(spec.height * spec.density + 1e-9));
  const RigidTransform to_sensor = lidar.pose.inverse();
  std::vector<Vec3> points;
  points.reserve(static_cast<std::size_t>(2 * half_cols + 1) * (rows + 1));
  for (int j = -half_cols; j <= half_cols; ++j) {
    const Vec2 xy = center + lateral * (j * spacing);
    for (int i = 0; i <= rows; ++i) {
      points.push_back(to_sensor.apply(Vec3(xy.x(), xy.y(), i * spacing)));
    }
  }
  return points;
}

SensorFrame inject_lidar_attack(const SensorFrame& frame, const AttackSpec& spec,
                                std::uint64_t seed) {
  if (!frame.rig.lidar) throw DomainError("frame has no LiDAR to attack");
  const CameraModel& ref = frame.rig.camera(frame.rig.reference());
  spec.validate(ref.image_width, ref.image_height);
  SensorFrame out = frame;
  const std::vector<Vec3> bogus = spoofed_points(spec.lidar, *frame.rig.lidar, seed);
  out.lidar_cloud.insert(out.lidar_cloud.end(), bogus.begin(), bogus.end());
  out.attack_truth.set(0);
  return out;
}

SensorFrame inject_camera_attack(const SensorFrame& frame, std::size_t sensor,
                                 const AttackSpec& spec, std::uint64_t seed) {
  if (!frame.rig.is_camera(sensor))
    throw DomainError("sensor " + std::to_string(sensor) + " is not a camera of this rig");
  const CameraModel& ref = frame.rig.camera(frame.rig.reference());
  spec.validate(ref.image_width, ref.image_height);

  SensorFrame out = frame;
  const int w = ref.image_width;
  const int h = ref.image_height;
  const FaculaDisc disc = facula_disc(spec.facula, w, h, seed);
  const int x0 = std::max(0, static_cast<int>(std::floor(disc.center.x() - disc.radius)));
  const int x1 = std::min(w - 1, static_cast<int>(std::ceil(disc.center.x() + disc.radius)));
  const int y0 = std::max(0, static_cast<int>(std::floor(disc.center.y() - disc.radius)));
  const int y1 = std::min(h - 1, static_cast<int>(std::ceil(disc.center.y() + disc.radius)));
  const std::uint64_t value_seed = derive_seed(seed, "facula-values");

  for (StereoMap& m : out.stereo_maps) {
    if (m.source != sensor && m.reference != sensor) continue;
    const double d_max = frame.rig.camera(m.reference).focal_length *
                         frame.rig.baseline(m.source, m.reference) / spec.facula.depth_floor;
    const CounterRng rng(value_seed, m.source * 1024 + m.reference);
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        const std::size_t p = m.estimated.index(x, y);
        if (!m.estimated.valid(p) || !disc.contains(x, y)) continue;
        m.estimated.set(p, rng.uniform_open_closed(p) * d_max);
      }
    }
  }
  out.attack_truth.set(sensor);
  return out;
}

SensorFrame apply_attacks(const SensorFrame& frame, const SensorStateVector& state,
                          const AttackSpec& spec, std::uint64_t seed) {
  if (state.size() != frame.rig.sensor_count())
    throw DomainError("state vector length differs from sensor count");
  SensorFrame out = frame;
  for (std::size_t s = 0; s < state.size(); ++s) {
    if (!state[s]) continue;
    const std::uint64_t sub = derive_seed(seed, static_cast<std::uint64_t>(s));
    out = frame.rig.is_lidar(s) ? inject_lidar_attack(out, spec, sub)
                                : inject_camera_attack(out, s, spec, sub);
  }
  return out;
}

}  // namespace sdv
