#include "sdv/sim/render.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sdv/core/errors.hpp"
#include "sdv/core/rng.hpp"

namespace sdv {

namespace {

constexpr double kMinDisparity = 0.01;

struct BoxFrame {
  double c = 1.0, s = 0.0;  // cos/sin of -yaw
  Vec3 half;
  Vec3 local_origin;

  BoxFrame(const OrientedBox& box, const Vec3& origin)
      : c(std::cos(box.yaw)), s(-std::sin(box.yaw)),
        half(0.5 * box.length, 0.5 * box.width, 0.5 * box.height) {
    local_origin = to_local(origin - box.center);
  }
  Vec3 to_local(const Vec3& v) const noexcept {
    return {c * v.x() - s * v.y(), s * v.x() + c * v.y(), v.z()};
  }
  double enter(const Vec3& direction) const noexcept {
    const Vec3 d = to_local(direction);
    double t0 = -kNoHit, t1 = kNoHit;
    for (int a = 0; a < 3; ++a) {
      const double inv = 1.0 / d[a];
      double ta = (-half[a] - local_origin[a]) * inv;
      double tb = (half[a] - local_origin[a]) * inv;
      if (ta > tb) std::swap(ta, tb);
      t0 = std::max(t0, ta);
      t1 = std::min(t1, tb);
    }
    if (t1 < t0 || t1 < 0.0 || t0 < 0.0) return kNoHit;
    return t0;
  }
};

}  // namespace

double intersect_box(const Vec3& origin, const Vec3& direction, const OrientedBox& box) noexcept {
  return BoxFrame(box, origin).enter(direction);
}

double cast_ray(const Vec3& origin, const Vec3& direction, std::span<const OrientedBox> boxes,
                double max_t, int* hit) {
  double best = kNoHit;
  int who = -2;
  if (direction.z() < 0.0 && origin.z() > 0.0) {
    best = -origin.z() / direction.z();
    who = -1;
  }
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    const double t = intersect_box(origin, direction, boxes[i]);
    if (t < best) {
      best = t;
      who = static_cast<int>(i);
    }
  }
  if (best > max_t) {
    best = kNoHit;
    who = -2;
  }
  if (hit) *hit = who;
  return best;
}

std::vector<double> render_depth(std::span<const OrientedBox> boxes, const SensorRig& rig,
                                 std::size_t reference, double max_range) {
  const CameraModel& cam = rig.camera(reference);
  const Vec3 origin = rig.camera_position(reference);
  const int w = cam.image_width;
  const int h = cam.image_height;
  const double f = cam.focal_length;
  const auto idx = [w](int u, int v) { return static_cast<std::size_t>(v) * w + u; };
  const auto ray = [&](int u, int v) {
    return Vec3(1.0, -(u + 0.5 - cam.cx) / f, -(v + 0.5 - cam.cy) / f);
  };

  // Forward component of every ray is 1, so the ray parameter is camera depth.
  std::vector<double> depth(static_cast<std::size_t>(w) * h, kNoHit);
  for (int v = 0; v < h; ++v) {
    const double down = (v + 0.5 - cam.cy) / f;
    if (down <= 0.0) continue;
    const double z = origin.z() / down;
    for (int u = 0; u < w; ++u) depth[idx(u, v)] = z;
  }

  for (const OrientedBox& box : boxes) {
    int u0 = 0, u1 = w - 1, v0 = 0, v1 = h - 1;
    bool behind = true, straddles = false;
    double umin = kNoHit, umax = -kNoHit, vmin = kNoHit, vmax = -kNoHit;
    const auto fp = box.footprint();
    for (const Vec2& corner : fp) {
      for (double dz : {-0.5 * box.height, 0.5 * box.height}) {
        const double zc = corner.x() - origin.x();
        const double xc = -(corner.y() - origin.y());
        const double yc = -(box.center.z() + dz - origin.z());
        if (zc > 1e-6) {
          behind = false;
          umin = std::min(umin, cam.cx + f * xc / zc);
          umax = std::max(umax, cam.cx + f * xc / zc);
          vmin = std::min(vmin, cam.cy + f * yc / zc);
          vmax = std::max(vmax, cam.cy + f * yc / zc);
        } else {
          straddles = true;
        }
      }
    }
    if (behind) continue;
    if (!straddles) {
      u0 = std::max(0, static_cast<int>(std::floor(umin)) - 1);
      u1 = std::min(w - 1, static_cast<int>(std::ceil(umax)) + 1);
      v0 = std::max(0, static_cast<int>(std::floor(vmin)) - 1);
      v1 = std::min(h - 1, static_cast<int>(std::ceil(vmax)) + 1);
    }
    const BoxFrame frame(box, origin);
    for (int v = v0; v <= v1; ++v) {
      for (int u = u0; u <= u1; ++u) {
        const double t = frame.enter(ray(u, v));
        double& d = depth[idx(u, v)];
        if (t < d) d = t;
      }
    }
  }

  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      double& d = depth[idx(u, v)];
      if (d == kNoHit || d * ray(u, v).norm() > max_range) d = std::nan("");
    }
  }
  return depth;
}

std::vector<Vec3> scan_lidar(std::span<const OrientedBox> boxes, const LidarConfig& lidar,
                             std::uint64_t noise_seed) {
  lidar.validate();
  const Vec3 origin = lidar.pose.translation();
  const Mat3& rot = lidar.pose.rotation();
  const CounterRng noise(noise_seed, 0);
  std::vector<Vec3> cloud;
  cloud.reserve(static_cast<std::size_t>(lidar.azimuth_count) * lidar.elevation_count / 2);
  for (int a = 0; a < lidar.azimuth_count; ++a) {
    for (int e = 0; e < lidar.elevation_count; ++e) {
      const Vec3 dir = lidar.ray_direction(a, e);
      const double t = cast_ray(origin, rot * dir, boxes, lidar.max_range);
      if (t == kNoHit) continue;
      double range = t;
      if (lidar.range_noise > 0.0) {
        const auto counter = static_cast<std::uint64_t>(a) * lidar.elevation_count + e;
        range += lidar.range_noise * noise.normal(counter);
        if (range <= 0.0) continue;
      }
      cloud.push_back(dir * range);
    }
  }
  return cloud;
}

SensorFrame render_frame(const Scene& scene, const SensorRig& rig, double noise_sigma,
                         const RenderOptions& options) {
  rig.validate();
  if (noise_sigma < 0.0 || !std::isfinite(noise_sigma))
    throw DomainError("noise sigma must be finite and >= 0");

  std::vector<std::size_t> references{rig.reference()};
  for (std::size_t k : options.extra_references) {
    if (!rig.is_camera(k) || k == rig.first_camera())
      throw DomainError("extra reference " + std::to_string(k) + " has no camera to its right");
    if (std::find(references.begin(), references.end(), k) == references.end())
      references.push_back(k);
  }

  SensorFrame frame;
  frame.frame_id = options.frame_id;
  frame.rig = rig;
  frame.attack_truth = SensorStateVector(rig.sensor_count());

  const std::vector<OrientedBox> boxes = scene.boxes();
  if (rig.lidar)
    frame.lidar_cloud = scan_lidar(boxes, *rig.lidar, derive_seed(scene.rng_seed, "lidar-noise"));

  const std::uint64_t noise_seed = derive_seed(scene.rng_seed, "stereo-noise");
  for (std::size_t k : references) {
    const CameraModel& cam = rig.camera(k);
    const std::vector<double> depth = render_depth(boxes, rig, k, options.max_range);
    for (std::size_t i = rig.first_camera(); i < k; ++i) {
      StereoMap m{i, k, DisparityMap(cam.image_width, cam.image_height),
                  DisparityMap(cam.image_width, cam.image_height)};
      const double fb = cam.focal_length * rig.baseline(i, k);
      const CounterRng rng(noise_seed, i * 1024 + k);
      for (std::size_t p = 0; p < depth.size(); ++p) {
        if (std::isnan(depth[p])) continue;
        const double gt = fb / depth[p];
        m.ground_truth.set(p, gt);
        m.estimated.set(p, noise_sigma > 0.0
                               ? std::max(gt + noise_sigma * rng.normal(p), kMinDisparity)
                               : gt);
      }
      frame.stereo_maps.push_back(std::move(m));
    }
  }
  return frame;
}

}  // namespace sdv
