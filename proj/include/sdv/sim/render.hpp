#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "sdv/sim/frame.hpp"
#include "sdv/sim/scene.hpp"

namespace sdv {

struct RenderOptions {
  double max_range = 80.0;  // camera rays beyond this are invalid
  /// Additional reference cameras whose maps DM_{i,k} are rendered too.
  std::vector<std::size_t> extra_references;
  std::uint64_t frame_id = 0;
};

inline constexpr double kNoHit = std::numeric_limits<double>::infinity();

/// Ray parameter of the first hit against the ground plane z = 0 and the
/// boxes, or kNoHit if nothing is hit within max_t. `hit` receives -1 for
/// ground, the box index otherwise.
double cast_ray(const Vec3& origin, const Vec3& direction, std::span<const OrientedBox> boxes,
                double max_t, int* hit = nullptr);

/// Entry parameter of a ray into a box, or kNoHit.
double intersect_box(const Vec3& origin, const Vec3& direction, const OrientedBox& box) noexcept;

/// Depth (camera z) per pixel of the given reference camera, NaN where the
/// ray hits nothing within max_range.
std::vector<double> render_depth(std::span<const OrientedBox> boxes, const SensorRig& rig,
                                 std::size_t reference, double max_range);

/// First-hit points of the LiDAR ray grid in the LiDAR frame.
std::vector<Vec3> scan_lidar(std::span<const OrientedBox> boxes, const LidarConfig& lidar,
                             std::uint64_t noise_seed);

SensorFrame render_frame(const Scene& scene, const SensorRig& rig, double noise_sigma,
                         const RenderOptions& options = {});

}  // namespace sdv
