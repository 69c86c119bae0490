#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace sdv {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Wraps an angle to (-pi, pi].
double normalize_angle(double radians) noexcept;

/// Rigid-body transform p -> R p + t. Construction validates that R is a
/// proper rotation (orthonormal, det +1) to 1e-9.
class RigidTransform {
 public:
  RigidTransform() noexcept;
  RigidTransform(const Mat3& rotation, const Vec3& translation);

  static RigidTransform identity() noexcept { return RigidTransform(); }
  static RigidTransform from_yaw(double yaw, const Vec3& translation);
  static RigidTransform from_rpy(double roll, double pitch, double yaw, const Vec3& translation);

  const Mat3& rotation() const noexcept { return rotation_; }
  const Vec3& translation() const noexcept { return translation_; }

  Vec3 apply(const Vec3& p) const noexcept { return rotation_ * p + translation_; }

  /// (this * other)(p) == this(other(p)).
  RigidTransform operator*(const RigidTransform& other) const noexcept;
  RigidTransform inverse() const noexcept;

  bool operator==(const RigidTransform&) const = default;

 private:
  struct Unchecked {};
  RigidTransform(const Mat3& r, const Vec3& t, Unchecked) noexcept
      : rotation_(r), translation_(t) {}

  Mat3 rotation_;
  Vec3 translation_;
};

Vec3 apply_transform(const RigidTransform& t, const Vec3& p) noexcept;

/// Box resting on or above the ground plane. `center` is the volumetric
/// center; yaw rotates the length axis away from world +x.
struct OrientedBox {
  Vec3 center = Vec3::Zero();
  double length = 1.0;
  double width = 1.0;
  double height = 1.0;
  double yaw = 0.0;

  /// Throws InvariantError unless all dims > 0 and finite.
  void validate() const;

  /// Footprint corners, counter-clockwise starting at the rear-right corner.
  std::array<Vec2, 4> footprint() const noexcept;

  Vec2 center2d() const noexcept { return center.head<2>(); }
  double footprint_area() const noexcept { return length * width; }

  /// True if the 2D point lies inside (or on) the footprint.
  bool contains2d(const Vec2& p, double tolerance = 0.0) const noexcept;

  bool operator==(const OrientedBox&) const = default;
};

/// Builds a box with yaw normalized to (-pi, pi].
OrientedBox make_box(const Vec3& center, double length, double width, double height, double yaw);

/// Area of a simple polygon (shoelace), positive for counter-clockwise order.
double polygon_area(std::span<const Vec2> polygon) noexcept;

/// Clips `subject` against the convex, counter-clockwise `clip` polygon
/// (Sutherland-Hodgman).
std::vector<Vec2> clip_convex(std::span<const Vec2> subject, std::span<const Vec2> clip);

/// Bird's-eye-view IoU of the two yaw-rotated footprints.
double rotated_iou(const OrientedBox& a, const OrientedBox& b);

/// Footprint intersection area.
double footprint_intersection(const OrientedBox& a, const OrientedBox& b);

}  // namespace sdv
