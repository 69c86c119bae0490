#include "sdv/core/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sdv/core/errors.hpp"

namespace sdv {

double normalize_angle(double radians) noexcept {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double a = std::fmod(radians, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  if (a > std::numbers::pi) a -= two_pi;
  return a;
}

RigidTransform::RigidTransform() noexcept
    : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}

RigidTransform::RigidTransform(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  constexpr double tol = 1e-9;
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw InvariantError("rigid transform has non-finite entries");
  }
  if (((rotation.transpose() * rotation) - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) {
    throw InvariantError("rotation is not orthonormal");
  }
  if (std::abs(rotation.determinant() - 1.0) > tol) {
    throw InvariantError("rotation determinant is not +1");
  }
}

RigidTransform RigidTransform::from_yaw(double yaw, const Vec3& translation) {
  return from_rpy(0.0, 0.0, yaw, translation);
}

RigidTransform RigidTransform::from_rpy(double roll, double pitch, double yaw,
                                        const Vec3& translation) {
  const Mat3 r = (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
                  Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
                  Eigen::AngleAxisd(roll, Vec3::UnitX()))
                     .toRotationMatrix();
  return RigidTransform(r, translation);
}

RigidTransform RigidTransform::operator*(const RigidTransform& other) const noexcept {
  return RigidTransform(rotation_ * other.rotation_, rotation_ * other.translation_ + translation_,
                        Unchecked{});
}

RigidTransform RigidTransform::inverse() const noexcept {
  const Mat3 rt = rotation_.transpose();
  return RigidTransform(rt, -(rt * translation_), Unchecked{});
}

Vec3 apply_transform(const RigidTransform& t, const Vec3& p) noexcept { return t.apply(p); }

void OrientedBox::validate() const {
  if (!center.allFinite() || !std::isfinite(yaw)) {
    throw InvariantError("box has non-finite pose");
  }
  if (!(length > 0.0 && width > 0.0 && height > 0.0) || !std::isfinite(length) ||
      !std::isfinite(width) || !std::isfinite(height)) {
    throw InvariantError("box dimensions must be positive");
  }
}

std::array<Vec2, 4> OrientedBox::footprint() const noexcept {
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  const Vec2 ax(c * length / 2.0, s * length / 2.0);
  const Vec2 ay(-s * width / 2.0, c * width / 2.0);
  const Vec2 o = center2d();
  return {o - ax - ay, o + ax - ay, o + ax + ay, o - ax + ay};
}

bool OrientedBox::contains2d(const Vec2& p, double tolerance) const noexcept {
  const Vec2 d = p - center2d();
  const double c = std::cos(yaw);
  const double s = std::sin(yaw);
  const double u = c * d.x() + s * d.y();
  const double v = -s * d.x() + c * d.y();
  return std::abs(u) <= length / 2.0 + tolerance && std::abs(v) <= width / 2.0 + tolerance;
}

OrientedBox make_box(const Vec3& center, double length, double width, double height,
                     double yaw) {
  OrientedBox b{center, length, width, height, normalize_angle(yaw)};
  b.validate();
  return b;
}

double polygon_area(std::span<const Vec2> polygon) noexcept {
  if (polygon.size() < 3) return 0.0;
  double twice = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[(i + 1) % polygon.size()];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return twice / 2.0;
}

namespace {

double cross(const Vec2& o, const Vec2& a, const Vec2& b) noexcept {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

Vec2 line_intersection(const Vec2& p, const Vec2& q, const Vec2& a, const Vec2& b) noexcept {
  const double ca = cross(a, b, p);
  const double cb = cross(a, b, q);
  const double t = ca / (ca - cb);
  return p + t * (q - p);
}

}  // namespace

std::vector<Vec2> clip_convex(std::span<const Vec2> subject, std::span<const Vec2> clip) {
  std::vector<Vec2> output(subject.begin(), subject.end());
  for (std::size_t e = 0; e < clip.size() && !output.empty(); ++e) {
    const Vec2& a = clip[e];
    const Vec2& b = clip[(e + 1) % clip.size()];
    std::vector<Vec2> input;
    input.swap(output);
    for (std::size_t i = 0; i < input.size(); ++i) {
      const Vec2& cur = input[i];
      const Vec2& prev = input[(i + input.size() - 1) % input.size()];
      const bool cur_in = cross(a, b, cur) >= 0.0;
      const bool prev_in = cross(a, b, prev) >= 0.0;
      if (cur_in) {
        if (!prev_in) output.push_back(line_intersection(prev, cur, a, b));
        output.push_back(cur);
      } else if (prev_in) {
        output.push_back(line_intersection(prev, cur, a, b));
      }
    }
  }
  return output;
}

double footprint_intersection(const OrientedBox& a, const OrientedBox& b) {
  // Cheap rejection on circumscribed circles.
  const double ra = 0.5 * std::hypot(a.length, a.width);
  const double rb = 0.5 * std::hypot(b.length, b.width);
  if ((a.center2d() - b.center2d()).norm() > ra + rb) return 0.0;
  const auto fa = a.footprint();
  const auto fb = b.footprint();
  const auto poly = clip_convex(fa, fb);
  return std::max(0.0, polygon_area(poly));
}

double rotated_iou(const OrientedBox& a, const OrientedBox& b) {
  const double inter = footprint_intersection(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.footprint_area() + b.footprint_area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

}  // namespace sdv
