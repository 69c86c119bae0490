#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "sdv/core/sensor_state.hpp"
#include "sdv/sim/frame.hpp"

namespace sdv {

/// Bogus LiDAR signal: a vertical rectangle facing the sensor.
struct LidarSpoofSpec {
  double width = 2.5;   // meters
  double height = 1.5;  // meters, from the ground up
  double distance_min = 6.0;
  double distance_max = 10.0;
  double azimuth_spread = 10.0 * 3.141592653589793 / 180.0;  // +/- radians
  double density = 20.0;  // points per meter along each axis; 0 disables
  bool operator==(const LidarSpoofSpec&) const = default;
};

/// Camera blinding: a disc of destroyed disparities.
struct FaculaSpec {
  double radius_min = 187.0;  // pixels
  double radius_max = 375.0;
  std::optional<Vec2> center;  // fixed center in pixels, random if unset
  double depth_floor = 2.0;    // z_min of the corruption range, meters
  bool operator==(const FaculaSpec&) const = default;
};

struct AttackSpec {
  LidarSpoofSpec lidar;
  FaculaSpec facula;

  /// Throws ConfigError on non-positive sizes or a radius range that does
  /// not fit the image.
  void validate(int image_width, int image_height) const;
  bool operator==(const AttackSpec&) const = default;
};

/// Disc placed by inject_camera_attack for a given seed.
struct FaculaDisc {
  Vec2 center;
  double radius = 0.0;
  bool contains(int x, int y) const noexcept;
};

FaculaDisc facula_disc(const FaculaSpec& spec, int image_width, int image_height,
                       std::uint64_t seed);

/// Spoofed points in the LiDAR frame for a given seed.
std::vector<Vec3> spoofed_points(const LidarSpoofSpec& spec, const LidarConfig& lidar,
                                 std::uint64_t seed);

SensorFrame inject_lidar_attack(const SensorFrame& frame, const AttackSpec& spec,
                                std::uint64_t seed);

/// Throws DomainError if `sensor` is not a camera of the frame's rig.
SensorFrame inject_camera_attack(const SensorFrame& frame, std::size_t sensor,
                                 const AttackSpec& spec, std::uint64_t seed);

/// Applies the LiDAR and camera attacks selected by `state`, each with its
/// own seed derived from `seed`.
SensorFrame apply_attacks(const SensorFrame& frame, const SensorStateVector& state,
                          const AttackSpec& spec, std::uint64_t seed);

}  // namespace sdv
