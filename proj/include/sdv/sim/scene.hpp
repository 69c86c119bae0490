#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "sdv/core/geometry.hpp"

namespace sdv {

enum class RoadType { street, highway };

std::string_view to_string(RoadType type) noexcept;
/// Parses "street" / "highway"; throws ConfigError otherwise.
RoadType parse_road_type(std::string_view label);

/// Allowed ego and mover speeds in m/s.
struct SpeedRange {
  double min = 0.0;
  double max = 0.0;
  bool contains(double v, double tolerance = 1e-9) const noexcept {
    return v >= min - tolerance && v <= max + tolerance;
  }
  bool operator==(const SpeedRange&) const = default;
};

SpeedRange speed_range(RoadType type) noexcept;

/// Straight road along world +x. Lane 0 is the rightmost lane; the ego
/// lane is centered on y = 0.
struct LaneLayout {
  int lane_count = 3;
  double lane_width = 3.5;
  int ego_lane = 1;
  double x_min = -50.0;
  double x_max = 150.0;

  void validate() const;
  double lane_center(int lane) const noexcept;
  double road_right() const noexcept;  // smallest y on the road
  double road_left() const noexcept;
  OrientedBox lane_polygon(int lane) const;
  /// Lane containing the point, or -1 when off the road.
  int lane_of(const Vec2& p) const noexcept;
  bool on_road(const Vec2& p) const noexcept { return lane_of(p) >= 0; }
  bool operator==(const LaneLayout&) const = default;
};

struct Obstacle {
  OrientedBox box;
  bool is_moving = false;
  Vec2 velocity = Vec2::Zero();
  bool operator==(const Obstacle&) const = default;
};

struct Scene {
  LaneLayout lanes;
  std::vector<Obstacle> obstacles;
  RoadType road_type = RoadType::street;
  std::uint64_t rng_seed = 0;

  /// Throws InvariantError on interpenetrating obstacles or bad velocities.
  void validate() const;
  std::vector<OrientedBox> boxes() const;
  bool operator==(const Scene&) const = default;
};

struct SceneConfig {
  LaneLayout lanes;
  RoadType road_type = RoadType::street;
  int obstacle_count = 4;
  double x_min = 12.0;  // obstacle center range along the road
  double x_max = 50.0;
  double moving_fraction = 0.0;
  double min_gap = 0.5;  // clearance between obstacle footprints
  int max_attempts = 500;
  std::vector<OrientedBox> keep_out;  // footprints obstacles must avoid

  void validate() const;
};

/// Places obstacles lane-aligned at random. Throws GenerationError if the
/// layout cannot be satisfied within max_attempts per obstacle.
Scene generate_scene(const SceneConfig& config, std::uint64_t seed);

}  // namespace sdv
