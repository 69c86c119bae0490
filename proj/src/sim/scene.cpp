#include "sdv/sim/scene.hpp"

#include <cmath>
#include <string>

#include "sdv/core/errors.hpp"
#include "sdv/core/rng.hpp"

namespace sdv {

std::string_view to_string(RoadType type) noexcept {
  return type == RoadType::street ? "street" : "highway";
}

RoadType parse_road_type(std::string_view label) {
  if (label == "street") return RoadType::street;
  if (label == "highway") return RoadType::highway;
  throw ConfigError("unknown road type '" + std::string(label) + "'");
}

SpeedRange speed_range(RoadType type) noexcept {
  constexpr double kmh = 1.0 / 3.6;
  if (type == RoadType::street) return {22.0 * kmh, 29.0 * kmh};
  return {40.0 * kmh, 47.0 * kmh};
}

void LaneLayout::validate() const {
  if (lane_count < 1) throw InvariantError("lane count must be >= 1");
  if (!(lane_width > 0.0)) throw InvariantError("lane width must be > 0");
  if (ego_lane < 0 || ego_lane >= lane_count) throw InvariantError("ego lane out of range");
  if (!(x_max > x_min)) throw InvariantError("empty road extent");
}

double LaneLayout::lane_center(int lane) const noexcept {
  return (lane - ego_lane) * lane_width;
}

double LaneLayout::road_right() const noexcept { return lane_center(0) - 0.5 * lane_width; }

double LaneLayout::road_left() const noexcept {
  return lane_center(lane_count - 1) + 0.5 * lane_width;
}

OrientedBox LaneLayout::lane_polygon(int lane) const {
  return make_box({0.5 * (x_min + x_max), lane_center(lane), 0.0}, x_max - x_min, lane_width,
                  1e-3, 0.0);
}

int LaneLayout::lane_of(const Vec2& p) const noexcept {
  if (p.x() < x_min || p.x() > x_max) return -1;
  const double rel = (p.y() - road_right()) / lane_width;
  if (rel < 0.0 || rel >= lane_count) return -1;
  return static_cast<int>(rel);
}

void Scene::validate() const {
  lanes.validate();
  const SpeedRange range = speed_range(road_type);
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const Obstacle& o = obstacles[i];
    o.box.validate();
    if (o.is_moving) {
      if (!range.contains(o.velocity.norm(), 1e-6))
        throw InvariantError("moving obstacle " + std::to_string(i) + " speed outside range");
    } else if (o.velocity != Vec2::Zero()) {
      throw InvariantError("static obstacle " + std::to_string(i) + " has velocity");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (footprint_intersection(o.box, obstacles[j].box) > 1e-9)
        throw InvariantError("obstacles " + std::to_string(j) + " and " + std::to_string(i) +
                             " interpenetrate");
    }
  }
}

std::vector<OrientedBox> Scene::boxes() const {
  std::vector<OrientedBox> out;
  out.reserve(obstacles.size());
  for (const auto& o : obstacles) out.push_back(o.box);
  return out;
}

void SceneConfig::validate() const {
  lanes.validate();
  if (obstacle_count < 0) throw ConfigError("obstacle count must be >= 0");
  if (!(x_max > x_min)) throw ConfigError("obstacle x range is empty");
  if (moving_fraction < 0.0 || moving_fraction > 1.0)
    throw ConfigError("moving fraction must be in [0,1]");
  if (min_gap < 0.0) throw ConfigError("min gap must be >= 0");
  if (max_attempts < 1) throw ConfigError("max attempts must be >= 1");
}

namespace {

OrientedBox inflated(const OrientedBox& b, double margin) {
  OrientedBox out = b;
  out.length += 2.0 * margin;
  out.width += 2.0 * margin;
  return out;
}

}  // namespace

Scene generate_scene(const SceneConfig& config, std::uint64_t seed) {
  config.validate();
  Scene scene;
  scene.lanes = config.lanes;
  scene.road_type = config.road_type;
  scene.rng_seed = seed;

  RandomStream rng(seed, "scene");
  const SpeedRange range = speed_range(config.road_type);
  const double half_gap = 0.5 * config.min_gap;

  for (int k = 0; k < config.obstacle_count; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < config.max_attempts && !placed; ++attempt) {
      const int lane = static_cast<int>(rng.index(static_cast<std::uint64_t>(config.lanes.lane_count)));
      const double length = rng.uniform(3.8, 4.8);
      const double width = rng.uniform(1.6, 1.9);
      const double height = rng.uniform(1.4, 1.7);
      const double yaw = rng.uniform(-0.08, 0.08);
      const double x = rng.uniform(config.x_min, config.x_max);
      const double y = config.lanes.lane_center(lane) +
                       rng.uniform(-0.2, 0.2) * (config.lanes.lane_width - width);
      const bool moving = rng.uniform() < config.moving_fraction;
      const double speed = rng.uniform(range.min, range.max);

      Obstacle o;
      o.box = make_box({x, y, 0.5 * height}, length, width, height, yaw);
      if (config.lanes.lane_of(o.box.center2d()) != lane) continue;
      bool clear = true;
      const OrientedBox probe = inflated(o.box, half_gap);
      for (const auto& other : scene.obstacles) {
        if (footprint_intersection(probe, inflated(other.box, half_gap)) > 0.0) {
          clear = false;
          break;
        }
      }
      for (const auto& zone : config.keep_out) {
        if (!clear) break;
        if (footprint_intersection(probe, zone) > 0.0) clear = false;
      }
      if (!clear) continue;
      if (moving) {
        o.is_moving = true;
        o.velocity = speed * Vec2(std::cos(yaw), std::sin(yaw));
      }
      scene.obstacles.push_back(o);
      placed = true;
    }
    if (!placed)
      throw GenerationError("obstacle non-overlap: could not place obstacle " + std::to_string(k) +
                            " after " + std::to_string(config.max_attempts) + " attempts");
  }
  return scene;
}

}  // namespace sdv
