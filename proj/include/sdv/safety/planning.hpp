#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sdv/core/geometry.hpp"
#include "sdv/sim/scene.hpp"

namespace sdv {

struct VehicleState {
  Vec2 position = Vec2::Zero();  // footprint center, meters
  double speed = 0.0;            // m/s
  double heading = 0.0;          // radians
  double steering = 0.0;         // radians
  bool operator==(const VehicleState&) const = default;
};

enum class Intention { left, straight, right };

std::string_view to_string(Intention intention) noexcept;
/// Throws ConfigError on an unknown label.
Intention parse_intention(std::string_view label);

/// Constant-curvature arc with a constant speed change over one step.
struct MotionPrimitive {
  double curvature = 0.0;    // 1/m
  double speed_delta = 0.0;  // m/s over the step
  bool operator==(const MotionPrimitive&) const = default;
};

struct Dynamics {
  double wheelbase = 2.7;
  double step = 1.0;            // primitive duration, seconds
  double max_acceleration = 1.0;  // m/s^2
  double max_steering = 0.0;    // radians, from the primitive set
  double ego_length = 4.5;
  double ego_width = 1.8;
  bool operator==(const Dynamics&) const = default;
};

struct Constraints {
  SpeedRange speed;
  std::vector<MotionPrimitive> primitives;
  Dynamics dynamics;
};

/// Speed range, primitive lattice and dynamics for a road type.
Constraints select_constraints(RoadType road_type);
/// Throws ConfigError on an unknown label; there is no default.
Constraints select_constraints(std::string_view road_type);

struct PlanningScenario {
  VehicleState start;
  OrientedBox goal;
  Intention intention = Intention::straight;
  std::vector<Obstacle> obstacles;
  RoadType road_type = RoadType::street;
  SpeedRange speed;
  Dynamics dynamics;
  LaneLayout lanes;

  /// Throws InvariantError if the goal is not 15 m ahead in the intention
  /// lane or the start state violates the constraints.
  void validate() const;
  bool operator==(const PlanningScenario&) const = default;
};

/// Scenario with the ego at the origin of its lane and the goal 15 m ahead
/// in the intention lane (8 m long, one lane wide).
PlanningScenario make_scenario(RoadType road_type, Intention intention, double start_speed,
                               std::vector<Obstacle> obstacles, LaneLayout lanes = {});

/// Ordered states sampled every `dt` seconds; states[0] is the start.
struct Trajectory {
  double dt = 1.0;
  std::vector<VehicleState> states;

  double duration() const noexcept;
  /// State at time t in [0, duration()], following the primitive that
  /// connects the neighbouring samples.
  VehicleState at(double t, const Dynamics& dynamics) const;
  bool operator==(const Trajectory&) const = default;
};

/// State `tau` seconds into a primitive started at `from`.
VehicleState propagate(const VehicleState& from, const MotionPrimitive& primitive, double tau,
                       const Dynamics& dynamics);

/// True when each consecutive pair is connected by a constant-curvature,
/// constant-acceleration step within `tolerance`.
bool kinematically_continuous(const Trajectory& trajectory, const Dynamics& dynamics,
                              double tolerance = 1e-6);

OrientedBox ego_footprint(const VehicleState& state, const Dynamics& dynamics);
/// Obstacle box at time t, movers advanced at constant velocity.
OrientedBox obstacle_at(const Obstacle& obstacle, double t);

struct PlannerOptions {
  int max_depth = 4;
  std::size_t node_budget = 50000;
  double time_weight = 1.0;
  int substeps = 5;  // collision samples per primitive
};

/// Whether a primitive started at time t0 from `from` stays on the road,
/// within the speed range, short of the goal's far edge, and clear of the
/// scenario obstacles at every substep.
bool segment_feasible(const PlanningScenario& scenario, const VehicleState& from,
                      const MotionPrimitive& primitive, double t0, const PlannerOptions& options);

bool in_goal(const PlanningScenario& scenario, const VehicleState& state);

struct PlanResult {
  std::optional<Trajectory> trajectory;
  double cost = 0.0;
  std::size_t expansions = 0;
  bool budget_exhausted = false;
  bool success() const noexcept { return trajectory.has_value(); }
};

/// A* over the primitive lattice. Cost is path length plus time_weight per
/// second; ties break on lower f, then lower h, then insertion order.
PlanResult plan_trajectory(const PlanningScenario& scenario, const PlannerOptions& options = {});

/// True iff the ego footprint overlaps an obstacle (rotated IoU > 0) at
/// any sample spaced at most `substep` seconds apart.
bool check_collision(const Trajectory& trajectory, std::span<const Obstacle> obstacles,
                     const Dynamics& dynamics, double substep = 0.2);

}  // namespace sdv
