#include "sdv/safety/planning.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <set>
#include <string>

#include "sdv/core/errors.hpp"

namespace sdv {

std::string_view to_string(Intention intention) noexcept {
  switch (intention) {
    case Intention::left: return "left";
    case Intention::right: return "right";
    default: return "straight";
  }
}

Intention parse_intention(std::string_view label) {
  if (label == "left") return Intention::left;
  if (label == "straight") return Intention::straight;
  if (label == "right") return Intention::right;
  throw ConfigError("unknown intention '" + std::string(label) + "'");
}

Constraints select_constraints(RoadType road_type) {
  Constraints c;
  c.speed = speed_range(road_type);
  const double kappa = road_type == RoadType::street ? 0.06 : 0.04;
  for (double k : {-kappa, 0.0, kappa})
    for (double dv : {-1.0, 0.0, 1.0}) c.primitives.push_back({k, dv});
  c.dynamics.max_steering = std::atan(c.dynamics.wheelbase * kappa);
  return c;
}

Constraints select_constraints(std::string_view road_type) {
  return select_constraints(parse_road_type(road_type));
}

namespace {

int intention_lane(const LaneLayout& lanes, Intention intention) {
  switch (intention) {
    case Intention::left: return lanes.ego_lane + 1;
    case Intention::right: return lanes.ego_lane - 1;
    default: return lanes.ego_lane;
  }
}

constexpr double kGoalAhead = 15.0;
constexpr double kGoalLength = 8.0;

// Closed-form state after travelling with curvature kappa and constant
// acceleration for tau seconds.
VehicleState advance(const VehicleState& from, double kappa, double accel, double tau,
                     double wheelbase) {
  const double s = from.speed * tau + 0.5 * accel * tau * tau;
  const double phi = from.heading + kappa * s;
  VehicleState out;
  if (kappa == 0.0) {
    out.position = from.position + s * Vec2(std::cos(from.heading), std::sin(from.heading));
  } else {
    out.position = from.position + Vec2((std::sin(phi) - std::sin(from.heading)) / kappa,
                                        (std::cos(from.heading) - std::cos(phi)) / kappa);
  }
  out.speed = from.speed + accel * tau;
  out.heading = phi;
  out.steering = std::atan(wheelbase * kappa);
  return out;
}

double distance_to_box(const Vec2& p, const OrientedBox& box) {
  const Vec2 d = p - box.center2d();
  const double c = std::cos(box.yaw), s = std::sin(box.yaw);
  const double lx = std::abs(c * d.x() + s * d.y()) - 0.5 * box.length;
  const double ly = std::abs(-s * d.x() + c * d.y()) - 0.5 * box.width;
  return std::hypot(std::max(lx, 0.0), std::max(ly, 0.0));
}

bool boxes_touch(const OrientedBox& a, const OrientedBox& b) {
  const double reach = 0.5 * (std::hypot(a.length, a.width) + std::hypot(b.length, b.width));
  if ((a.center2d() - b.center2d()).squaredNorm() > reach * reach) return false;
  return rotated_iou(a, b) > 0.0;
}

}  // namespace

void PlanningScenario::validate() const {
  lanes.validate();
  goal.validate();
  const int lane = intention_lane(lanes, intention);
  if (lane < 0 || lane >= lanes.lane_count)
    throw InvariantError("intention '" + std::string(to_string(intention)) + "' has no lane");
  const Vec2 ahead = goal.center2d() - start.position;
  if (std::abs(ahead.x() - kGoalAhead) > 1e-9 ||
      std::abs(goal.center.y() - lanes.lane_center(lane)) > 1e-9)
    throw InvariantError("goal region must be centered 15 m ahead in the intention lane");
  if (!speed.contains(start.speed)) throw InvariantError("start speed outside the speed range");
  if (std::abs(start.steering) > dynamics.max_steering + 1e-12)
    throw InvariantError("start steering exceeds the steering bound");
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    obstacles[i].box.validate();
    if (!obstacles[i].is_moving && obstacles[i].velocity != Vec2::Zero())
      throw InvariantError("static obstacle " + std::to_string(i) + " has velocity");
  }
}

PlanningScenario make_scenario(RoadType road_type, Intention intention, double start_speed,
                               std::vector<Obstacle> obstacles, LaneLayout lanes) {
  lanes.validate();
  const int lane = intention_lane(lanes, intention);
  if (lane < 0 || lane >= lanes.lane_count)
    throw DomainError("intention '" + std::string(to_string(intention)) + "' has no lane");
  const Constraints c = select_constraints(road_type);
  PlanningScenario s;
  s.start.position = Vec2(0.0, lanes.lane_center(lanes.ego_lane));
  s.start.speed = start_speed;
  s.goal = make_box({kGoalAhead, lanes.lane_center(lane), 0.75}, kGoalLength, lanes.lane_width, 1.5,
                    0.0);
  s.intention = intention;
  s.obstacles = std::move(obstacles);
  s.road_type = road_type;
  s.speed = c.speed;
  s.dynamics = c.dynamics;
  s.lanes = lanes;
  s.validate();
  return s;
}

double Trajectory::duration() const noexcept {
  return states.empty() ? 0.0 : dt * static_cast<double>(states.size() - 1);
}

VehicleState Trajectory::at(double t, const Dynamics& dynamics) const {
  if (states.empty()) throw DomainError("empty trajectory");
  if (t < 0.0 || t > duration() + 1e-9) throw DomainError("time outside the trajectory");
  if (states.size() == 1) return states.front();
  const std::size_t i =
      std::min(static_cast<std::size_t>(std::floor(t / dt)), states.size() - 2);
  const VehicleState& a = states[i];
  const VehicleState& b = states[i + 1];
  const double kappa = std::tan(b.steering) / dynamics.wheelbase;
  const double accel = (b.speed - a.speed) / dt;
  return advance(a, kappa, accel, t - static_cast<double>(i) * dt, dynamics.wheelbase);
}

VehicleState propagate(const VehicleState& from, const MotionPrimitive& primitive, double tau,
                       const Dynamics& dynamics) {
  return advance(from, primitive.curvature, primitive.speed_delta / dynamics.step, tau,
                 dynamics.wheelbase);
}

bool kinematically_continuous(const Trajectory& trajectory, const Dynamics& dynamics,
                              double tolerance) {
  const auto& st = trajectory.states;
  for (std::size_t i = 0; i + 1 < st.size(); ++i) {
    const double kappa = std::tan(st[i + 1].steering) / dynamics.wheelbase;
    const double accel = (st[i + 1].speed - st[i].speed) / trajectory.dt;
    const VehicleState p = advance(st[i], kappa, accel, trajectory.dt, dynamics.wheelbase);
    if ((p.position - st[i + 1].position).norm() > tolerance) return false;
    if (std::abs(normalize_angle(p.heading - st[i + 1].heading)) > tolerance) return false;
    if (std::abs(st[i + 1].steering) > dynamics.max_steering + tolerance) return false;
  }
  return true;
}

OrientedBox ego_footprint(const VehicleState& state, const Dynamics& dynamics) {
  return make_box({state.position.x(), state.position.y(), 0.75}, dynamics.ego_length,
                  dynamics.ego_width, 1.5, state.heading);
}

OrientedBox obstacle_at(const Obstacle& obstacle, double t) {
  OrientedBox b = obstacle.box;
  if (obstacle.is_moving) {
    b.center.x() += obstacle.velocity.x() * t;
    b.center.y() += obstacle.velocity.y() * t;
  }
  return b;
}

bool in_goal(const PlanningScenario& scenario, const VehicleState& state) {
  return scenario.goal.contains2d(state.position, 1e-9);
}

bool segment_feasible(const PlanningScenario& scenario, const VehicleState& from,
                      const MotionPrimitive& primitive, double t0, const PlannerOptions& options) {
  const Dynamics& d = scenario.dynamics;
  if (!scenario.speed.contains(from.speed + primitive.speed_delta)) return false;
  if (std::abs(primitive.speed_delta) > d.max_acceleration * d.step + 1e-12) return false;
  if (std::abs(std::atan(d.wheelbase * primitive.curvature)) > d.max_steering + 1e-12) return false;
  const double far_edge = scenario.goal.center.x() + 0.5 * scenario.goal.length;
  const double lo = scenario.lanes.road_right(), hi = scenario.lanes.road_left();
  for (int k = 1; k <= options.substeps; ++k) {
    const double tau = d.step * k / options.substeps;
    const VehicleState s = propagate(from, primitive, tau, d);
    const OrientedBox ego = ego_footprint(s, d);
    for (const Vec2& corner : ego.footprint())
      if (corner.y() < lo - 1e-9 || corner.y() > hi + 1e-9) return false;
    for (const Obstacle& o : scenario.obstacles)
      if (boxes_touch(ego, obstacle_at(o, t0 + tau))) return false;
    if (k == options.substeps && s.position.x() > far_edge + 1e-9) return false;
  }
  return true;
}

PlanResult plan_trajectory(const PlanningScenario& scenario, const PlannerOptions& options) {
  struct Node {
    VehicleState state;
    int depth = 0;
    double g = 0.0;
    long parent = -1;
  };
  struct Entry {
    double f, h;
    std::size_t seq;
    bool operator>(const Entry& o) const {
      if (f != o.f) return f > o.f;
      if (h != o.h) return h > o.h;
      return seq > o.seq;
    }
  };
  const Constraints constraints = select_constraints(scenario.road_type);
  const Dynamics& d = scenario.dynamics;
  const double h_scale = 1.0 + options.time_weight / scenario.speed.max;
  auto heuristic = [&](const VehicleState& s) { return distance_to_box(s.position, scenario.goal) * h_scale; };
  auto key = [&](const Node& n) {
    return std::array<long long, 5>{std::llround(n.state.position.x() * 1e6),
                                    std::llround(n.state.position.y() * 1e6),
                                    std::llround(n.state.heading * 1e6),
                                    std::llround(n.state.speed * 1e6), n.depth};
  };

  std::vector<Node> nodes{{scenario.start, 0, 0.0, -1}};
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  const double h0 = heuristic(scenario.start);
  open.push({h0, h0, 0});
  std::set<std::array<long long, 5>> closed;
  PlanResult result;

  while (!open.empty()) {
    const Entry top = open.top();
    open.pop();
    const Node node = nodes[top.seq];
    if (!closed.insert(key(node)).second) continue;
    if (result.expansions == options.node_budget) {
      result.budget_exhausted = true;
      return result;
    }
    ++result.expansions;
    if (in_goal(scenario, node.state)) {
      Trajectory t;
      t.dt = d.step;
      for (long i = static_cast<long>(top.seq); i >= 0; i = nodes[static_cast<std::size_t>(i)].parent)
        t.states.push_back(nodes[static_cast<std::size_t>(i)].state);
      std::reverse(t.states.begin(), t.states.end());
      result.trajectory = std::move(t);
      result.cost = node.g;
      return result;
    }
    if (node.depth >= options.max_depth) continue;
    const double t0 = node.depth * d.step;
    for (const MotionPrimitive& m : constraints.primitives) {
      if (!segment_feasible(scenario, node.state, m, t0, options)) continue;
      Node child;
      child.state = propagate(node.state, m, d.step, d);
      child.depth = node.depth + 1;
      const double length = (node.state.speed + 0.5 * m.speed_delta) * d.step;
      child.g = node.g + length + options.time_weight * d.step;
      child.parent = static_cast<long>(top.seq);
      const double h = heuristic(child.state);
      nodes.push_back(child);
      open.push({child.g + h, h, nodes.size() - 1});
    }
  }
  return result;
}

bool check_collision(const Trajectory& trajectory, std::span<const Obstacle> obstacles,
                     const Dynamics& dynamics, double substep) {
  if (!(substep > 0.0)) throw DomainError("collision substep must be > 0");
  if (trajectory.states.empty()) return false;
  const double T = trajectory.duration();
  const auto n = static_cast<std::size_t>(std::ceil(T / substep - 1e-9));
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = n == 0 ? 0.0 : T * static_cast<double>(k) / static_cast<double>(n);
    const OrientedBox ego = ego_footprint(trajectory.at(t, dynamics), dynamics);
    for (const Obstacle& o : obstacles)
      if (boxes_touch(ego, obstacle_at(o, t))) return true;
  }
  return false;
}

}  // namespace sdv
