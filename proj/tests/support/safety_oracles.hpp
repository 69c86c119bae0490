#pragma once

// Independent planning and collision oracles shared by unit and acceptance tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <queue>

#include "sdv/core/rng.hpp"
#include "sdv/safety/evaluation.hpp"

namespace sdv::oracle {

using Corners = std::array<Vec2, 4>;

inline Corners corners(const OrientedBox& b) {
  const Vec2 ax(std::cos(b.yaw), std::sin(b.yaw)), ay(-std::sin(b.yaw), std::cos(b.yaw));
  const Vec2 c = b.center2d(), hl = 0.5 * b.length * ax, hw = 0.5 * b.width * ay;
  return {c - hl - hw, c + hl - hw, c + hl + hw, c - hl + hw};
}

// Separating-axis test for rectangles with positive-area overlap.
inline bool sat_overlap(const OrientedBox& a, const OrientedBox& b) {
  const Corners ca = corners(a), cb = corners(b);
  for (const Corners* poly : {&ca, &cb}) {
    for (int e = 0; e < 2; ++e) {
      const Vec2 edge = (*poly)[e + 1] - (*poly)[e];
      const Vec2 axis(-edge.y(), edge.x());
      double a0 = 1e300, a1 = -1e300, b0 = 1e300, b1 = -1e300;
      for (const Vec2& p : ca) a0 = std::min(a0, p.dot(axis)), a1 = std::max(a1, p.dot(axis));
      for (const Vec2& p : cb) b0 = std::min(b0, p.dot(axis)), b1 = std::max(b1, p.dot(axis));
      if (std::min(a1, b1) - std::max(a0, b0) <= 0.0) return false;
    }
  }
  return true;
}

inline OrientedBox moved(const Obstacle& o, double t) {
  OrientedBox b = o.box;
  if (o.is_moving) b.center += Vec3(o.velocity.x(), o.velocity.y(), 0.0) * t;
  return b;
}

// Uniform-cost search over the same primitive lattice with its own
// feasibility rules; returns the optimal cost when the goal is reachable.
inline std::optional<double> ucs_oracle(const PlanningScenario& sc, int max_depth = 4) {
  const Constraints c = select_constraints(sc.road_type);
  const Dynamics& d = sc.dynamics;
  struct Item {
    double g;
    std::size_t seq;
    VehicleState s;
    int depth;
    bool operator>(const Item& o) const { return g != o.g ? g > o.g : seq > o.seq; }
  };
  std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
  std::size_t seq = 0;
  open.push({0.0, seq++, sc.start, 0});
  const double far = sc.goal.center.x() + 0.5 * sc.goal.length;
  while (!open.empty()) {
    const Item it = open.top();
    open.pop();
    if (sc.goal.contains2d(it.s.position, 1e-9)) return it.g;
    if (it.depth == max_depth) continue;
    for (const MotionPrimitive& m : c.primitives) {
      if (!sc.speed.contains(it.s.speed + m.speed_delta)) continue;
      bool ok = true;
      VehicleState end;
      for (int k = 1; k <= 5 && ok; ++k) {
        const VehicleState s = propagate(it.s, m, 0.2 * k, d);
        const OrientedBox ego = make_box({s.position.x(), s.position.y(), 0.75}, 4.5, 1.8, 1.5, s.heading);
        for (const Vec2& p : corners(ego))
          ok = ok && p.y() >= sc.lanes.road_right() - 1e-9 && p.y() <= sc.lanes.road_left() + 1e-9;
        for (const Obstacle& o : sc.obstacles) ok = ok && !sat_overlap(ego, moved(o, it.depth + 0.2 * k));
        end = s;
      }
      if (!ok || end.position.x() > far + 1e-9) continue;
      const double g = it.g + (it.s.speed + 0.5 * m.speed_delta) + 1.0;
      open.push({g, seq++, end, it.depth + 1});
    }
  }
  return std::nullopt;
}

inline Obstacle random_obstacle(RandomStream& rng, const LaneLayout& lanes, double x_lo, double x_hi) {
  Obstacle o;
  const int lane = static_cast<int>(rng.index(3));
  o.box = make_box({rng.uniform(x_lo, x_hi), lanes.lane_center(lane) + rng.uniform(-0.8, 0.8), 0.75},
                   rng.uniform(3.8, 4.8), rng.uniform(1.6, 1.9), 1.5, rng.uniform(-0.3, 0.3));
  if (rng.bernoulli(0.4)) {
    o.is_moving = true;
    o.velocity = Vec2(rng.uniform(-3.0, 10.0), rng.uniform(-2.0, 2.0));
  }
  return o;
}

inline PlanningScenario random_scenario(std::uint64_t seed) {
  RandomStream rng(seed, "lattice");
  const RoadType road = rng.bernoulli(0.5) ? RoadType::highway : RoadType::street;
  const Intention intention = std::array{Intention::left, Intention::straight, Intention::right}[rng.index(3)];
  const SpeedRange r = speed_range(road);
  const double v = rng.uniform(r.min, r.max);
  std::vector<Obstacle> obstacles;
  const auto n = rng.index(7);
  for (std::uint64_t k = 0; k < n; ++k) obstacles.push_back(random_obstacle(rng, LaneLayout{}, 4.0, 30.0));
  return make_scenario(road, intention, v, std::move(obstacles));
}

struct SweepAgreement {
  int scenarios = 0;
  int agree = 0;
  int hits = 0;
};

// Random short trajectories with obstacles placed near them; compares
// check_collision against sampling every millisecond.
inline SweepAgreement sweep_agreement(std::uint64_t seed, int scenarios) {
  const Constraints c = select_constraints(RoadType::street);
  RandomStream rng(seed, "sweep");
  SweepAgreement out;
  out.scenarios = scenarios;
  for (int n = 0; n < scenarios; ++n) {
    Trajectory t;
    t.states.push_back({Vec2::Zero(), rng.uniform(6.2, 8.0), 0.0, 0.0});
    const auto steps = 1 + rng.index(4);
    for (std::uint64_t k = 0; k < steps; ++k) {
      const MotionPrimitive m = c.primitives[rng.index(c.primitives.size())];
      t.states.push_back(propagate(t.states.back(), m, 1.0, c.dynamics));
    }
    std::vector<Obstacle> obstacles;
    const auto count = 1 + rng.index(3);
    for (std::uint64_t k = 0; k < count; ++k) {
      const Vec2 near = t.at(rng.uniform(0.0, t.duration()), c.dynamics).position;
      obstacles.push_back(random_obstacle(rng, LaneLayout{}, near.x() - 6.0, near.x() + 6.0));
    }
    bool hit = false;
    const auto samples = static_cast<int>(std::lround(t.duration() * 1000.0));
    for (int k = 0; k <= samples && !hit; ++k) {
      const double time = k * 1e-3;
      const VehicleState s = t.at(time, c.dynamics);
      const OrientedBox ego = make_box({s.position.x(), s.position.y(), 0.75}, 4.5, 1.8, 1.5, s.heading);
      for (const Obstacle& o : obstacles) hit = hit || sat_overlap(ego, moved(o, time));
    }
    out.hits += hit;
    out.agree += check_collision(t, obstacles, c.dynamics) == hit;
  }
  return out;
}

}  // namespace sdv::oracle
