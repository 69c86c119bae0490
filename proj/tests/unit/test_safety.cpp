#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <queue>

#include "doctest.h"
#include "sdv/core/errors.hpp"
#include "sdv/core/rng.hpp"
#include "sdv/safety/evaluation.hpp"
#include "safety_oracles.hpp"

using namespace sdv;
using namespace sdv::oracle;

namespace {

Trajectory straight_trajectory(double speed, int steps) {
  const Constraints c = select_constraints(RoadType::street);
  Trajectory t;
  t.states.push_back({Vec2::Zero(), speed, 0.0, 0.0});
  for (int i = 0; i < steps; ++i) t.states.push_back(propagate(t.states.back(), {0.0, 0.0}, 1.0, c.dynamics));
  return t;
}

// AP by recomputing the PR point of every confidence-ranked prefix from scratch.
double brute_force_ap(const std::vector<Detection>& dets, const std::vector<OrientedBox>& truth) {
  std::vector<std::size_t> order(dets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].confidence > dets[b].confidence; });
  std::vector<double> p, r;
  for (std::size_t n = 1; n <= order.size(); ++n) {
    std::vector<bool> used(truth.size(), false);
    std::size_t tp = 0;
    for (std::size_t m = 0; m < n; ++m) {
      std::size_t best = truth.size();
      double best_iou = 0.7;
      for (std::size_t t = 0; t < truth.size(); ++t) {
        const double iou = rotated_iou(dets[order[m]].object.box, truth[t]);
        if (!used[t] && iou > best_iou) best_iou = iou, best = t;
      }
      if (best < truth.size()) used[best] = true, ++tp;
    }
    p.push_back(static_cast<double>(tp) / static_cast<double>(n));
    r.push_back(static_cast<double>(tp) / static_cast<double>(truth.size()));
  }
  double ap = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    const double envelope = *std::max_element(p.begin() + static_cast<long>(n), p.end());
    ap += (r[n] - (n ? r[n - 1] : 0.0)) * envelope;
  }
  return ap;
}

Detection det(const OrientedBox& b, double conf) {
  Detection d;
  d.object.box = b;
  d.confidence = conf;
  return d;
}

}  // namespace

TEST_CASE("constraint selection") {
  const Constraints street = select_constraints("street");
  CHECK(street.speed.min == doctest::Approx(6.11).epsilon(1e-3));
  CHECK(street.speed.max == doctest::Approx(8.06).epsilon(1e-3));
  const Constraints highway = select_constraints(RoadType::highway);
  CHECK(highway.speed.min == doctest::Approx(11.11).epsilon(1e-3));
  CHECK(highway.speed.max == doctest::Approx(13.06).epsilon(1e-3));
  CHECK(street.primitives.size() == 9);
  CHECK(highway.primitives.size() == 9);
  for (const auto& m : street.primitives)
    CHECK(std::abs(std::atan(street.dynamics.wheelbase * m.curvature)) <= street.dynamics.max_steering + 1e-15);
  CHECK_THROWS_AS(select_constraints("gravel"), ConfigError);
  CHECK_THROWS_AS(select_constraints(""), ConfigError);
}

TEST_CASE("scenario invariants") {
  const PlanningScenario s = make_scenario(RoadType::street, Intention::left, 7.0, {});
  CHECK(s.goal.center.x() == doctest::Approx(15.0));
  CHECK(s.goal.center.y() == doctest::Approx(3.5));
  PlanningScenario bad = s;
  bad.goal.center.x() = 14.0;
  CHECK_THROWS_AS(bad.validate(), InvariantError);
  bad = s;
  bad.start.speed = 10.0;
  CHECK_THROWS_AS(bad.validate(), InvariantError);
  bad = s;
  bad.obstacles.push_back({make_box({20, 0, 0.75}, 4, 1.8, 1.5, 0), false, Vec2(1, 0)});
  CHECK_THROWS_AS(bad.validate(), InvariantError);
  LaneLayout one;
  one.lane_count = 1;
  one.ego_lane = 0;
  CHECK_THROWS_AS(make_scenario(RoadType::street, Intention::left, 7.0, {}, one), DomainError);
  CHECK(parse_intention("right") == Intention::right);
  CHECK_THROWS_AS(parse_intention("back"), ConfigError);
}

TEST_CASE("primitive propagation matches numerical integration") {
  const Dynamics d = select_constraints(RoadType::street).dynamics;
  RandomStream rng(5, "rk4");
  for (int trial = 0; trial < 50; ++trial) {
    const VehicleState s0{Vec2(rng.uniform(-5, 5), rng.uniform(-5, 5)), rng.uniform(5, 13),
                          rng.uniform(-1, 1), 0.0};
    const MotionPrimitive m{rng.uniform(-0.06, 0.06), rng.uniform(-1, 1)};
    // RK4 on x' = v cos(phi), y' = v sin(phi), phi' = v kappa, v' = a.
    std::array<double, 4> x{s0.position.x(), s0.position.y(), s0.heading, s0.speed};
    auto f = [&](const std::array<double, 4>& q) {
      return std::array<double, 4>{q[3] * std::cos(q[2]), q[3] * std::sin(q[2]), q[3] * m.curvature,
                                   m.speed_delta};
    };
    const double h = 1e-3;
    for (int k = 0; k < 1000; ++k) {
      auto add = [](std::array<double, 4> a, const std::array<double, 4>& b, double s) {
        for (int i = 0; i < 4; ++i) a[i] += s * b[i];
        return a;
      };
      const auto k1 = f(x), k2 = f(add(x, k1, h / 2)), k3 = f(add(x, k2, h / 2)), k4 = f(add(x, k3, h));
      for (int i = 0; i < 4; ++i) x[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    }
    const VehicleState s1 = propagate(s0, m, 1.0, d);
    CHECK(std::abs(s1.position.x() - x[0]) < 1e-8);
    CHECK(std::abs(s1.position.y() - x[1]) < 1e-8);
    CHECK(std::abs(s1.heading - x[2]) < 1e-8);
    CHECK(std::abs(s1.speed - x[3]) < 1e-12);
  }
}

TEST_CASE("planner on an empty road") {
  for (RoadType road : {RoadType::street, RoadType::highway}) {
    for (Intention intention : {Intention::left, Intention::straight, Intention::right}) {
      const PlanningScenario s = make_scenario(road, intention, speed_range(road).min + 0.5, {});
      const PlanResult r = plan_trajectory(s);
      REQUIRE(r.success());
      CHECK(in_goal(s, r.trajectory->states.back()));
      CHECK(kinematically_continuous(*r.trajectory, s.dynamics));
      CHECK(r.trajectory->states.front() == s.start);
      CHECK(!check_collision(*r.trajectory, s.obstacles, s.dynamics));
    }
  }
}

TEST_CASE("walled road has no plan") {
  std::vector<Obstacle> wall;
  for (int lane = 0; lane < 3; ++lane)
    wall.push_back({make_box({10, LaneLayout{}.lane_center(lane), 0.75}, 2.0, 3.4, 1.5, 0.0), false, Vec2::Zero()});
  const PlanResult r = plan_trajectory(make_scenario(RoadType::street, Intention::straight, 7.0, wall));
  CHECK(!r.success());
  CHECK(!r.budget_exhausted);
}

TEST_CASE("node budget") {
  const PlanningScenario s = make_scenario(RoadType::street, Intention::left, 7.0, {});
  PlannerOptions tiny;
  tiny.node_budget = 3;
  const PlanResult r = plan_trajectory(s, tiny);
  CHECK(!r.success());
  CHECK(r.budget_exhausted);
  CHECK(r.expansions == 3);
}

TEST_CASE("planner reachability and cost agree with uniform-cost search") {
  int reachable = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const PlanningScenario s = random_scenario(seed);
    const PlanResult r = plan_trajectory(s);
    const std::optional<double> oracle = ucs_oracle(s);
    REQUIRE(!r.budget_exhausted);
    CHECK(r.success() == oracle.has_value());
    if (r.success() && oracle) {
      ++reachable;
      CHECK(r.cost == doctest::Approx(*oracle).epsilon(1e-9));
    }
  }
  CHECK(reachable > 30);
  CHECK(reachable < 100);
}

TEST_CASE("planner soundness and determinism") {
  const auto corpus = generate_planning_corpus({}, 21);
  for (std::size_t i = 0; i < 60; ++i) {
    const PlanningScenario& s = corpus[i];
    const PlanResult a = plan_trajectory(s);
    const PlanResult b = plan_trajectory(s);
    CHECK(a.trajectory == b.trajectory);
    if (!a.success()) continue;
    const Trajectory& t = *a.trajectory;
    CHECK(kinematically_continuous(t, s.dynamics));
    CHECK(in_goal(s, t.states.back()));
    for (const VehicleState& st : t.states) {
      CHECK(s.speed.contains(st.speed));
      CHECK(std::abs(st.steering) <= s.dynamics.max_steering + 1e-12);
    }
    CHECK(!check_collision(t, s.obstacles, s.dynamics));
  }
}

TEST_CASE("collision examples") {
  const Dynamics d = select_constraints(RoadType::street).dynamics;
  const Trajectory t = straight_trajectory(7.0, 2);
  CHECK(!check_collision(t, {}, d));
  const std::vector<Obstacle> blocker{{make_box({7.5, 0, 0.75}, 4.0, 1.8, 1.5, 0.0), false, Vec2::Zero()}};
  CHECK(check_collision(t, blocker, d));
  // Crossing mover reaching (7, 0) at t = 1 s.
  Obstacle crossing{make_box({7, -7, 0.75}, 4.0, 1.8, 1.5, 1.5707963267948966), true, Vec2(0, 7)};
  CHECK(check_collision(t, std::vector{crossing}, d));
  crossing.box.center.y() -= 5.0 * 7.0;
  CHECK(!check_collision(t, std::vector{crossing}, d));
  CHECK_THROWS_AS(check_collision(t, {}, d, 0.0), DomainError);
}

TEST_CASE("collision checker agrees with a 1 ms sweep") {
  const oracle::SweepAgreement r = oracle::sweep_agreement(17, 500);
  CHECK(r.hits > 50);
  CHECK(r.agree >= 0.99 * r.scenarios);
}

TEST_CASE("safety report") {
  const SafetyReport r = SafetyReport::from_counts(600, 540, 12);
  CHECK(r.m_suc == doctest::Approx(0.9000).epsilon(1e-12));
  CHECK(r.m_cls == doctest::Approx(12.0 / 540.0).epsilon(1e-12));
  CHECK(r.m_saf == doctest::Approx(0.8800).epsilon(1e-12));
  CHECK(SafetyReport::from_counts(10, 7, 0).m_saf == SafetyReport::from_counts(10, 7, 0).m_suc);
  const SafetyReport none = SafetyReport::from_counts(5, 0, 0);
  CHECK(none.m_suc == 0.0);
  CHECK(none.m_cls == 0.0);
  CHECK(none.m_saf == 0.0);
  CHECK_THROWS_AS(SafetyReport::from_counts(0, 0, 0), DomainError);
  CHECK_THROWS_AS(SafetyReport::from_counts(5, 6, 0), DomainError);
  SafetyReport tampered = r;
  tampered.m_saf += 1e-12;
  CHECK_THROWS_AS(tampered.validate(), InvariantError);

  for (std::size_t dts = 1; dts <= 40; ++dts)
    for (std::size_t trj = 0; trj <= dts; ++trj)
      for (std::size_t cls = 0; cls <= trj; ++cls) {
        const SafetyReport x = SafetyReport::from_counts(dts, trj, cls);
        CHECK_NOTHROW(x.validate());
        REQUIRE(x.m_saf == (1.0 - x.m_cls) * x.m_suc);
      }
}

TEST_CASE("corpus evaluation plans from detections and scores against truth") {
  const PlanningScenario s = make_scenario(RoadType::street, Intention::straight, 7.0,
      {{make_box({15, 0, 0.75}, 4.0, 1.8, 1.5, 0.0), false, Vec2::Zero()}});
  // The planner cannot see a dropped obstacle and drives into it.
  const ScenarioOutcome blind = evaluate_scenario(s, {});
  CHECK(blind.planned);
  CHECK(blind.collided);
  const auto seen = truth_detections(s.obstacles, 1);
  CHECK(!evaluate_scenario(s, seen).planned);

  const std::vector<PlanningScenario> corpus{s, s};
  const SafetyReport r = evaluate_corpus(corpus, {{}, seen});
  CHECK(r.k_dts == 2);
  CHECK(r.k_trj == 1);
  CHECK(r.k_cls == 1);
  CHECK_THROWS_AS(evaluate_corpus(std::vector<PlanningScenario>{}, {}), DomainError);
  CHECK_THROWS_AS(evaluate_corpus(corpus, {{}}), DomainError);
}

TEST_CASE("perturbation models") {
  const auto corpus = generate_planning_corpus({}, 3);
  const LaneLayout lanes;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto truth = truth_detections(corpus[i].obstacles, i);
    for (const Detection& d : truth) CHECK((d.confidence >= 0.5 && d.confidence <= 1.0));
    const auto road = perturb_detections(truth, PerturbationModel::ghost_roadside(3), lanes, i);
    REQUIRE(road.size() == truth.size() + 3);
    for (std::size_t k = truth.size(); k < road.size(); ++k) {
      CHECK(road[k].truth_index == -1);
      CHECK(!road[k].object.is_moving);
      CHECK(road[k].object.box.length == 4.5);
      CHECK(road[k].object.box.width == 1.8);
      for (int lane = 0; lane < lanes.lane_count; ++lane)
        CHECK(!lanes.lane_polygon(lane).contains2d(road[k].object.box.center2d()));
    }
    const auto on = perturb_detections(truth, PerturbationModel::ghost_onroad(1), lanes, i);
    REQUIRE(on.size() == truth.size() + 1);
    CHECK(lanes.on_road(on.back().object.box.center2d()));
    CHECK(on == perturb_detections(truth, PerturbationModel::ghost_onroad(1), lanes, i));
  }
  CHECK_THROWS_AS(perturb_detections({}, PerturbationModel::ghost_onroad(-1), lanes, 0), ConfigError);
  CHECK_THROWS_AS(perturb_detections({}, PerturbationModel::drift(-0.1), lanes, 0), ConfigError);
  CHECK_THROWS_AS(perturb_detections({}, PerturbationModel::drop(1.5), lanes, 0), ConfigError);
}

TEST_CASE("drift and drop statistics") {
  std::vector<Detection> many(10000, det(make_box({10, 0, 0.75}, 4.5, 1.8, 1.5, 0.0), 0.9));
  const auto drifted = perturb_detections(many, PerturbationModel::drift(0.2), LaneLayout{}, 99);
  for (int axis = 0; axis < 2; ++axis) {
    double sum = 0.0, sq = 0.0;
    for (const Detection& d : drifted) {
      const double e = d.object.box.center[axis] - many[0].object.box.center[axis];
      sum += e;
      sq += e * e;
    }
    const double mean = sum / 1e4;
    const double sd = std::sqrt(sq / 1e4 - mean * mean);
    CHECK(sd >= 0.19);
    CHECK(sd <= 0.21);
  }
  const auto kept = perturb_detections(many, PerturbationModel::drop(0.3), LaneLayout{}, 99);
  CHECK(std::abs(static_cast<double>(kept.size()) - 7000.0) < 4.0 * std::sqrt(1e4 * 0.21));
  CHECK(perturb_detections(many, PerturbationModel::drop(0.0), LaneLayout{}, 1).size() == 10000);
  CHECK(perturb_detections(many, PerturbationModel::drop(1.0), LaneLayout{}, 1).empty());
}

TEST_CASE("average precision") {
  const OrientedBox t0 = make_box({10, 0, 0.75}, 4.5, 1.8, 1.5, 0.0);
  const OrientedBox t1 = make_box({20, 3.5, 0.75}, 4.5, 1.8, 1.5, 0.0);
  const OrientedBox far = make_box({40, -3.5, 0.75}, 4.5, 1.8, 1.5, 0.0);
  const std::vector<OrientedBox> truth{t0, t1};

  CHECK(average_precision(std::vector{det(t0, 1.0), det(t1, 1.0)}, truth) == doctest::Approx(1.0));
  CHECK(average_precision(std::vector{det(far, 0.9)}, truth) == 0.0);
  const std::vector<Detection> mixed{det(t0, 0.9), det(far, 0.8), det(t1, 0.7)};
  CHECK(average_precision(mixed, truth) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  CHECK(brute_force_ap(mixed, truth) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
  // A duplicate of a matched truth is a false positive.
  CHECK(average_precision(std::vector{det(t0, 0.9), det(t0, 0.8)}, std::vector{t0}) == doctest::Approx(1.0));
  CHECK(average_precision(std::vector{det(t0, 0.9)}, std::vector<OrientedBox>{}) == 0.0);

  RandomStream rng(8, "ap");
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<OrientedBox> boxes;
    std::vector<Detection> dets;
    const auto n = 1 + rng.index(5);
    for (std::uint64_t k = 0; k < n; ++k)
      boxes.push_back(make_box({8.0 * static_cast<double>(k), 0, 0.75}, 4.5, 1.8, 1.5, 0.0));
    const auto m = rng.index(8);
    for (std::uint64_t k = 0; k < m; ++k) {
      OrientedBox b = boxes[rng.index(n)];
      b.center.x() += rng.uniform(-0.6, 0.6);
      // Coarse confidences make ties common.
      dets.push_back(det(b, std::round(rng.uniform() * 4.0) / 4.0));
    }
    CHECK(average_precision(dets, boxes) == doctest::Approx(brute_force_ap(dets, boxes)).epsilon(1e-12));
  }
}

TEST_CASE("corpus generation") {
  SafetyCorpusConfig cfg;
  cfg.scenarios = 40;
  const auto a = generate_planning_corpus(cfg, 4);
  CHECK(a == generate_planning_corpus(cfg, 4));
  CHECK(a != generate_planning_corpus(cfg, 5));
  REQUIRE(a.size() == 40);
  int highway = 0;
  for (const PlanningScenario& s : a) {
    CHECK_NOTHROW(s.validate());
    highway += s.road_type == RoadType::highway;
    CHECK((s.obstacles.size() >= 2 && s.obstacles.size() <= 5));
  }
  CHECK(highway > 5);
  CHECK(highway < 35);
  cfg.scenarios = 0;
  CHECK_THROWS_AS(generate_planning_corpus(cfg, 1), ConfigError);
}
