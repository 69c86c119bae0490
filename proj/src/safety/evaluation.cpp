#include "sdv/safety/evaluation.hpp"

#include <string>

#include "sdv/core/errors.hpp"
#include "sdv/core/rng.hpp"

namespace sdv {

SafetyReport SafetyReport::from_counts(std::size_t k_dts, std::size_t k_trj, std::size_t k_cls) {
  if (k_dts == 0) throw DomainError("safety report needs at least one scenario");
  if (k_trj > k_dts || k_cls > k_trj) throw DomainError("safety counts must satisfy k_cls <= k_trj <= k_dts");
  SafetyReport r;
  r.k_dts = k_dts;
  r.k_trj = k_trj;
  r.k_cls = k_cls;
  r.m_suc = static_cast<double>(k_trj) / static_cast<double>(k_dts);
  r.m_cls = k_trj == 0 ? 0.0 : static_cast<double>(k_cls) / static_cast<double>(k_trj);
  r.m_saf = (1.0 - r.m_cls) * r.m_suc;
  return r;
}

void SafetyReport::validate() const {
  if (k_dts == 0 || k_trj > k_dts || k_cls > k_trj)
    throw InvariantError("safety counts must satisfy k_cls <= k_trj <= k_dts, k_dts >= 1");
  const SafetyReport expected = from_counts(k_dts, k_trj, k_cls);
  if (m_suc != expected.m_suc || m_cls != expected.m_cls || m_saf != expected.m_saf)
    throw InvariantError("safety fractions do not match the counts");
}

ScenarioOutcome evaluate_scenario(const PlanningScenario& scenario,
                                  std::span<const Detection> detections,
                                  const PlannerOptions& options) {
  PlanningScenario perceived = scenario;
  perceived.obstacles.clear();
  for (const Detection& d : detections) perceived.obstacles.push_back(d.object);
  const PlanResult plan = plan_trajectory(perceived, options);
  ScenarioOutcome out;
  out.budget_exhausted = plan.budget_exhausted;
  if (plan.success()) {
    out.planned = true;
    out.collided = check_collision(*plan.trajectory, scenario.obstacles, scenario.dynamics,
                                   scenario.dynamics.step / options.substeps);
  }
  return out;
}

SafetyReport reduce_outcomes(std::span<const ScenarioOutcome> outcomes) {
  std::size_t trj = 0, cls = 0;
  for (const ScenarioOutcome& o : outcomes) {
    trj += o.planned;
    cls += o.planned && o.collided;
  }
  return SafetyReport::from_counts(outcomes.size(), trj, cls);
}

SafetyReport evaluate_corpus(std::span<const PlanningScenario> scenarios,
                             const std::vector<std::vector<Detection>>& detections,
                             const PlannerOptions& options) {
  if (scenarios.empty()) throw DomainError("safety corpus is empty");
  if (scenarios.size() != detections.size())
    throw DomainError("one detection list per scenario is required");
  std::vector<ScenarioOutcome> outcomes;
  for (std::size_t i = 0; i < scenarios.size(); ++i)
    outcomes.push_back(evaluate_scenario(scenarios[i], detections[i], options));
  return reduce_outcomes(outcomes);
}

void SafetyCorpusConfig::validate() const {
  lanes.validate();
  if (scenarios < 1) throw ConfigError("safety corpus size must be >= 1");
  if (!(highway_fraction >= 0.0 && highway_fraction <= 1.0))
    throw ConfigError("highway fraction must be in [0,1]");
  if (obstacles_min < 0 || obstacles_max < obstacles_min)
    throw ConfigError("obstacle count range must satisfy 0 <= min <= max");
  if (!(moving_fraction >= 0.0 && moving_fraction <= 1.0))
    throw ConfigError("moving fraction must be in [0,1]");
  if (!(x_max > x_min)) throw ConfigError("obstacle x range is empty");
}

std::vector<PlanningScenario> generate_planning_corpus(const SafetyCorpusConfig& config,
                                                       std::uint64_t seed) {
  config.validate();
  std::vector<PlanningScenario> out;
  for (int i = 0; i < config.scenarios; ++i) {
    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(i));
    RandomStream rng(s, "safety-scenario");
    const RoadType road = rng.bernoulli(config.highway_fraction) ? RoadType::highway : RoadType::street;
    // Only intentions whose lane exists.
    std::vector<Intention> options{Intention::straight};
    if (config.lanes.ego_lane + 1 < config.lanes.lane_count) options.push_back(Intention::left);
    if (config.lanes.ego_lane > 0) options.push_back(Intention::right);
    const Intention intention = options[rng.index(options.size())];
    const SpeedRange range = speed_range(road);
    const double speed = rng.uniform(range.min, range.max);
    const auto extra = rng.index(static_cast<std::uint64_t>(config.obstacles_max - config.obstacles_min + 1));

    SceneConfig sc;
    sc.lanes = config.lanes;
    sc.road_type = road;
    sc.obstacle_count = config.obstacles_min + static_cast<int>(extra);
    sc.x_min = config.x_min;
    sc.x_max = config.x_max;
    sc.moving_fraction = config.moving_fraction;
    sc.keep_out.push_back(make_box({0.0, config.lanes.lane_center(config.lanes.ego_lane), 0.75}, 8.5,
                                   3.0, 1.5, 0.0));
    Scene scene = generate_scene(sc, derive_seed(s, "obstacles"));
    out.push_back(make_scenario(road, intention, speed, std::move(scene.obstacles), config.lanes));
  }
  return out;
}

DecouplingResult evaluate_perturbation(std::span<const PlanningScenario> scenarios,
                                       const PerturbationModel& model, std::uint64_t seed,
                                       const PlannerOptions& options) {
  std::vector<std::vector<Detection>> detections;
  std::vector<std::vector<OrientedBox>> truth;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const auto clean = truth_detections(scenarios[i].obstacles, derive_seed(seed, 2 * i));
    detections.push_back(perturb_detections(clean, model, scenarios[i].lanes, derive_seed(seed, 2 * i + 1)));
    std::vector<OrientedBox> boxes;
    for (const Obstacle& o : scenarios[i].obstacles) boxes.push_back(o.box);
    truth.push_back(std::move(boxes));
  }
  DecouplingResult r;
  r.ap = average_precision(detections, truth);
  r.report = evaluate_corpus(scenarios, detections, options);
  return r;
}

}  // namespace sdv
