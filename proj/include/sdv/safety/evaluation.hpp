#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sdv/safety/detections.hpp"
#include "sdv/safety/planning.hpp"

namespace sdv {

struct SafetyReport {
  std::size_t k_dts = 0;  // scenarios
  std::size_t k_trj = 0;  // successful plans
  std::size_t k_cls = 0;  // successful plans that collide
  double m_suc = 0.0;
  double m_cls = 0.0;
  double m_saf = 0.0;

  /// m_cls is 0 when no plan succeeded.
  static SafetyReport from_counts(std::size_t k_dts, std::size_t k_trj, std::size_t k_cls);
  /// Throws InvariantError if counts or fractions are inconsistent.
  void validate() const;
  bool operator==(const SafetyReport&) const = default;
};

struct ScenarioOutcome {
  bool planned = false;
  bool collided = false;
  bool budget_exhausted = false;
  bool operator==(const ScenarioOutcome&) const = default;
};

/// Plans from the detections (with their motion labels) and checks the plan
/// against the scenario's true obstacles.
ScenarioOutcome evaluate_scenario(const PlanningScenario& scenario,
                                  std::span<const Detection> detections,
                                  const PlannerOptions& options = {});

SafetyReport reduce_outcomes(std::span<const ScenarioOutcome> outcomes);

/// Throws DomainError when the corpus is empty or sizes differ.
SafetyReport evaluate_corpus(std::span<const PlanningScenario> scenarios,
                             const std::vector<std::vector<Detection>>& detections,
                             const PlannerOptions& options = {});

struct SafetyCorpusConfig {
  int scenarios = 200;
  double highway_fraction = 0.5;
  int obstacles_min = 2;
  int obstacles_max = 5;
  double moving_fraction = 0.5;
  double x_min = 8.0;  // obstacle center range ahead of the ego
  double x_max = 45.0;
  LaneLayout lanes;

  void validate() const;
  bool operator==(const SafetyCorpusConfig&) const = default;
};

/// Random road type, intention, start speed and labeled obstacles per
/// scenario; deterministic per seed.
std::vector<PlanningScenario> generate_planning_corpus(const SafetyCorpusConfig& config,
                                                       std::uint64_t seed);

struct DecouplingResult {
  double ap = 0.0;
  SafetyReport report;
};

/// Truth detections for every scenario, perturbed by `model`, scored by AP
/// against the true boxes and by the safety metrics.
DecouplingResult evaluate_perturbation(std::span<const PlanningScenario> scenarios,
                                       const PerturbationModel& model, std::uint64_t seed,
                                       const PlannerOptions& options = {});

}  // namespace sdv
