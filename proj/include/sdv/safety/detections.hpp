#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sdv/sim/scene.hpp"

namespace sdv {

struct Detection {
  Obstacle object;          // box plus the motion label used by the planner
  double confidence = 1.0;
  int truth_index = -1;     // source obstacle, -1 for ghosts
  bool operator==(const Detection&) const = default;
};

/// One detection per obstacle with the exact box and a confidence drawn
/// from U[0.5, 1.0].
std::vector<Detection> truth_detections(std::span<const Obstacle> obstacles, std::uint64_t seed);

struct PerturbationModel {
  enum class Kind { none, ghost_roadside, ghost_onroad, drift, drop };
  Kind kind = Kind::none;
  int count = 0;          // ghosts added
  double sigma = 0.0;     // drift, meters per axis
  double probability = 0.0;  // drop
  double confidence_min = 0.0;  // ghost confidence range
  double confidence_max = 1.0;

  static PerturbationModel none() { return {}; }
  /// Car-sized ghosts 1.5 to 5 m beyond a road edge with confidence U[0.6, 1.0].
  static PerturbationModel ghost_roadside(int k);
  /// Car-sized ghosts in a lane, 5 to 30 m ahead, with confidence U[0.2, 0.6].
  static PerturbationModel ghost_onroad(int k);
  static PerturbationModel drift(double sigma);
  static PerturbationModel drop(double p);

  /// Throws ConfigError on k < 0, sigma < 0, p outside [0,1] or an
  /// inverted confidence range.
  void validate() const;
  bool operator==(const PerturbationModel&) const = default;
};

std::vector<Detection> perturb_detections(std::span<const Detection> detections,
                                          const PerturbationModel& model, const LaneLayout& lanes,
                                          std::uint64_t seed);

/// All-point interpolated AP over confidence-ranked detections pooled across
/// scenes. Matching is greedy and one-to-one within a scene at
/// rotated_iou > iou_threshold; equal confidences keep pooled index order.
/// Returns 0 when there is no truth.
double average_precision(const std::vector<std::vector<Detection>>& detections,
                         const std::vector<std::vector<OrientedBox>>& truth,
                         double iou_threshold = 0.7);
double average_precision(std::span<const Detection> detections, std::span<const OrientedBox> truth,
                         double iou_threshold = 0.7);

}  // namespace sdv
