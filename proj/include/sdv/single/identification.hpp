#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "sdv/core/sensor_state.hpp"
#include "sdv/sim/frame.hpp"
#include "sdv/single/calibration.hpp"
#include "sdv/single/error_state.hpp"

namespace sdv {

/// Disparity errors E_{i,j,k} of every pair below `reference`, in error
/// state order.
std::vector<double> disparity_errors(const SensorFrame& frame, std::size_t reference);

ErrorStateVector compute_error_state_vector(const SensorFrame& frame,
                                            const ThresholdTable& thresholds,
                                            std::size_t reference);
ErrorStateVector compute_error_state_vector(const SensorFrame& frame,
                                            const ThresholdTable& thresholds);

struct IdentificationResult {
  SensorStateVector identified;
  /// The search ended on an all-ones vector with four sensors left, so the
  /// states of the remaining three are unresolved.
  bool inconclusive = false;
  /// Every observed error state matches the one predicted from `identified`.
  bool consistent = true;
  bool operator==(const IdentificationResult&) const = default;
};

/// Error state for the first `sensor_count` sensors, the last one acting as
/// reference.
using ErrorStateProvider = std::function<ErrorStateVector(std::size_t sensor_count)>;

IdentificationResult identify_attacked(const ErrorStateProvider& provider,
                                       std::size_t sensor_count);

/// Decodes a single error state. An all-ones vector marks the reference and
/// is reported inconclusive, since the reduced rig is not observable here.
IdentificationResult identify_attacked(const ErrorStateVector& e);

/// Needs maps for every reference the recursion may reach (see
/// RenderOptions::extra_references).
IdentificationResult identify_attacked(const SensorFrame& frame, const ThresholdTable& thresholds);

struct DetectionReport {
  std::vector<Triple> triples;
  std::vector<double> errors;
  std::vector<bool> detections;
  std::optional<IdentificationResult> identification;
  std::optional<SensorStateVector> truth;
  bool attack_detected() const noexcept;
};

/// Per-frame detection at the rig's reference, plus identification when
/// the rig has at least four sensors.
DetectionReport evaluate_frame(const SensorFrame& frame, const ThresholdTable& thresholds);

}  // namespace sdv
