#include "sdv/single/identification.hpp"

#include <algorithm>

#include "sdv/core/errors.hpp"
#include "sdv/single/disparity_error.hpp"

namespace sdv {

std::vector<double> disparity_errors(const SensorFrame& frame, std::size_t reference) {
  if (reference < 2 || reference >= frame.rig.sensor_count())
    throw DomainError("reference " + std::to_string(reference) + " out of range");
  std::vector<DisparityMap> maps;
  maps.reserve(reference);
  for (std::size_t s = 0; s < reference; ++s) maps.push_back(comparison_map(frame, s, reference));
  std::vector<double> errors;
  for (const Triple& t : ErrorStateVector::triples(reference))
    errors.push_back(disparity_error(maps[t.i], maps[t.j]));
  return errors;
}

ErrorStateVector compute_error_state_vector(const SensorFrame& frame,
                                            const ThresholdTable& thresholds,
                                            std::size_t reference) {
  const std::vector<Triple> triples = ErrorStateVector::triples(reference);
  std::vector<double> thetas;
  for (const Triple& t : triples) thetas.push_back(thresholds.at(t));
  const std::vector<double> errors = disparity_errors(frame, reference);
  std::vector<bool> bits;
  for (std::size_t p = 0; p < errors.size(); ++p) bits.push_back(errors[p] > thetas[p]);
  return ErrorStateVector(reference, std::move(bits));
}

ErrorStateVector compute_error_state_vector(const SensorFrame& frame,
                                            const ThresholdTable& thresholds) {
  return compute_error_state_vector(frame, thresholds, frame.rig.reference());
}

namespace {

// Mixed vector: a zero entry (i0, j0) clears s_i0, s_j0 and s_n, and then
// s_i = e_{i,i0,n} for every other i.
void decode_mixed(const ErrorStateVector& e, SensorStateVector& out) {
  const std::size_t n = e.reference();
  const std::vector<Triple> triples = ErrorStateVector::triples(n);
  std::size_t i0 = 0;
  for (std::size_t p = 0; p < e.size(); ++p) {
    if (!e[p]) {
      i0 = triples[p].i;
      break;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (i != i0 && e.pair(i, i0)) out.set(i);
  }
}

}  // namespace

IdentificationResult identify_attacked(const ErrorStateProvider& provider,
                                       std::size_t sensor_count) {
  if (sensor_count < 4) throw DomainError("identification needs at least four sensors");
  IdentificationResult result;
  result.identified = SensorStateVector(sensor_count);
  std::vector<ErrorStateVector> observed;
  for (std::size_t m = sensor_count;; --m) {
    ErrorStateVector e = provider(m);
    if (e.reference() != m - 1) throw DomainError("provider returned the wrong reference");
    observed.push_back(e);
    if (e.all_zero()) break;
    if (!e.all_one()) {
      decode_mixed(e, result.identified);
      break;
    }
    result.identified.set(m - 1);
    if (m == 4) {
      result.inconclusive = true;
      break;
    }
  }
  for (const ErrorStateVector& e : observed) {
    const std::size_t m = e.reference() + 1;
    if (predict_error_state(result.identified.prefix(m)) != e) result.consistent = false;
  }
  return result;
}

IdentificationResult identify_attacked(const ErrorStateVector& e) {
  const std::size_t n = e.reference();
  if (n < 3) throw DomainError("identification needs at least four sensors");
  IdentificationResult result;
  result.identified = SensorStateVector(n + 1);
  if (e.all_one()) {
    result.identified.set(n);
    result.inconclusive = true;
  } else if (!e.all_zero()) {
    decode_mixed(e, result.identified);
  }
  result.consistent = predict_error_state(result.identified) == e;
  return result;
}

IdentificationResult identify_attacked(const SensorFrame& frame, const ThresholdTable& thresholds) {
  return identify_attacked(
      [&](std::size_t m) { return compute_error_state_vector(frame, thresholds, m - 1); },
      frame.rig.sensor_count());
}

bool DetectionReport::attack_detected() const noexcept {
  return std::find(detections.begin(), detections.end(), true) != detections.end();
}

DetectionReport evaluate_frame(const SensorFrame& frame, const ThresholdTable& thresholds) {
  DetectionReport report;
  const std::size_t reference = frame.rig.reference();
  report.triples = ErrorStateVector::triples(reference);
  report.errors = disparity_errors(frame, reference);
  for (std::size_t p = 0; p < report.errors.size(); ++p)
    report.detections.push_back(detect_attack(report.errors[p], thresholds.at(report.triples[p])));
  if (frame.rig.sensor_count() >= 4) {
    std::vector<bool> top(report.detections.begin(), report.detections.end());
    report.identification = identify_attacked(
        [&](std::size_t m) {
          if (m - 1 == reference) return ErrorStateVector(reference, top);
          return compute_error_state_vector(frame, thresholds, m - 1);
        },
        frame.rig.sensor_count());
  }
  report.truth = frame.attack_truth;
  return report;
}

}  // namespace sdv
