#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sdv/bench/report.hpp"
#include "sdv/core/errors.hpp"
#include "sdv/safety/detections.hpp"
#include "sdv/sim/rig.hpp"
#include "sdv/single/calibration.hpp"
#include "sdv/fleet/validation.hpp"

namespace sdv {

enum class Pipeline { single_detect, single_identify, fleet, safety, decoupling };

std::string_view to_string(Pipeline pipeline) noexcept;
/// Throws ConfigError on an unknown label.
Pipeline parse_pipeline(std::string_view label);

struct ExperimentConfig {
  Pipeline pipeline = Pipeline::single_detect;
  std::uint64_t seed = 1;
  /// Evaluation frames per attack case, attacked fleet worlds, or safety
  /// scenarios.
  int corpus_size = 200;
  /// Attack-free calibration frames or fleet worlds.
  int calibration_size = 200;
  /// Attack-free frames scored for the empirical false-alarm rate.
  int heldout_size = 200;
  std::vector<double> r_values{0.0, 0.01, 0.05};
  double noise_sigma = 0.3;
  std::vector<std::string> rigs{"lidar-stereo", "trinocular"};
  std::vector<double> bogus_widths{0.5, 1.0, 1.5, 2.0, 2.5};
  std::vector<double> facula_radii{37.5, 75.0, 112.5, 150.0, 187.5, 225.0};
  std::vector<std::string> perturbations{"none", "ghost_roadside:3", "ghost_onroad:1", "drift:0.3",
                                         "drop:0.2"};
  std::string output_dir;  // empty: nothing is written

  /// Throws ConfigError before any work is done.
  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

/// A failure inside one experiment case.
class ExperimentError : public Error {
 public:
  ExperimentError(std::string case_name, const std::string& what)
      : Error("case " + case_name + ": " + what), case_name_(std::move(case_name)) {}
  const std::string& case_name() const noexcept { return case_name_; }

 private:
  std::string case_name_;
};

/// Rig names: "lidar-stereo", "trinocular", "lidar-3cam".
SensorRig make_named_rig(std::string_view name);

/// "none", "ghost_roadside:K", "ghost_onroad:K", "drift:SIGMA", "drop:P".
PerturbationModel parse_perturbation(std::string_view label);

/// FNV-1a of the canonical serialized config, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

ReportBundle run_experiment(const ExperimentConfig& config);

/// Thresholds of one rig per r, calibrated on the config's calibration ids.
std::vector<ThresholdTable> calibrate_rig(const ExperimentConfig& config, std::string_view rig);

/// Fleet calibration per r on the config's calibration worlds.
std::vector<FleetCalibration> calibrate_fleet_pipeline(const ExperimentConfig& config);

}  // namespace sdv
