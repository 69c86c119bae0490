#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sdv/bench/experiment.hpp"
#include "sdv/bench/report.hpp"
#include "sdv/fleet/validation.hpp"
#include "sdv/safety/evaluation.hpp"
#include "sdv/sim/frame.hpp"
#include "sdv/sim/scene.hpp"
#include "sdv/single/calibration.hpp"

namespace sdv {

/// Every artifact is a JSON envelope {"format","version","kind","data"}.
/// Numeric arrays are stored as "b64:<little-endian bytes>" strings, or as
/// "sidecar:<file>" references when a sidecar directory is configured and
/// the array exceeds the threshold.
struct BlobOptions {
  std::filesystem::path sidecar_dir;  // empty: always inline
  std::string sidecar_stem = "blob";
  std::size_t threshold = std::size_t{1} << 20;
};

inline constexpr int kFormatVersion = 1;

using PlanningCorpus = std::vector<PlanningScenario>;
using RegionSet = std::vector<ValidationRegion>;

/// Supported T: Scene, SensorFrame, ThresholdTable, FleetCalibration,
/// HeightGrid, RegionSet, PlanningCorpus, SafetyReport, ReportBundle,
/// ExperimentConfig.
template <class T>
std::string serialize(const T& value, const BlobOptions& blobs = {});

/// Throws ParseError on malformed input, unknown or missing fields, and a
/// wrong kind or version; InvariantError when the decoded value violates
/// its type invariants.
template <class T>
T parse(std::string_view text, const BlobOptions& blobs = {});

/// Writes `path` with sidecars next to it.
template <class T>
void write_artifact(const std::filesystem::path& path, const T& value,
                    std::size_t sidecar_threshold = std::size_t{1} << 20);

template <class T>
T read_artifact(const std::filesystem::path& path);

/// Kind tag stored in the envelope for T.
template <class T>
std::string_view artifact_kind();

}  // namespace sdv
