#pragma once

#include <cstddef>
#include <vector>

#include "sdv/core/disparity_map.hpp"
#include "sdv/core/geometry.hpp"
#include "sdv/sim/frame.hpp"

namespace sdv {

/// |a-b| > 3 px and |a-b| / min(a,b) > 5%. Throws DomainError unless both
/// are finite and > 0.
bool pixel_inconsistent(double a, double b);

/// Fraction of jointly valid pixels that are inconsistent. Throws
/// DomainError on a size mismatch and InsufficientOverlapError when no pixel
/// is valid in both maps.
double disparity_error(const DisparityMap& a, const DisparityMap& b);

/// Baseline of the reference pair (reference-1, reference); every map
/// compared against this reference is expressed at this baseline.
double reference_baseline(const SensorRig& rig, std::size_t reference);

/// Sparse LiDAR disparity map in the reference camera: each point is
/// projected with the nearest point winning, d = f * baseline / z.
DisparityMap project_lidar(const std::vector<Vec3>& cloud, const SensorRig& rig,
                           std::size_t reference, double baseline);

/// DM_{source,reference} ready for comparison: the LiDAR projection for
/// sensor 0 of a LiDAR rig, else the stereo estimate rescaled to the
/// reference-pair baseline.
DisparityMap comparison_map(const SensorFrame& frame, std::size_t source, std::size_t reference);

}  // namespace sdv
