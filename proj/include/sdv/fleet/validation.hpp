#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "sdv/core/geometry.hpp"
#include "sdv/sim/scene.hpp"

namespace sdv {

/// One vehicle's LiDAR scan in its own frame; `pose` maps vehicle to world.
struct NodeScan {
  std::size_t node_id = 0;
  RigidTransform pose;
  std::vector<Vec3> cloud;

  std::vector<Vec3> world_cloud() const;
  bool operator==(const NodeScan&) const = default;
};

struct ValidationRegion {
  std::size_t region_id = 0;
  OrientedBox footprint;  // world frame
  bool operator==(const ValidationRegion&) const = default;
};

/// Max-height raster in a region's local frame: x along the footprint
/// length, y along its width, origin at the rear-right corner.
class HeightGrid {
 public:
  HeightGrid() = default;
  HeightGrid(Vec2 origin, double yaw, double resolution, int cols, int rows);

  const Vec2& origin() const noexcept { return origin_; }
  double yaw() const noexcept { return yaw_; }
  double resolution() const noexcept { return resolution_; }
  int cols() const noexcept { return cols_; }
  int rows() const noexcept { return rows_; }
  std::size_t cell_count() const noexcept { return heights_.size(); }
  std::size_t index(int col, int row) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(col);
  }
  bool occupied(std::size_t i) const noexcept { return occupied_[i] != 0; }
  double height(std::size_t i) const noexcept { return heights_[i]; }
  bool occupied(int col, int row) const noexcept { return occupied(index(col, row)); }
  double height(int col, int row) const noexcept { return height(index(col, row)); }
  std::size_t occupied_count() const noexcept;
  /// Raises the cell to at least `h` and marks it occupied.
  void raise(std::size_t i, double h);
  bool same_layout(const HeightGrid& other) const noexcept;
  const std::vector<double>& heights() const noexcept { return heights_; }
  const std::vector<std::uint8_t>& occupancy() const noexcept { return occupied_; }

  /// Rebuilds from raw buffers; throws InvariantError on inconsistent data.
  static HeightGrid from_buffers(Vec2 origin, double yaw, double resolution, int cols, int rows,
                                 std::vector<double> heights, std::vector<std::uint8_t> occupied);
  void validate() const;
  bool operator==(const HeightGrid&) const = default;

 private:
  Vec2 origin_ = Vec2::Zero();
  double yaw_ = 0.0;
  double resolution_ = 0.1;
  int cols_ = 0;
  int rows_ = 0;
  std::vector<double> heights_;
  std::vector<std::uint8_t> occupied_;
};

struct FleetCalibration {
  double epsilon = 0.0;  // meters
  double theta = 0.0;    // meters
  double r = 0.0;
  std::size_t ground_samples = 0;
  std::size_t region_samples = 0;
  /// Throws InvariantError unless epsilon >= 0, theta > 0, r in [0, 1].
  void validate() const;
  bool operator==(const FleetCalibration&) const = default;
};

/// Vertical plane through `point` with horizontal `normal`.
struct SymmetryPlane {
  Vec3 point = Vec3::Zero();
  Vec3 normal = Vec3::UnitY();
};

/// Plane through the region center containing its long axis.
SymmetryPlane symmetry_plane(const ValidationRegion& region);

/// One region per obstacle (ids first) and per ghost box, footprints
/// inflated by `margin` on every side.
std::vector<ValidationRegion> propose_regions(const Scene& world,
                                              std::span<const OrientedBox> ghosts, double margin);

/// Input followed by its reflection. Throws DomainError on a zero normal.
std::vector<Vec3> mirror_scan(std::span<const Vec3> points, const SymmetryPlane& plane);

/// Points inside the region footprint.
std::vector<Vec3> crop_to_region(std::span<const Vec3> points, const ValidationRegion& region);

/// Grid covering the footprint; points outside it are ignored. Throws
/// DomainError unless resolution > 0.
HeightGrid rasterize_height_grid(std::span<const Vec3> points, const ValidationRegion& region,
                                 double resolution);

struct GridComparison {
  std::size_t joint_cells = 0;  // occupied in both grids
  std::size_t filtered_cells = 0;  // |G|
  double distance = 0.0;
};

/// Throws DomainError unless both grids share origin, yaw, resolution and
/// shape. Distance is 0 when |G| < min_cells.
GridComparison compare_grids(const HeightGrid& a, const HeightGrid& b, double epsilon,
                             std::size_t min_cells = 1);
double grid_distance(const HeightGrid& a, const HeightGrid& b, double epsilon,
                     std::size_t min_cells = 1);

/// Throws CalibrationError on empty samples or a non-positive threshold.
FleetCalibration calibrate_fleet(std::span<const double> ground_pair_samples,
                                 std::span<const double> region_samples, double r);

using NodePair = std::pair<std::size_t, std::size_t>;  // first < second
using PairDistances = std::map<NodePair, double>;

struct NodeVerdict {
  enum class Kind { none, node, inconclusive };
  Kind kind = Kind::none;
  std::size_t node = 0;  // meaningful for Kind::node
  bool operator==(const NodeVerdict&) const = default;
};

/// Single-attacker decoding of the exceedance pattern. Throws DomainError
/// with fewer than three nodes or a missing pair.
NodeVerdict identify_attacked_node(const PairDistances& distances, double theta);

}  // namespace sdv
