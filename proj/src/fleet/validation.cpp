#include "sdv/fleet/validation.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "sdv/core/errors.hpp"
#include "sdv/single/calibration.hpp"

namespace sdv {

std::vector<Vec3> NodeScan::world_cloud() const {
  std::vector<Vec3> out;
  out.reserve(cloud.size());
  for (const Vec3& p : cloud) out.push_back(pose.apply(p));
  return out;
}

HeightGrid::HeightGrid(Vec2 origin, double yaw, double resolution, int cols, int rows)
    : origin_(std::move(origin)), yaw_(yaw), resolution_(resolution), cols_(cols), rows_(rows) {
  if (!(resolution > 0.0) || !std::isfinite(resolution))
    throw DomainError("grid resolution must be > 0");
  if (cols < 0 || rows < 0) throw DomainError("grid shape must be non-negative");
  heights_.assign(static_cast<std::size_t>(cols) * static_cast<std::size_t>(rows), 0.0);
  occupied_.assign(heights_.size(), 0);
}

std::size_t HeightGrid::occupied_count() const noexcept {
  return static_cast<std::size_t>(std::count(occupied_.begin(), occupied_.end(), 1));
}

void HeightGrid::raise(std::size_t i, double h) {
  if (!occupied_[i] || h > heights_[i]) heights_[i] = h;
  occupied_[i] = 1;
}

bool HeightGrid::same_layout(const HeightGrid& other) const noexcept {
  return origin_ == other.origin_ && yaw_ == other.yaw_ && resolution_ == other.resolution_ &&
         cols_ == other.cols_ && rows_ == other.rows_;
}

HeightGrid HeightGrid::from_buffers(Vec2 origin, double yaw, double resolution, int cols, int rows,
                                    std::vector<double> heights,
                                    std::vector<std::uint8_t> occupied) {
  HeightGrid g(std::move(origin), yaw, resolution, cols, rows);
  if (heights.size() != g.heights_.size() || occupied.size() != g.occupied_.size())
    throw InvariantError("grid buffers do not match the grid shape");
  g.heights_ = std::move(heights);
  g.occupied_ = std::move(occupied);
  g.validate();
  return g;
}

void HeightGrid::validate() const {
  if (!(resolution_ > 0.0)) throw InvariantError("grid resolution must be > 0");
  for (std::size_t i = 0; i < heights_.size(); ++i) {
    if (occupied_[i] > 1) throw InvariantError("grid occupancy must be 0 or 1");
    if (occupied_[i] && !std::isfinite(heights_[i]))
      throw InvariantError("occupied grid cell has a non-finite height");
  }
}

void FleetCalibration::validate() const {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw InvariantError("epsilon must be >= 0");
  if (!(theta > 0.0) || !std::isfinite(theta)) throw InvariantError("fleet theta must be > 0");
  if (!(r >= 0.0 && r <= 1.0)) throw InvariantError("false-alarm rate outside [0, 1]");
}

SymmetryPlane symmetry_plane(const ValidationRegion& region) {
  const OrientedBox& b = region.footprint;
  const double c = std::cos(b.yaw), s = std::sin(b.yaw);
  // Normal across the long axis.
  const Vec3 normal = b.length >= b.width ? Vec3(-s, c, 0.0) : Vec3(c, s, 0.0);
  return {b.center, normal};
}

std::vector<ValidationRegion> propose_regions(const Scene& world,
                                              std::span<const OrientedBox> ghosts, double margin) {
  if (!(margin >= 0.0)) throw DomainError("region margin must be >= 0");
  std::vector<ValidationRegion> regions;
  const auto add = [&](const OrientedBox& box) {
    OrientedBox fp = box;
    fp.length += 2.0 * margin;
    fp.width += 2.0 * margin;
    regions.push_back({regions.size(), fp});
  };
  for (const Obstacle& o : world.obstacles) add(o.box);
  for (const OrientedBox& g : ghosts) add(g);
  return regions;
}

std::vector<Vec3> mirror_scan(std::span<const Vec3> points, const SymmetryPlane& plane) {
  const double len = plane.normal.norm();
  if (!(len > 0.0)) throw DomainError("symmetry plane normal must be non-zero");
  const Vec3 n = plane.normal / len;
  std::vector<Vec3> out(points.begin(), points.end());
  out.reserve(2 * points.size());
  for (const Vec3& p : points) out.push_back(p - 2.0 * (p - plane.point).dot(n) * n);
  return out;
}

std::vector<Vec3> crop_to_region(std::span<const Vec3> points, const ValidationRegion& region) {
  std::vector<Vec3> out;
  for (const Vec3& p : points) {
    if (region.footprint.contains2d(p.head<2>())) out.push_back(p);
  }
  return out;
}

HeightGrid rasterize_height_grid(std::span<const Vec3> points, const ValidationRegion& region,
                                 double resolution) {
  if (!(resolution > 0.0)) throw DomainError("grid resolution must be > 0");
  const OrientedBox& b = region.footprint;
  const double c = std::cos(b.yaw), s = std::sin(b.yaw);
  const Vec2 half(0.5 * b.length, 0.5 * b.width);
  const Vec2 origin = b.center2d() - Vec2(c * half.x() - s * half.y(), s * half.x() + c * half.y());
  const int cols = static_cast<int>(std::ceil(b.length / resolution - 1e-9));
  const int rows = static_cast<int>(std::ceil(b.width / resolution - 1e-9));
  HeightGrid grid(origin, b.yaw, resolution, cols, rows);
  for (const Vec3& p : points) {
    const Vec2 d = p.head<2>() - origin;
    const double lx = c * d.x() + s * d.y();
    const double ly = -s * d.x() + c * d.y();
    const double col = std::floor(lx / resolution);
    const double row = std::floor(ly / resolution);
    if (col < 0 || row < 0 || col >= cols || row >= rows) continue;
    grid.raise(grid.index(static_cast<int>(col), static_cast<int>(row)), p.z());
  }
  return grid;
}

GridComparison compare_grids(const HeightGrid& a, const HeightGrid& b, double epsilon,
                             std::size_t min_cells) {
  if (!a.same_layout(b)) throw DomainError("height grids differ in layout");
  GridComparison out;
  double sum = 0.0;
  for (std::size_t i = 0; i < a.cell_count(); ++i) {
    if (!a.occupied(i) || !b.occupied(i)) continue;
    ++out.joint_cells;
    const double diff = std::abs(a.height(i) - b.height(i));
    if (diff > epsilon) {
      ++out.filtered_cells;
      sum += diff;
    }
  }
  if (out.filtered_cells > 0 && out.filtered_cells >= min_cells)
    out.distance = sum / static_cast<double>(out.filtered_cells);
  return out;
}

double grid_distance(const HeightGrid& a, const HeightGrid& b, double epsilon,
                     std::size_t min_cells) {
  return compare_grids(a, b, epsilon, min_cells).distance;
}

FleetCalibration calibrate_fleet(std::span<const double> ground_pair_samples,
                                 std::span<const double> region_samples, double r) {
  if (ground_pair_samples.empty()) throw CalibrationError("no ground-pair distance samples");
  if (region_samples.empty()) throw CalibrationError("no attack-free region distance samples");
  FleetCalibration cal;
  double sum = 0.0;
  for (double x : ground_pair_samples) sum += x;
  cal.epsilon = sum / static_cast<double>(ground_pair_samples.size());
  cal.theta = calibrate_threshold(region_samples, r);
  cal.r = r;
  cal.ground_samples = ground_pair_samples.size();
  cal.region_samples = region_samples.size();
  if (!(cal.theta > 0.0))
    throw CalibrationError("attack-free distances give a non-positive threshold");
  cal.validate();
  return cal;
}

NodeVerdict identify_attacked_node(const PairDistances& distances, double theta) {
  std::set<std::size_t> nodes;
  for (const auto& [pair, d] : distances) {
    if (pair.first >= pair.second) throw DomainError("node pair must be ordered (lo, hi)");
    nodes.insert(pair.first);
    nodes.insert(pair.second);
  }
  if (nodes.size() < 3) throw DomainError("node identification needs at least three nodes");
  std::set<NodePair> exceeded;
  for (auto a = nodes.begin(); a != nodes.end(); ++a) {
    for (auto b = std::next(a); b != nodes.end(); ++b) {
      const auto it = distances.find({*a, *b});
      if (it == distances.end())
        throw DomainError("missing distance for nodes " + std::to_string(*a) + "," +
                          std::to_string(*b));
      if (it->second > theta) exceeded.insert(it->first);
    }
  }
  if (exceeded.empty()) return {};
  for (std::size_t v : nodes) {
    std::set<NodePair> star;
    for (std::size_t u : nodes) {
      if (u != v) star.insert({std::min(u, v), std::max(u, v)});
    }
    if (star == exceeded) return {NodeVerdict::Kind::node, v};
  }
  return {NodeVerdict::Kind::inconclusive, 0};
}

}  // namespace sdv
