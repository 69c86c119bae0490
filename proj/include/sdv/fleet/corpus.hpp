#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "sdv/fleet/validation.hpp"
#include "sdv/sim/rig.hpp"
#include "sdv/sim/scene.hpp"

namespace sdv {

struct FleetConfig {
  int node_count = 3;
  SceneConfig scene;
  LidarConfig lidar;           // pose is the mount on the vehicle
  double node_x_min = -4.0;    // node positions along the road
  double node_x_max = 2.0;
  double ghost_x_min = 14.0;   // ghost car placement along the road
  double ghost_x_max = 30.0;
  double margin = 0.15;        // region inflation, meters
  double resolution = 0.1;     // grid cell size, meters
  std::size_t min_cells = 1;   // minimum |G| for a non-zero distance
  int ground_regions = 2;      // empty-ground regions per world for epsilon

  FleetConfig();
  void validate() const;
};

/// Static scene scanned by several vehicles, with optional ghost injection
/// into one node.
struct FleetWorld {
  Scene scene;
  std::vector<NodeScan> scans;
  std::vector<OrientedBox> ghosts;
  std::optional<std::size_t> attacked_node;
};

/// Ghost car footprint used for injected objects.
OrientedBox ghost_car(const Vec2& center, double yaw);

FleetWorld make_fleet_world(const FleetConfig& config, std::uint64_t seed,
                            std::optional<std::size_t> attacked_node = std::nullopt);

struct RegionOutcome {
  std::size_t region_id = 0;
  bool ghost = false;
  PairDistances distances;
};

/// Pairwise node distances for every proposed region: crop, mirror,
/// rasterize and compare with the epsilon filter.
std::vector<RegionOutcome> validate_regions(const FleetWorld& world, const FleetConfig& config,
                                            double epsilon);

/// Unfiltered distances between nodes over empty ground patches, used to
/// calibrate epsilon. Pairs without jointly occupied cells are skipped.
std::vector<double> ground_pair_samples(const FleetWorld& world, const FleetConfig& config,
                                        std::uint64_t seed);

}  // namespace sdv
