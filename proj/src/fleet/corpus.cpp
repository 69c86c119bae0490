#include "sdv/fleet/corpus.hpp"

#include <string>

#include "sdv/core/errors.hpp"
#include "sdv/core/rng.hpp"
#include "sdv/sim/render.hpp"

namespace sdv {

FleetConfig::FleetConfig() {
  scene.obstacle_count = 3;
  scene.x_min = 14.0;
  scene.x_max = 30.0;
  // 64 beams at 0.1 deg azimuth over the forward 120 deg.
  lidar.pose = RigidTransform(Mat3::Identity(), Vec3(0.0, 0.0, 1.73));
  lidar.azimuth_min = -60.0 * 3.141592653589793 / 180.0;
  lidar.azimuth_step = 0.1 * 3.141592653589793 / 180.0;
  lidar.azimuth_count = 1200;
  lidar.range_noise = 0.02;
}

void FleetConfig::validate() const {
  scene.validate();
  lidar.validate();
  if (node_count < 3) throw ConfigError("fleet validation needs at least three nodes");
  if (!(node_x_max >= node_x_min)) throw ConfigError("node x range is empty");
  if (!(ghost_x_max > ghost_x_min)) throw ConfigError("ghost x range is empty");
  if (!(margin >= 0.0)) throw ConfigError("region margin must be >= 0");
  if (!(resolution > 0.0)) throw ConfigError("grid resolution must be > 0");
  if (ground_regions < 0) throw ConfigError("ground region count must be >= 0");
}

OrientedBox ghost_car(const Vec2& center, double yaw) {
  return make_box({center.x(), center.y(), 0.75}, 4.5, 1.8, 1.5, yaw);
}

namespace {

// Free car-sized spot in a lane, clear of every obstacle and prior pick.
// With `viewers`, the spot must also be in line of sight of every viewer.
OrientedBox free_spot(const Scene& scene, const std::vector<OrientedBox>& taken, double x_min,
                      double x_max, RandomStream& rng, const char* what,
                      const std::vector<Vec3>& viewers = {}) {
  const std::vector<OrientedBox> boxes = scene.boxes();
  for (int attempt = 0; attempt < 500; ++attempt) {
    const int lane = static_cast<int>(rng.index(static_cast<std::uint64_t>(scene.lanes.lane_count)));
    const Vec2 c(rng.uniform(x_min, x_max), scene.lanes.lane_center(lane) + rng.uniform(-0.3, 0.3));
    OrientedBox probe = ghost_car(c, rng.uniform(-0.05, 0.05));
    probe.length += 2.0;
    probe.width += 1.0;
    bool clear = true;
    for (const Obstacle& o : scene.obstacles) clear = clear && footprint_intersection(probe, o.box) == 0.0;
    for (const OrientedBox& t : taken) clear = clear && footprint_intersection(probe, t) == 0.0;
    const OrientedBox car = ghost_car(c, probe.yaw);
    for (const Vec3& eye : viewers) {
      if (!clear) break;
      const Vec3 to = car.center - eye;
      int hit = -2;
      const double t = cast_ray(eye, to.normalized(), boxes, to.norm(), &hit);
      clear = !(hit >= 0 && t < to.norm());
    }
    if (clear) return car;
  }
  throw GenerationError(std::string("no free spot for ") + what);
}

std::vector<Vec3> node_scan(std::span<const OrientedBox> boxes, const RigidTransform& pose,
                            const FleetConfig& config, std::uint64_t noise_seed) {
  LidarConfig lidar = config.lidar;
  lidar.pose = pose * config.lidar.pose;
  std::vector<Vec3> cloud = scan_lidar(boxes, lidar, noise_seed);
  for (Vec3& p : cloud) p = config.lidar.pose.apply(p);  // sensor -> vehicle frame
  return cloud;
}

std::vector<std::vector<Vec3>> world_clouds(const FleetWorld& world) {
  std::vector<std::vector<Vec3>> out;
  for (const NodeScan& s : world.scans) out.push_back(s.world_cloud());
  return out;
}

PairDistances pairwise(const std::vector<HeightGrid>& grids, double epsilon, std::size_t min_cells,
                       const std::vector<NodeScan>& scans) {
  PairDistances d;
  for (std::size_t a = 0; a < grids.size(); ++a) {
    for (std::size_t b = a + 1; b < grids.size(); ++b)
      d[{scans[a].node_id, scans[b].node_id}] = grid_distance(grids[a], grids[b], epsilon, min_cells);
  }
  return d;
}

}  // namespace

FleetWorld make_fleet_world(const FleetConfig& config, std::uint64_t seed,
                            std::optional<std::size_t> attacked_node) {
  config.validate();
  if (attacked_node && *attacked_node >= static_cast<std::size_t>(config.node_count))
    throw DomainError("attacked node " + std::to_string(*attacked_node) + " does not exist");

  // Layouts where the ghost cannot be placed in view of every node are
  // redrawn a bounded number of times.
  constexpr int kLayoutAttempts = 20;
  FleetWorld world;
  world.attacked_node = attacked_node;
  for (int attempt = 0;; ++attempt) {
    const std::uint64_t layout = derive_seed(seed, static_cast<std::uint64_t>(attempt));
    world.scene = generate_scene(config.scene, derive_seed(layout, "fleet-scene"));
    world.scans.clear();
    world.ghosts.clear();
    RandomStream rng(layout, "fleet-nodes");
    for (int j = 0; j < config.node_count; ++j) {
      const int lane = j % world.scene.lanes.lane_count;
      const Vec3 t(rng.uniform(config.node_x_min, config.node_x_max),
                   world.scene.lanes.lane_center(lane) + rng.uniform(-0.3, 0.3), 0.0);
      NodeScan scan;
      scan.node_id = static_cast<std::size_t>(j);
      scan.pose = RigidTransform::from_yaw(rng.uniform(-0.03, 0.03), t);
      world.scans.push_back(std::move(scan));
    }
    if (!attacked_node) break;
    std::vector<Vec3> eyes;
    for (const NodeScan& n : world.scans) eyes.push_back((n.pose * config.lidar.pose).translation());
    RandomStream ghost_rng(layout, "fleet-ghost");
    try {
      world.ghosts.push_back(free_spot(world.scene, {}, config.ghost_x_min, config.ghost_x_max,
                                       ghost_rng, "ghost car", eyes));
      break;
    } catch (const GenerationError&) {
      if (attempt + 1 == kLayoutAttempts) throw;
    }
  }

  std::vector<OrientedBox> boxes = world.scene.boxes();
  for (NodeScan& scan : world.scans) {
    // Single-return sensor: spoofed echoes replace whatever the victim's
    // rays would otherwise have hit.
    std::vector<OrientedBox> seen = boxes;
    if (attacked_node && scan.node_id == *attacked_node) seen.push_back(world.ghosts.front());
    scan.cloud = node_scan(seen, scan.pose, config, derive_seed(seed, 1000 + scan.node_id));
  }
  return world;
}

std::vector<RegionOutcome> validate_regions(const FleetWorld& world, const FleetConfig& config,
                                            double epsilon) {
  const std::vector<ValidationRegion> regions =
      propose_regions(world.scene, world.ghosts, config.margin);
  const auto clouds = world_clouds(world);
  std::vector<RegionOutcome> out;
  for (const ValidationRegion& region : regions) {
    const SymmetryPlane plane = symmetry_plane(region);
    std::vector<HeightGrid> grids;
    for (const auto& cloud : clouds) {
      const std::vector<Vec3> mirrored = mirror_scan(crop_to_region(cloud, region), plane);
      grids.push_back(rasterize_height_grid(mirrored, region, config.resolution));
    }
    RegionOutcome r;
    r.region_id = region.region_id;
    r.ghost = region.region_id >= world.scene.obstacles.size();
    r.distances = pairwise(grids, epsilon, config.min_cells, world.scans);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<double> ground_pair_samples(const FleetWorld& world, const FleetConfig& config,
                                        std::uint64_t seed) {
  RandomStream rng(seed, "fleet-ground");
  std::vector<OrientedBox> patches;
  for (int k = 0; k < config.ground_regions; ++k)
    patches.push_back(free_spot(world.scene, patches, config.ghost_x_min, config.ghost_x_max, rng,
                                "ground patch"));
  const auto clouds = world_clouds(world);
  std::vector<double> samples;
  for (const OrientedBox& patch : patches) {
    const ValidationRegion region{0, patch};
    std::vector<HeightGrid> grids;
    for (const auto& cloud : clouds)
      grids.push_back(rasterize_height_grid(crop_to_region(cloud, region), region, config.resolution));
    for (std::size_t a = 0; a < grids.size(); ++a) {
      for (std::size_t b = a + 1; b < grids.size(); ++b) {
        const GridComparison c = compare_grids(grids[a], grids[b], 0.0);
        if (c.joint_cells > 0) samples.push_back(c.distance);
      }
    }
  }
  return samples;
}

}  // namespace sdv
