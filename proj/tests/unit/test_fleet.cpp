#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "sdv/core/errors.hpp"
#include "sdv/core/rng.hpp"
#include "sdv/fleet/corpus.hpp"
#include "sdv/fleet/validation.hpp"

using namespace sdv;

namespace {

ValidationRegion unit_region() { return {0, make_box({0.5, 0.5, 0.5}, 1.0, 1.0, 1.0, 0.0)}; }

HeightGrid flat_grid(double h) {
  HeightGrid g({0, 0}, 0.0, 0.1, 10, 10);
  for (std::size_t i = 0; i < g.cell_count(); ++i) g.raise(i, h);
  return g;
}

// Exceedance pattern of a single attacker on nodes {0,1,2}.
NodeVerdict single_attacker_oracle(bool d01, bool d02, bool d12) {
  if (!d01 && !d02 && !d12) return {};
  if (d01 && d02 && !d12) return {NodeVerdict::Kind::node, 0};
  if (d01 && !d02 && d12) return {NodeVerdict::Kind::node, 1};
  if (!d01 && d02 && d12) return {NodeVerdict::Kind::node, 2};
  return {NodeVerdict::Kind::inconclusive, 0};
}

}  // namespace

TEST_CASE("region proposals") {
  SceneConfig cfg;
  cfg.obstacle_count = 3;
  const Scene scene = generate_scene(cfg, 3);
  const auto regions = propose_regions(scene, {}, 0.5);
  REQUIRE(regions.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    CHECK(regions[k].region_id == k);
    for (const Vec2& corner : scene.obstacles[k].box.footprint())
      CHECK(regions[k].footprint.contains2d(corner, 1e-9));
  }
  const std::vector<OrientedBox> ghost{ghost_car({20, 0}, 0.0)};
  CHECK(propose_regions(scene, ghost, 0.5).size() == 4);
  CHECK_THROWS_AS(propose_regions(scene, {}, -1.0), DomainError);
}

TEST_CASE("mirroring") {
  const SymmetryPlane plane{Vec3::Zero(), Vec3::UnitY()};
  CHECK(mirror_scan(std::vector<Vec3>{}, plane).empty());
  const auto on = mirror_scan(std::vector<Vec3>{Vec3(1, 0, 2)}, plane);
  REQUIRE(on.size() == 2);
  CHECK(on[0] == on[1]);
  const auto off = mirror_scan(std::vector<Vec3>{Vec3(3, 0.7, 1)}, plane);
  CHECK((off[1] - Vec3(3, -0.7, 1)).norm() < 1e-12);
  CHECK_THROWS_AS(mirror_scan(std::vector<Vec3>{}, SymmetryPlane{Vec3::Zero(), Vec3::Zero()}),
                  DomainError);

  RandomStream rng(1, "mirror");
  std::vector<Vec3> pts;
  for (int k = 0; k < 200; ++k) pts.emplace_back(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(0, 2));
  const SymmetryPlane tilted{Vec3(1, 2, 0), Vec3(0.3, -0.8, 0)};
  const auto out = mirror_scan(pts, tilted);
  REQUIRE(out.size() == 2 * pts.size());
  for (std::size_t a = 0; a < pts.size(); a += 7) {
    for (std::size_t b = 0; b < pts.size(); b += 11) {
      REQUIRE(std::abs((out[pts.size() + a] - out[pts.size() + b]).norm() - (pts[a] - pts[b]).norm()) < 1e-9);
    }
  }
}

TEST_CASE("symmetry plane follows the long axis") {
  const ValidationRegion r{0, make_box({2, 3, 0.75}, 4.5, 1.8, 1.5, 0.0)};
  const SymmetryPlane p = symmetry_plane(r);
  CHECK(std::abs(p.normal.dot(Vec3::UnitX())) < 1e-12);
  CHECK(p.point == r.footprint.center);
}

TEST_CASE("height grid rasterization") {
  const auto one = rasterize_height_grid(std::vector<Vec3>{Vec3(0.05, 0.05, 1.3)}, unit_region(), 0.1);
  CHECK(one.cols() == 10);
  CHECK(one.rows() == 10);
  CHECK(one.occupied(0, 0));
  CHECK(one.height(0, 0) == 1.3);
  CHECK(one.occupied_count() == 1);
  CHECK(rasterize_height_grid(std::vector<Vec3>{}, unit_region(), 0.1).occupied_count() == 0);
  const auto two = rasterize_height_grid(
      std::vector<Vec3>{Vec3(0.55, 0.35, 0.4), Vec3(0.52, 0.31, 1.2)}, unit_region(), 0.1);
  CHECK(two.height(5, 3) == 1.2);
  CHECK_THROWS_AS(rasterize_height_grid(std::vector<Vec3>{}, unit_region(), 0.0), DomainError);

  // Max-fold oracle and permutation invariance on random clouds.
  RandomStream rng(2, "raster");
  const ValidationRegion rotated{1, make_box({4, -2, 0.7}, 4.6, 2.1, 1.4, 0.6)};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec3> pts;
    for (int k = 0; k < 300; ++k)
      pts.emplace_back(rng.uniform(1, 7), rng.uniform(-5, 1), rng.uniform(0, 2));
    const HeightGrid g = rasterize_height_grid(pts, rotated, 0.1);
    std::vector<Vec3> shuffled = pts;
    for (std::size_t i = shuffled.size() - 1; i > 0; --i) std::swap(shuffled[i], shuffled[rng.index(i + 1)]);
    REQUIRE(rasterize_height_grid(shuffled, rotated, 0.1) == g);
    std::vector<double> best(g.cell_count(), -1e9);
    const double c = std::cos(0.6), s = std::sin(0.6);
    for (const Vec3& p : pts) {
      const Vec2 d = p.head<2>() - rotated.footprint.center2d();
      const double lx = c * d.x() + s * d.y() + 2.3;
      const double ly = -s * d.x() + c * d.y() + 1.05;
      if (lx < 0 || ly < 0 || lx >= 4.6 || ly >= 2.1) continue;
      const auto i = g.index(static_cast<int>(lx / 0.1), static_cast<int>(ly / 0.1));
      best[i] = std::max(best[i], p.z());
    }
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
      REQUIRE(g.occupied(i) == (best[i] > -1e9));
      if (g.occupied(i)) REQUIRE(g.height(i) == best[i]);
    }
  }
}

TEST_CASE("grid distance") {
  const HeightGrid a = flat_grid(0.5);
  CHECK(grid_distance(a, a, 0.04) == 0.0);
  HeightGrid b = a;
  for (int k = 0; k < 5; ++k) b.raise(static_cast<std::size_t>(k * 7), 1.5);
  const GridComparison c = compare_grids(a, b, 0.04);
  CHECK(c.filtered_cells == 5);
  CHECK(c.distance == doctest::Approx(1.0));
  CHECK(grid_distance(a, b, 0.04, 6) == 0.0);
  CHECK_THROWS_AS(grid_distance(a, HeightGrid({0, 0}, 0.0, 0.1, 5, 5), 0.04), DomainError);

  RandomStream rng(3, "distance");
  for (int trial = 0; trial < 200; ++trial) {
    HeightGrid x({0, 0}, 0.0, 0.1, 6, 6), y({0, 0}, 0.0, 0.1, 6, 6);
    for (std::size_t i = 0; i < x.cell_count(); ++i) {
      if (rng.bernoulli(0.7)) x.raise(i, rng.uniform(0, 2));
      if (rng.bernoulli(0.7)) y.raise(i, rng.uniform(0, 2));
    }
    const double eps = rng.uniform(0, 0.3);
    const double d = grid_distance(x, y, eps);
    REQUIRE(d >= 0.0);
    REQUIRE(d == grid_distance(y, x, eps));
  }
}

TEST_CASE("grid distance grows with a cell already in G") {
  RandomStream rng(4, "monotone");
  for (int trial = 0; trial < 200; ++trial) {
    HeightGrid x({0, 0}, 0.0, 0.1, 5, 5), y({0, 0}, 0.0, 0.1, 5, 5);
    for (std::size_t i = 0; i < x.cell_count(); ++i) {
      x.raise(i, rng.uniform(0, 1));
      y.raise(i, rng.uniform(0, 1));
    }
    const double eps = 0.05;
    const std::size_t cell = rng.index(x.cell_count());
    if (std::abs(x.height(cell) - y.height(cell)) <= eps) continue;
    const double before = grid_distance(x, y, eps);
    // Push the discrepancy further apart.
    HeightGrid z = x;
    const double shift = rng.uniform(0.0, 1.0);
    std::vector<double> h = z.heights();
    h[cell] += x.height(cell) > y.height(cell) ? shift : -shift;
    z = HeightGrid::from_buffers(z.origin(), z.yaw(), z.resolution(), z.cols(), z.rows(), h, z.occupancy());
    REQUIRE(grid_distance(z, y, eps) >= before - 1e-12);
  }
}

TEST_CASE("fleet calibration") {
  const std::vector<double> ground{0.03, 0.05};
  const std::vector<double> clean{0.1, 0.3, 0.2, 0.6};
  const FleetCalibration c = calibrate_fleet(ground, clean, 0.0);
  CHECK(c.epsilon == doctest::Approx(0.04));
  CHECK(c.theta == 0.6);
  CHECK(c.ground_samples == 2);
  CHECK_THROWS_AS(calibrate_fleet(std::vector<double>{}, clean, 0.0), CalibrationError);
  CHECK_THROWS_AS(calibrate_fleet(ground, std::vector<double>{}, 0.0), CalibrationError);
  CHECK_THROWS_AS(calibrate_fleet(ground, std::vector<double>{0.0, 0.0}, 0.0), CalibrationError);
}

TEST_CASE("attacked node identification") {
  const PairDistances d{{{1, 2}, 1.2}, {{1, 3}, 1.1}, {{2, 3}, 0.3}};
  CHECK(identify_attacked_node(d, 0.8) == NodeVerdict{NodeVerdict::Kind::node, 1});
  CHECK(identify_attacked_node(d, 2.0).kind == NodeVerdict::Kind::none);
  const PairDistances only12{{{1, 2}, 1.2}, {{1, 3}, 0.1}, {{2, 3}, 0.3}};
  CHECK(identify_attacked_node(only12, 0.8).kind == NodeVerdict::Kind::inconclusive);
  CHECK_THROWS_AS(identify_attacked_node({{{1, 2}, 1.0}, {{1, 3}, 1.0}}, 0.5), DomainError);

  // All 2^3 exceedance patterns against the single-attacker oracle.
  for (unsigned mask = 0; mask < 8; ++mask) {
    const bool a = mask & 1, b = mask & 2, c = mask & 4;
    const PairDistances p{{{0, 1}, a ? 2.0 : 0.1}, {{0, 2}, b ? 2.0 : 0.1}, {{1, 2}, c ? 2.0 : 0.1}};
    CHECK(identify_attacked_node(p, 1.0) == single_attacker_oracle(a, b, c));
  }
  // Four nodes: only the star of the attacked node names it.
  PairDistances four;
  for (std::size_t u = 0; u < 4; ++u)
    for (std::size_t v = u + 1; v < 4; ++v) four[{u, v}] = (u == 2 || v == 2) ? 1.5 : 0.2;
  CHECK(identify_attacked_node(four, 1.0) == NodeVerdict{NodeVerdict::Kind::node, 2});
}

TEST_CASE("synthetic fleet: ghost regions stand out") {
  FleetConfig cfg;
  std::vector<double> clean, attacked;
  for (std::uint64_t i = 0; i < 6; ++i) {
    const FleetWorld w = make_fleet_world(cfg, derive_seed(10, i));
    CHECK(w.scans.size() == 3);
    for (const auto& r : validate_regions(w, cfg, 0.002))
      for (const auto& [pair, d] : r.distances) clean.push_back(d);
    const std::size_t victim = i % 3;
    const FleetWorld g = make_fleet_world(cfg, derive_seed(11, i), victim);
    REQUIRE(g.ghosts.size() == 1);
    const auto outcomes = validate_regions(g, cfg, 0.002);
    REQUIRE(outcomes.size() == g.scene.obstacles.size() + 1);
    CHECK(outcomes.back().ghost);
    for (const auto& [pair, d] : outcomes.back().distances)
      if (pair.first == victim || pair.second == victim) attacked.push_back(d);
  }
  std::sort(clean.begin(), clean.end());
  std::sort(attacked.begin(), attacked.end());
  CHECK(attacked[attacked.size() / 2] > clean[clean.size() / 2]);
  CHECK(make_fleet_world(cfg, 5, 1).scans == make_fleet_world(cfg, 5, 1).scans);
  CHECK_THROWS_AS(make_fleet_world(cfg, 5, 3), DomainError);
}
