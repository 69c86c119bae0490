#include "sdv/safety/detections.hpp"

#include <algorithm>
#include <numeric>

#include "sdv/core/errors.hpp"
#include "sdv/core/rng.hpp"

namespace sdv {

std::vector<Detection> truth_detections(std::span<const Obstacle> obstacles, std::uint64_t seed) {
  RandomStream rng(seed, "truth-confidence");
  std::vector<Detection> out;
  for (std::size_t i = 0; i < obstacles.size(); ++i)
    out.push_back({obstacles[i], rng.uniform(0.5, 1.0), static_cast<int>(i)});
  return out;
}

PerturbationModel PerturbationModel::ghost_roadside(int k) {
  PerturbationModel m;
  m.kind = Kind::ghost_roadside;
  m.count = k;
  m.confidence_min = 0.6;
  m.confidence_max = 1.0;
  return m;
}

PerturbationModel PerturbationModel::ghost_onroad(int k) {
  PerturbationModel m;
  m.kind = Kind::ghost_onroad;
  m.count = k;
  m.confidence_min = 0.2;
  m.confidence_max = 0.6;
  return m;
}

PerturbationModel PerturbationModel::drift(double sigma) {
  PerturbationModel m;
  m.kind = Kind::drift;
  m.sigma = sigma;
  return m;
}

PerturbationModel PerturbationModel::drop(double p) {
  PerturbationModel m;
  m.kind = Kind::drop;
  m.probability = p;
  return m;
}

void PerturbationModel::validate() const {
  if (count < 0) throw ConfigError("ghost count must be >= 0");
  if (!(sigma >= 0.0)) throw ConfigError("drift sigma must be >= 0");
  if (!(probability >= 0.0 && probability <= 1.0)) throw ConfigError("drop probability must be in [0,1]");
  if (!(confidence_min >= 0.0 && confidence_min <= confidence_max && confidence_max <= 1.0))
    throw ConfigError("ghost confidence range must satisfy 0 <= min <= max <= 1");
}

namespace {

constexpr double kGhostLength = 4.5;
constexpr double kGhostWidth = 1.8;
constexpr double kGhostHeight = 1.5;

OrientedBox ghost_box(const Vec2& c, double yaw) {
  return make_box({c.x(), c.y(), 0.5 * kGhostHeight}, kGhostLength, kGhostWidth, kGhostHeight, yaw);
}

Detection ghost(const OrientedBox& box, double confidence) {
  Detection d;
  d.object.box = box;
  d.confidence = confidence;
  return d;
}

}  // namespace

std::vector<Detection> perturb_detections(std::span<const Detection> detections,
                                          const PerturbationModel& model, const LaneLayout& lanes,
                                          std::uint64_t seed) {
  model.validate();
  RandomStream rng(seed, "perturb");
  std::vector<Detection> out(detections.begin(), detections.end());
  using Kind = PerturbationModel::Kind;
  switch (model.kind) {
    case Kind::none: break;
    case Kind::drift:
      for (Detection& d : out) {
        d.object.box.center.x() += rng.normal(0.0, model.sigma);
        d.object.box.center.y() += rng.normal(0.0, model.sigma);
      }
      break;
    case Kind::drop: {
      std::vector<Detection> kept;
      for (const Detection& d : out)
        if (!rng.bernoulli(model.probability)) kept.push_back(d);
      out = std::move(kept);
      break;
    }
    case Kind::ghost_roadside:
      for (int k = 0; k < model.count; ++k) {
        const double x = rng.uniform(0.0, 40.0);
        const double beyond = rng.uniform(1.5, 5.0);
        const double y = rng.bernoulli(0.5) ? lanes.road_left() + beyond : lanes.road_right() - beyond;
        const double yaw = rng.uniform(-0.1, 0.1);
        out.push_back(ghost(ghost_box({x, y}, yaw),
                            rng.uniform(model.confidence_min, model.confidence_max)));
      }
      break;
    case Kind::ghost_onroad:
      for (int k = 0; k < model.count; ++k) {
        // Prefer a spot clear of existing detections; fall back to the last draw.
        OrientedBox box;
        for (int attempt = 0; attempt < 100; ++attempt) {
          const int lane = static_cast<int>(rng.index(static_cast<std::uint64_t>(lanes.lane_count)));
          box = ghost_box({rng.uniform(5.0, 30.0), lanes.lane_center(lane) + rng.uniform(-0.4, 0.4)},
                          rng.uniform(-0.05, 0.05));
          const bool clear = std::none_of(out.begin(), out.end(), [&](const Detection& d) {
            return footprint_intersection(box, d.object.box) > 0.0;
          });
          if (clear) break;
        }
        out.push_back(ghost(box, rng.uniform(model.confidence_min, model.confidence_max)));
      }
      break;
  }
  return out;
}

double average_precision(const std::vector<std::vector<Detection>>& detections,
                         const std::vector<std::vector<OrientedBox>>& truth, double iou_threshold) {
  if (detections.size() != truth.size()) throw DomainError("detection and truth scene counts differ");
  struct Ranked {
    double confidence;
    std::size_t scene, index;
  };
  std::vector<Ranked> ranked;
  std::size_t total_truth = 0;
  for (std::size_t s = 0; s < detections.size(); ++s) {
    total_truth += truth[s].size();
    for (std::size_t i = 0; i < detections[s].size(); ++i)
      ranked.push_back({detections[s][i].confidence, s, i});
  }
  if (total_truth == 0) return 0.0;
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Ranked& a, const Ranked& b) { return a.confidence > b.confidence; });

  std::vector<std::vector<bool>> used(truth.size());
  for (std::size_t s = 0; s < truth.size(); ++s) used[s].assign(truth[s].size(), false);
  std::vector<double> precision, recall;
  std::size_t tp = 0;
  for (std::size_t n = 0; n < ranked.size(); ++n) {
    const Ranked& r = ranked[n];
    const OrientedBox& box = detections[r.scene][r.index].object.box;
    double best = iou_threshold;
    std::size_t match = truth[r.scene].size();
    for (std::size_t t = 0; t < truth[r.scene].size(); ++t) {
      if (used[r.scene][t]) continue;
      const double iou = rotated_iou(box, truth[r.scene][t]);
      if (iou > best) {
        best = iou;
        match = t;
      }
    }
    if (match < truth[r.scene].size()) {
      used[r.scene][match] = true;
      ++tp;
    }
    precision.push_back(static_cast<double>(tp) / static_cast<double>(n + 1));
    recall.push_back(static_cast<double>(tp) / static_cast<double>(total_truth));
  }
  // Precision envelope from the right, then area under the step curve.
  for (std::size_t n = precision.size(); n-- > 1;)
    precision[n - 1] = std::max(precision[n - 1], precision[n]);
  double ap = 0.0, prev = 0.0;
  for (std::size_t n = 0; n < precision.size(); ++n) {
    ap += (recall[n] - prev) * precision[n];
    prev = recall[n];
  }
  return ap;
}

double average_precision(std::span<const Detection> detections, std::span<const OrientedBox> truth,
                         double iou_threshold) {
  const std::vector<std::vector<Detection>> d{{detections.begin(), detections.end()}};
  const std::vector<std::vector<OrientedBox>> t{{truth.begin(), truth.end()}};
  return average_precision(d, t, iou_threshold);
}

}  // namespace sdv
