#include "sdv/bench/experiment.hpp"

#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <set>

#include "sdv/bench/serialize.hpp"
#include "sdv/core/rng.hpp"
#include "sdv/fleet/corpus.hpp"
#include "sdv/safety/evaluation.hpp"
#include "sdv/sim/attack.hpp"
#include "sdv/sim/render.hpp"
#include "sdv/single/identification.hpp"

namespace sdv {

std::string_view to_string(Pipeline pipeline) noexcept {
  switch (pipeline) {
    case Pipeline::single_detect: return "single-detect";
    case Pipeline::single_identify: return "single-identify";
    case Pipeline::fleet: return "fleet";
    case Pipeline::safety: return "safety";
    default: return "decoupling";
  }
}

Pipeline parse_pipeline(std::string_view label) {
  for (Pipeline p : {Pipeline::single_detect, Pipeline::single_identify, Pipeline::fleet,
                     Pipeline::safety, Pipeline::decoupling})
    if (label == to_string(p)) return p;
  throw ConfigError("unknown pipeline '" + std::string(label) + "'");
}

SensorRig make_named_rig(std::string_view name) {
  if (name == "lidar-stereo") return make_lidar_stereo_rig();
  if (name == "trinocular") return make_trinocular_rig();
  if (name == "lidar-3cam") return make_identification_rig();
  throw ConfigError("unknown rig '" + std::string(name) + "'");
}

namespace {

double parse_number(std::string_view text, std::string_view label) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty())
    throw ConfigError("bad number in perturbation '" + std::string(label) + "'");
  return v;
}

}  // namespace

PerturbationModel parse_perturbation(std::string_view label) {
  if (label == "none") return PerturbationModel::none();
  const auto colon = label.find(':');
  if (colon == std::string_view::npos) throw ConfigError("unknown perturbation '" + std::string(label) + "'");
  const std::string_view kind = label.substr(0, colon);
  const double value = parse_number(label.substr(colon + 1), label);
  PerturbationModel m;
  if (kind == "ghost_roadside" || kind == "ghost_onroad") {
    if (value != std::floor(value) || value < 0.0 || value > 1000.0)
      throw ConfigError("ghost count must be a non-negative integer in '" + std::string(label) + "'");
    const int k = static_cast<int>(value);
    m = kind == "ghost_roadside" ? PerturbationModel::ghost_roadside(k) : PerturbationModel::ghost_onroad(k);
  } else if (kind == "drift") {
    m = PerturbationModel::drift(value);
  } else if (kind == "drop") {
    m = PerturbationModel::drop(value);
  } else {
    throw ConfigError("unknown perturbation '" + std::string(label) + "'");
  }
  m.validate();
  return m;
}

void ExperimentConfig::validate() const {
  if (corpus_size < 1) throw ConfigError("corpus size must be >= 1");
  if (calibration_size < 1) throw ConfigError("calibration size must be >= 1");
  if (heldout_size < 0) throw ConfigError("held-out size must be >= 0");
  if (r_values.empty()) throw ConfigError("r list must not be empty");
  for (double r : r_values)
    if (!(r >= 0.0 && r <= 1.0)) throw ConfigError("every r must lie in [0,1]");
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise sigma must be >= 0");
  if (!output_dir.empty()) {
    // The nearest existing ancestor must be a writable directory.
    std::error_code ec;
    std::filesystem::path p = std::filesystem::absolute(output_dir, ec);
    while (!p.empty() && !std::filesystem::exists(p, ec) && p != p.parent_path()) p = p.parent_path();
    if (!std::filesystem::is_directory(p, ec) || ::access(p.c_str(), W_OK) != 0)
      throw ConfigError("output directory '" + output_dir + "' is not writable");
  }
  switch (pipeline) {
    case Pipeline::single_detect:
      if (rigs.empty()) throw ConfigError("rig list must not be empty");
      for (const auto& rig : rigs) make_named_rig(rig);
      if (bogus_widths.empty() || facula_radii.empty())
        throw ConfigError("sweep lists must not be empty");
      for (double w : bogus_widths)
        if (!(w > 0.0)) throw ConfigError("bogus widths must be > 0");
      for (double radius : facula_radii) {
        FaculaSpec f;
        f.radius_min = f.radius_max = radius;
        AttackSpec{LidarSpoofSpec{}, f}.validate(CameraModel{}.image_width, CameraModel{}.image_height);
      }
      break;
    case Pipeline::safety:
    case Pipeline::decoupling:
      if (perturbations.empty()) throw ConfigError("perturbation list must not be empty");
      for (const auto& p : perturbations) parse_perturbation(p);
      break;
    default: break;
  }
}

std::string config_hash(const ExperimentConfig& config) {
  ExperimentConfig canonical = config;
  canonical.output_dir.clear();  // where results go does not change them
  const std::uint64_t h = label_hash(serialize(canonical));
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 0; i < 16; ++i) out[static_cast<std::size_t>(15 - i)] = kHex[(h >> (4 * i)) & 0xF];
  return out;
}

namespace {

struct IdSets {
  std::uint64_t calibration_begin, heldout_begin, evaluation_begin, end;
};

IdSets id_sets(const ExperimentConfig& c) {
  const auto cal = static_cast<std::uint64_t>(c.calibration_size);
  const auto held = static_cast<std::uint64_t>(c.heldout_size);
  return {0, cal, cal + held, cal + held + static_cast<std::uint64_t>(c.corpus_size)};
}

std::vector<std::uint64_t> iota(std::uint64_t begin, std::uint64_t end) {
  std::vector<std::uint64_t> v;
  for (std::uint64_t i = begin; i < end; ++i) v.push_back(i);
  return v;
}

std::string case_label(const SensorStateVector& s) {
  std::string out;
  for (std::size_t i : s.attacked()) out += (out.empty() ? "S" : "+S") + std::to_string(i);
  return out.empty() ? "clean" : out;
}

std::string fmt_r(double r) {
  std::string s = std::to_string(r);
  while (s.size() > 1 && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

// Rendered frame for one id; scenes are shared across cases of a rig.
class FrameSource {
 public:
  FrameSource(const ExperimentConfig& config, std::string_view rig_name)
      : rig_(make_named_rig(rig_name)),
        sigma_(config.noise_sigma),
        scene_seed_(derive_seed(config.seed, "scenes:" + std::string(rig_name))) {
    // Identification recursion reads reduced references down to S_3.
    for (std::size_t k = 3; k + 1 < rig_.reference(); ++k) options_.extra_references.push_back(k);
  }

  const SensorRig& rig() const noexcept { return rig_; }

  SensorFrame frame(std::uint64_t id) const {
    RenderOptions opts = options_;
    opts.frame_id = id;
    return render_frame(generate_scene(SceneConfig{}, derive_seed(scene_seed_, id)), rig_, sigma_, opts);
  }

  /// References whose triples are scored: the rig reference, then the
  /// reduced references used by identification.
  std::vector<std::size_t> references() const {
    std::vector<std::size_t> refs{rig_.reference()};
    for (auto it = options_.extra_references.rbegin(); it != options_.extra_references.rend(); ++it)
      refs.push_back(*it);
    return refs;
  }

 private:
  SensorRig rig_;
  double sigma_;
  std::uint64_t scene_seed_;
  RenderOptions options_;
};

// Disparity errors per reference for one frame.
using FrameErrors = std::map<std::size_t, std::vector<double>>;

FrameErrors frame_errors(const SensorFrame& frame, const std::vector<std::size_t>& refs) {
  FrameErrors out;
  for (std::size_t k : refs) out[k] = disparity_errors(frame, k);
  return out;
}

ErrorStateVector error_state(const FrameErrors& errors, std::size_t reference, const ThresholdTable& table) {
  const auto triples = ErrorStateVector::triples(reference);
  const auto& e = errors.at(reference);
  std::vector<bool> bits;
  for (std::size_t p = 0; p < triples.size(); ++p) bits.push_back(detect_attack(e[p], table.at(triples[p])));
  return ErrorStateVector(reference, std::move(bits));
}

bool detected(const FrameErrors& errors, std::size_t reference, const ThresholdTable& table) {
  return !error_state(errors, reference, table).all_zero();
}

std::vector<ThresholdTable> calibrate(const FrameSource& source, const IdSets& ids,
                                      const std::vector<double>& r_values) {
  std::map<Triple, std::vector<double>> samples;
  const auto refs = source.references();
  for (std::uint64_t id = ids.calibration_begin; id < ids.heldout_begin; ++id) {
    const FrameErrors errors = frame_errors(source.frame(id), refs);
    for (const auto& [k, e] : errors) {
      const auto triples = ErrorStateVector::triples(k);
      for (std::size_t p = 0; p < triples.size(); ++p) samples[triples[p]].push_back(e[p]);
    }
  }
  std::vector<ThresholdTable> tables;
  for (double r : r_values) tables.push_back(calibrate_thresholds(samples, r));
  return tables;
}

std::vector<SensorStateVector> all_attack_cases(std::size_t sensors) {
  std::vector<SensorStateVector> out;
  for (std::size_t mask = 1; mask < (std::size_t{1} << sensors); ++mask) {
    SensorStateVector s(sensors);
    for (std::size_t i = 0; i < sensors; ++i)
      if (mask >> i & 1) s.set(i);
    out.push_back(s);
  }
  return out;
}

void add_threshold_rows(ReportBundle& b, const std::string& rig, const std::vector<ThresholdTable>& tables,
                        std::uint64_t seed) {
  for (const ThresholdTable& t : tables)
    for (const auto& [triple, entry] : t.entries())
      b.rows.push_back({"threshold", rig, "r", t.r(), "theta(" + triple.to_string() + ")", entry.theta, seed});
}

// Held-out false-alarm rows and the held-out clean error samples.
std::vector<double> add_false_alarm_rows(ReportBundle& b, const std::string& rig, const FrameSource& source,
                                         const IdSets& ids, const std::vector<ThresholdTable>& tables,
                                         std::uint64_t seed) {
  std::vector<std::size_t> alarms(tables.size(), 0);
  std::vector<double> clean;
  const std::size_t ref = source.rig().reference();
  for (std::uint64_t id = ids.heldout_begin; id < ids.evaluation_begin; ++id) {
    const FrameErrors errors = frame_errors(source.frame(id), {ref});
    clean.insert(clean.end(), errors.at(ref).begin(), errors.at(ref).end());
    for (std::size_t t = 0; t < tables.size(); ++t) alarms[t] += detected(errors, ref, tables[t]);
  }
  const double n = static_cast<double>(ids.evaluation_begin - ids.heldout_begin);
  if (n > 0)
    for (std::size_t t = 0; t < tables.size(); ++t)
      b.rows.push_back({"false_alarm", rig + ":clean", "r", tables[t].r(), "false_alarm_rate",
                        static_cast<double>(alarms[t]) / n, seed});
  return clean;
}

template <class Fn>
auto run_case(const std::string& name, Fn&& fn) {
  try {
    return fn();
  } catch (const ExperimentError&) {
    throw;
  } catch (const std::exception& e) {
    throw ExperimentError(name, e.what());
  }
}

void run_single_detect(const ExperimentConfig& c, ReportBundle& b) {
  const IdSets ids = id_sets(c);
  for (const std::string& rig : c.rigs) {
    run_case(rig, [&] {
      const FrameSource source(c, rig);
      const std::uint64_t cal_seed = derive_seed(c.seed, "scenes:" + rig);
      const auto tables = calibrate(source, ids, c.r_values);
      add_threshold_rows(b, rig, tables, cal_seed);
      const auto clean = add_false_alarm_rows(b, rig, source, ids, tables, cal_seed);

      const std::size_t ref = source.rig().reference();
      const auto cases = all_attack_cases(source.rig().sensor_count());
      const bool has_lidar = source.rig().lidar.has_value();
      const std::size_t swept_camera = source.rig().first_camera();
      // hits[case][r]; sweep hits[value][r].
      std::vector<std::vector<std::size_t>> hits(cases.size(), std::vector<std::size_t>(c.r_values.size()));
      std::vector<std::vector<std::size_t>> width_hits(c.bogus_widths.size(), std::vector<std::size_t>(c.r_values.size()));
      std::vector<std::vector<std::size_t>> radius_hits(c.facula_radii.size(), std::vector<std::size_t>(c.r_values.size()));
      std::vector<double> attacked;
      std::vector<std::uint64_t> case_seeds;
      for (const auto& s : cases) case_seeds.push_back(derive_seed(c.seed, "attack:" + rig + ":" + case_label(s)));
      const std::uint64_t width_seed = derive_seed(c.seed, "sweep-width:" + rig);
      const std::uint64_t radius_seed = derive_seed(c.seed, "sweep-radius:" + rig);

      auto score = [&](const SensorFrame& f, std::vector<std::size_t>& row, std::vector<double>* keep) {
        const FrameErrors errors = frame_errors(f, {ref});
        if (keep) keep->insert(keep->end(), errors.at(ref).begin(), errors.at(ref).end());
        for (std::size_t t = 0; t < tables.size(); ++t) row[t] += detected(errors, ref, tables[t]);
      };

      for (std::uint64_t id = ids.evaluation_begin; id < ids.end; ++id) {
        const SensorFrame base = source.frame(id);
        for (std::size_t k = 0; k < cases.size(); ++k)
          score(apply_attacks(base, cases[k], AttackSpec{}, derive_seed(case_seeds[k], id)), hits[k], &attacked);
        if (has_lidar) {
          for (std::size_t w = 0; w < c.bogus_widths.size(); ++w) {
            AttackSpec spec;
            spec.lidar.width = c.bogus_widths[w];
            score(inject_lidar_attack(base, spec, derive_seed(width_seed, id)), width_hits[w], nullptr);
          }
        }
        for (std::size_t q = 0; q < c.facula_radii.size(); ++q) {
          AttackSpec spec;
          spec.facula.radius_min = spec.facula.radius_max = c.facula_radii[q];
          score(inject_camera_attack(base, swept_camera, spec, derive_seed(radius_seed, id)), radius_hits[q], nullptr);
        }
      }
      const double n = static_cast<double>(c.corpus_size);
      for (std::size_t k = 0; k < cases.size(); ++k)
        for (std::size_t t = 0; t < tables.size(); ++t)
          b.rows.push_back({"detection", rig + ":" + case_label(cases[k]), "r", c.r_values[t],
                            "detection_rate", static_cast<double>(hits[k][t]) / n, case_seeds[k]});
      for (std::size_t t = 0; t < tables.size(); ++t) {
        if (has_lidar)
          for (std::size_t w = 0; w < c.bogus_widths.size(); ++w)
            b.rows.push_back({"sensitivity", rig + ":bogus_width@r=" + fmt_r(c.r_values[t]), "width_m",
                              c.bogus_widths[w], "detection_rate",
                              static_cast<double>(width_hits[w][t]) / n, width_seed});
        for (std::size_t q = 0; q < c.facula_radii.size(); ++q)
          b.rows.push_back({"sensitivity", rig + ":facula_radius@r=" + fmt_r(c.r_values[t]), "radius_px",
                            c.facula_radii[q], "detection_rate",
                            static_cast<double>(radius_hits[q][t]) / n, radius_seed});
      }
      b.samples.push_back({rig + " clean error", clean});
      b.samples.push_back({rig + " attacked error", attacked});
      return 0;
    });
  }
}

void run_single_identify(const ExperimentConfig& c, ReportBundle& b) {
  const std::string rig = "lidar-3cam";
  run_case(rig, [&] {
    const IdSets ids = id_sets(c);
    const FrameSource source(c, rig);
    const std::uint64_t cal_seed = derive_seed(c.seed, "scenes:" + rig);
    const auto tables = calibrate(source, ids, c.r_values);
    add_threshold_rows(b, rig, tables, cal_seed);
    add_false_alarm_rows(b, rig, source, ids, tables, cal_seed);

    const std::size_t n_sensors = source.rig().sensor_count();
    const auto refs = source.references();
    std::vector<SensorStateVector> cases;
    for (std::size_t i = 0; i < n_sensors; ++i) {
      SensorStateVector s(n_sensors);
      s.set(i);
      cases.push_back(s);
    }
    struct Counts { std::size_t detected = 0, identified = 0, inconclusive = 0; };
    std::vector<std::vector<Counts>> counts(cases.size(), std::vector<Counts>(tables.size()));
    std::vector<std::uint64_t> case_seeds;
    for (const auto& s : cases) case_seeds.push_back(derive_seed(c.seed, "attack:" + rig + ":" + case_label(s)));

    for (std::uint64_t id = ids.evaluation_begin; id < ids.end; ++id) {
      const SensorFrame base = source.frame(id);
      for (std::size_t k = 0; k < cases.size(); ++k) {
        const SensorFrame f = apply_attacks(base, cases[k], AttackSpec{}, derive_seed(case_seeds[k], id));
        const FrameErrors errors = frame_errors(f, refs);
        for (std::size_t t = 0; t < tables.size(); ++t) {
          const ErrorStateProvider provider = [&](std::size_t m) { return error_state(errors, m - 1, tables[t]); };
          const IdentificationResult r = identify_attacked(provider, n_sensors);
          Counts& ct = counts[k][t];
          ct.detected += !error_state(errors, n_sensors - 1, tables[t]).all_zero();
          ct.identified += r.identified == cases[k];
          ct.inconclusive += r.inconclusive;
        }
      }
    }
    const double n = static_cast<double>(c.corpus_size);
    for (std::size_t k = 0; k < cases.size(); ++k) {
      for (std::size_t t = 0; t < tables.size(); ++t) {
        const std::string name = rig + ":" + case_label(cases[k]);
        const Counts& ct = counts[k][t];
        b.rows.push_back({"identification", name, "r", c.r_values[t], "detection_rate", ct.detected / n, case_seeds[k]});
        b.rows.push_back({"identification", name, "r", c.r_values[t], "identification_rate", ct.identified / n, case_seeds[k]});
        b.rows.push_back({"identification", name, "r", c.r_values[t], "inconclusive_rate", ct.inconclusive / n, case_seeds[k]});
      }
    }
    return 0;
  });
}

double lower_quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  return v[static_cast<std::size_t>(q * static_cast<double>(v.size() - 1))];
}

struct FleetCalibrationData {
  std::vector<double> ground;
  std::vector<double> clean;
  double epsilon = 0.0;
};

FleetCalibrationData fleet_calibration_data(const ExperimentConfig& c, const FleetConfig& fc,
                                            std::uint64_t world_seed) {
  const IdSets ids = id_sets(c);
  FleetCalibrationData d;
  std::vector<FleetWorld> worlds;
  for (std::uint64_t id = ids.calibration_begin; id < ids.heldout_begin; ++id) {
    worlds.push_back(make_fleet_world(fc, derive_seed(world_seed, id)));
    const auto g = ground_pair_samples(worlds.back(), fc, derive_seed(derive_seed(world_seed, "ground"), id));
    d.ground.insert(d.ground.end(), g.begin(), g.end());
  }
  if (d.ground.empty()) throw CalibrationError("no ground-pair distance samples");
  for (double x : d.ground) d.epsilon += x;
  d.epsilon /= static_cast<double>(d.ground.size());
  for (const FleetWorld& w : worlds)
    for (const RegionOutcome& r : validate_regions(w, fc, d.epsilon))
      for (const auto& [pair, dist] : r.distances) d.clean.push_back(dist);
  return d;
}

void run_fleet(const ExperimentConfig& c, ReportBundle& b) {
  run_case("fleet", [&] {
    const IdSets ids = id_sets(c);
    const FleetConfig fc;
    const std::uint64_t world_seed = derive_seed(c.seed, "fleet-worlds");
    const FleetCalibrationData cal = fleet_calibration_data(c, fc, world_seed);
    std::vector<FleetCalibration> fcal;
    for (double r : c.r_values) fcal.push_back(calibrate_fleet(cal.ground, cal.clean, r));
    for (const FleetCalibration& f : fcal) {
      b.rows.push_back({"fleet_threshold", "calibration", "r", f.r, "theta", f.theta, world_seed});
      b.rows.push_back({"fleet_threshold", "calibration", "r", f.r, "epsilon", f.epsilon, world_seed});
    }

    // Held-out attack-free worlds: a region alarms when any pair exceeds theta.
    std::vector<std::size_t> alarms(fcal.size(), 0);
    std::size_t clean_regions = 0;
    for (std::uint64_t id = ids.heldout_begin; id < ids.evaluation_begin; ++id) {
      const FleetWorld w = make_fleet_world(fc, derive_seed(world_seed, id));
      for (const RegionOutcome& r : validate_regions(w, fc, cal.epsilon)) {
        ++clean_regions;
        for (std::size_t t = 0; t < fcal.size(); ++t)
          alarms[t] += identify_attacked_node(r.distances, fcal[t].theta).kind != NodeVerdict::Kind::none;
      }
    }
    if (clean_regions > 0)
      for (std::size_t t = 0; t < fcal.size(); ++t)
        b.rows.push_back({"fleet", "clean", "r", fcal[t].r, "false_alarm_rate",
                          static_cast<double>(alarms[t]) / static_cast<double>(clean_regions), world_seed});

    std::vector<std::size_t> detected(fcal.size(), 0), identified(fcal.size(), 0);
    std::size_t ghost_regions = 0;
    std::vector<double> attacked;
    for (std::uint64_t id = ids.evaluation_begin; id < ids.end; ++id) {
      const std::size_t victim = id % static_cast<std::uint64_t>(fc.node_count);
      const FleetWorld w = make_fleet_world(fc, derive_seed(world_seed, id), victim);
      for (const RegionOutcome& r : validate_regions(w, fc, cal.epsilon)) {
        if (!r.ghost) continue;
        ++ghost_regions;
        for (const auto& [pair, dist] : r.distances)
          if (pair.first == victim || pair.second == victim) attacked.push_back(dist);
        for (std::size_t t = 0; t < fcal.size(); ++t) {
          const NodeVerdict v = identify_attacked_node(r.distances, fcal[t].theta);
          detected[t] += v.kind != NodeVerdict::Kind::none;
          identified[t] += v.kind == NodeVerdict::Kind::node && v.node == victim;
        }
      }
    }
    const double n = static_cast<double>(std::max<std::size_t>(ghost_regions, 1));
    for (std::size_t t = 0; t < fcal.size(); ++t) {
      b.rows.push_back({"fleet", "ghost", "r", fcal[t].r, "detection_rate", detected[t] / n, world_seed});
      b.rows.push_back({"fleet", "ghost", "r", fcal[t].r, "identification_rate", identified[t] / n, world_seed});
    }
    const double q25 = lower_quantile(cal.clean, 0.25), q75 = lower_quantile(cal.clean, 0.75);
    b.rows.push_back({"fleet_summary", "clean", "-", 0.0, "median", lower_quantile(cal.clean, 0.5), world_seed});
    b.rows.push_back({"fleet_summary", "clean", "-", 0.0, "iqr", q75 - q25, world_seed});
    b.rows.push_back({"fleet_summary", "ghost", "-", 0.0, "median", lower_quantile(attacked, 0.5), world_seed});
    b.rows.push_back({"fleet_summary", "ghost", "-", 0.0, "regions", static_cast<double>(ghost_regions), world_seed});
    b.samples.push_back({"fleet clean distance", cal.clean});
    b.samples.push_back({"fleet attacked distance", attacked});
    return 0;
  });
}

void add_safety_rows(ReportBundle& b, const std::string& name, const DecouplingResult& r, std::uint64_t seed) {
  const SafetyReport& s = r.report;
  b.rows.push_back({"safety", name, "-", 0.0, "k_dts", static_cast<double>(s.k_dts), seed});
  b.rows.push_back({"safety", name, "-", 0.0, "k_trj", static_cast<double>(s.k_trj), seed});
  b.rows.push_back({"safety", name, "-", 0.0, "k_cls", static_cast<double>(s.k_cls), seed});
  b.rows.push_back({"safety", name, "-", 0.0, "m_suc", s.m_suc, seed});
  b.rows.push_back({"safety", name, "-", 0.0, "m_cls", s.m_cls, seed});
  b.rows.push_back({"safety", name, "-", 0.0, "m_saf", s.m_saf, seed});
  b.rows.push_back({"safety", name, "-", 0.0, "ap", r.ap, seed});
}

void run_safety(const ExperimentConfig& c, ReportBundle& b, bool decoupling) {
  SafetyCorpusConfig sc;
  sc.scenarios = c.corpus_size;
  const std::uint64_t corpus_seed = derive_seed(c.seed, "safety-corpus");
  const std::uint64_t detection_seed = derive_seed(c.seed, "safety-detections");
  const auto corpus = run_case("safety-corpus", [&] { return generate_planning_corpus(sc, corpus_seed); });
  std::vector<std::string> models = c.perturbations;
  if (decoupling) models = {"none", "ghost_roadside:3", "ghost_onroad:1"};
  std::map<std::string, DecouplingResult> results;
  for (const std::string& m : models) {
    results[m] = run_case(m, [&] { return evaluate_perturbation(corpus, parse_perturbation(m), detection_seed); });
    add_safety_rows(b, m, results[m], detection_seed);
  }
  if (decoupling) {
    const DecouplingResult& base = results.at("none");
    for (const std::string& m : {std::string("ghost_roadside:3"), std::string("ghost_onroad:1")}) {
      b.rows.push_back({"decoupling", m, "-", 0.0, "delta_ap_points", 100.0 * (results[m].ap - base.ap), detection_seed});
      b.rows.push_back({"decoupling", m, "-", 0.0, "delta_m_saf_points",
                        100.0 * (results[m].report.m_saf - base.report.m_saf), detection_seed});
    }
  }
}

}  // namespace

std::vector<ThresholdTable> calibrate_rig(const ExperimentConfig& config, std::string_view rig) {
  config.validate();
  const FrameSource source(config, rig);
  return calibrate(source, id_sets(config), config.r_values);
}

std::vector<FleetCalibration> calibrate_fleet_pipeline(const ExperimentConfig& config) {
  config.validate();
  const FleetConfig fc;
  const FleetCalibrationData cal = fleet_calibration_data(config, fc, derive_seed(config.seed, "fleet-worlds"));
  std::vector<FleetCalibration> out;
  for (double r : config.r_values) out.push_back(calibrate_fleet(cal.ground, cal.clean, r));
  return out;
}

ReportBundle run_experiment(const ExperimentConfig& config) {
  config.validate();
  ReportBundle b;
  const IdSets ids = id_sets(config);
  b.provenance.config_hash = config_hash(config);
  b.provenance.seed = config.seed;
  b.provenance.version = std::string(kArtifactVersion);
  if (config.pipeline != Pipeline::safety && config.pipeline != Pipeline::decoupling) {
    b.provenance.calibration_ids = iota(ids.calibration_begin, ids.heldout_begin);
    b.provenance.heldout_ids = iota(ids.heldout_begin, ids.evaluation_begin);
    b.provenance.evaluation_ids = iota(ids.evaluation_begin, ids.end);
  } else {
    b.provenance.evaluation_ids = iota(0, static_cast<std::uint64_t>(config.corpus_size));
  }
  switch (config.pipeline) {
    case Pipeline::single_detect: run_single_detect(config, b); break;
    case Pipeline::single_identify: run_single_identify(config, b); break;
    case Pipeline::fleet: run_fleet(config, b); break;
    case Pipeline::safety: run_safety(config, b, false); break;
    case Pipeline::decoupling: run_safety(config, b, true); break;
  }
  b.validate();
  return b;
}

}  // namespace sdv
