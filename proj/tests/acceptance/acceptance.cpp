// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "artifact_generators.hpp"
#include "safety_oracles.hpp"
#include "sdv/bench/allocator.hpp"
#include "sdv/bench/experiment.hpp"
#include "sdv/bench/serialize.hpp"
#include "sdv/single/identification.hpp"

using namespace sdv;

namespace {

// Pinned tolerances and budgets.
constexpr double kIdentificationBudgetS = 1.0;
constexpr double kDetectionAtR05 = 0.95;
constexpr double kDetectionAtR01 = 0.90;
constexpr double kFalseAlarmSlack = 0.03;
constexpr double kSingleBudgetS = 120.0;
constexpr double kIdentificationRate = 0.90;
constexpr double kSweepTop = 0.95;
constexpr double kFleetAtR1 = 0.65;
constexpr double kFleetAtR3 = 0.85;
constexpr double kFleetSeparation = 3.0;
constexpr double kFleetBudgetS = 180.0;
constexpr int kQuantileN = 1000;
constexpr double kRoadsideMinApDrop = 30.0;
constexpr double kRoadsideMaxSafetyShift = 3.0;
constexpr double kOnroadMaxApDrop = 10.0;
constexpr double kOnroadMinSafetyDrop = 10.0;
constexpr double kDecouplingBudgetS = 300.0;
constexpr int kLattices = 100;
constexpr int kSweepScenarios = 500;
constexpr double kSweepAgreement = 0.99;
constexpr int kRoundTrips = 10000;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::vector<ReportRow> rows_where(const ReportBundle& b, const std::string& table, const std::string& metric) {
  std::vector<ReportRow> out;
  for (const ReportRow& r : b.rows)
    if (r.table == table && r.metric == metric) out.push_back(r);
  return out;
}

double row_value(const ReportBundle& b, const std::string& table, const std::string& case_name,
                 const std::string& metric) {
  for (const ReportRow& r : b.rows)
    if (r.table == table && r.case_name == case_name && r.metric == metric) return r.value;
  throw Error("missing row " + table + "/" + case_name + "/" + metric);
}

SensorStateVector state_from_mask(std::size_t count, unsigned mask) {
  SensorStateVector s(count);
  for (std::size_t i = 0; i < count; ++i)
    if (mask >> i & 1u) s.set(i);
  return s;
}

Outcome identification_soundness() {
  const Stopwatch clock;
  std::size_t checked = 0, wrong = 0;
  for (std::size_t n = 3; n <= 6; ++n) {
    const std::size_t count = n + 1;
    for (unsigned mask = 0; mask < (1u << count); ++mask) {
      const SensorStateVector s = state_from_mask(count, mask);
      if (s.popcount() > n - 2) continue;
      const IdentificationResult r =
          identify_attacked([&](std::size_t m) { return predict_error_state(s.prefix(m)); }, count);
      ++checked;
      wrong += r.identified != s;
    }
  }
  const double t = clock.seconds();
  return {wrong == 0 && t < kIdentificationBudgetS,
          fmt::format("{} state vectors, {} wrong, {:.3f} s", checked, wrong, t)};
}

ExperimentConfig single_config(Pipeline p) {
  ExperimentConfig c;
  c.pipeline = p;
  c.corpus_size = 200;
  c.calibration_size = 200;
  c.heldout_size = 200;
  c.r_values = {0.0, 0.01, 0.05};
  return c;
}

Outcome detection_separation() {
  ExperimentConfig c = single_config(Pipeline::single_detect);
  // One setting per sweep keeps the run to the attack-case corpus.
  c.bogus_widths = {c.bogus_widths.back()};
  c.facula_radii = {c.facula_radii.back()};
  const Stopwatch clock;
  const ReportBundle b = run_experiment(c);
  const double t = clock.seconds();
  double worst01 = 1.0, worst05 = 1.0, worst_slack = 1.0;
  std::size_t cases = 0;
  for (const ReportRow& r : rows_where(b, "detection", "detection_rate")) {
    if (r.x == 0.01) worst01 = std::min(worst01, r.value), ++cases;
    if (r.x == 0.05) worst05 = std::min(worst05, r.value);
  }
  for (const ReportRow& r : rows_where(b, "false_alarm", "false_alarm_rate"))
    worst_slack = std::min(worst_slack, r.x + kFalseAlarmSlack - r.value);
  const bool pass = cases == 14 && worst05 >= kDetectionAtR05 && worst01 >= kDetectionAtR01 &&
                    worst_slack >= 0.0 && t < kSingleBudgetS;
  return {pass, fmt::format("{} cases; min detection {:.3f} at r=0.01, {:.3f} at r=0.05; "
                            "false-alarm margin {:.3f}; {:.1f} s",
                            cases, worst01, worst05, worst_slack, t)};
}

Outcome identification_rate() {
  ExperimentConfig c = single_config(Pipeline::single_identify);
  c.r_values = {0.01};
  const Stopwatch clock;
  const ReportBundle b = run_experiment(c);
  const double t = clock.seconds();
  double worst = 1.0, sum = 0.0;
  std::size_t cases = 0;
  for (const ReportRow& r : rows_where(b, "identification", "identification_rate")) {
    worst = std::min(worst, r.value);
    sum += r.value;
    ++cases;
  }
  const double mean = cases ? sum / static_cast<double>(cases) : 0.0;
  return {cases == 4 && worst >= kIdentificationRate && t < kSingleBudgetS,
          fmt::format("{} single-sensor cases; min {:.3f}, mean {:.3f} at r=0.01; {:.1f} s", cases, worst, mean, t)};
}

Outcome sensitivity_monotonicity() {
  const ExperimentConfig c = single_config(Pipeline::single_detect);
  const ReportBundle b = run_experiment(c);
  std::map<std::string, std::vector<double>> series;
  for (const ReportRow& r : rows_where(b, "sensitivity", "detection_rate")) series[r.case_name].push_back(r.value);
  bool pass = !series.empty();
  std::string worst;
  double lowest_top = 1.0;
  for (const auto& [name, v] : series) {
    const bool monotone = std::is_sorted(v.begin(), v.end());
    const bool expected = v.size() == (name.find("bogus_width") != std::string::npos ? c.bogus_widths.size()
                                                                                      : c.facula_radii.size());
    pass = pass && monotone && expected && v.back() >= kSweepTop;
    if (!monotone) worst += " non-monotone:" + name;
    lowest_top = std::min(lowest_top, v.back());
  }
  return {pass, fmt::format("{} sweeps; lowest top-setting rate {:.3f}{}", series.size(), lowest_top, worst)};
}

Outcome fleet_validation() {
  ExperimentConfig c;
  c.pipeline = Pipeline::fleet;
  c.corpus_size = 150;
  c.calibration_size = 40;
  c.heldout_size = 40;
  c.r_values = {0.1, 0.3};
  const Stopwatch clock;
  const ReportBundle b = run_experiment(c);
  const double t = clock.seconds();
  double at1 = -1, at3 = -1;
  for (const ReportRow& r : rows_where(b, "fleet", "detection_rate")) (r.x == 0.1 ? at1 : at3) = r.value;
  const double clean_median = row_value(b, "fleet_summary", "clean", "median");
  const double iqr = row_value(b, "fleet_summary", "clean", "iqr");
  const double ghost_median = row_value(b, "fleet_summary", "ghost", "median");
  const double regions = row_value(b, "fleet_summary", "ghost", "regions");
  const double gap = ghost_median - clean_median;
  const bool pass = regions >= 150 && at1 >= kFleetAtR1 && at3 >= kFleetAtR3 && gap >= kFleetSeparation * iqr &&
                    t < kFleetBudgetS;
  return {pass, fmt::format("{} ghost regions; detection {:.3f} at r=0.1, {:.3f} at r=0.3; "
                            "median gap {:.3f} m vs 3xIQR {:.3f} m; {:.1f} s",
                            regions, at1, at3, gap, kFleetSeparation * iqr, t)};
}

Outcome quantile_law() {
  const double band = 2.0 / std::sqrt(static_cast<double>(kQuantileN));
  int trials = 0, violations = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    RandomStream rng(seed, "quantile");
    std::vector<double> samples;
    for (int i = 0; i < kQuantileN; ++i) {
      switch (seed % 3) {
        case 0: samples.push_back(rng.uniform()); break;
        case 1: samples.push_back(-std::log(1.0 - rng.uniform())); break;
        default: samples.push_back(std::exp(rng.normal()) / 10.0); break;
      }
    }
    for (double r : {0.0, 0.01, 0.05, 0.3}) {
      const double rate = exceedance_rate(samples, calibrate_threshold(samples, r));
      ++trials;
      violations += !(rate >= std::max(0.0, r - band) && rate <= r);
    }
  }
  return {violations == 0, fmt::format("{} (sample set, r) trials, {} outside [max(0, r-2/sqrt(N)), r]", trials,
                                       violations)};
}

Outcome metric_identity(const ReportBundle& decoupling) {
  std::size_t reports = 0, broken = 0;
  auto check = [&](const SafetyReport& s) {
    ++reports;
    broken += s.m_saf != (1.0 - s.m_cls) * s.m_suc;
  };
  for (std::size_t dts = 1; dts <= 60; ++dts)
    for (std::size_t trj = 0; trj <= dts; ++trj)
      for (std::size_t cls = 0; cls <= trj; ++cls) check(SafetyReport::from_counts(dts, trj, cls));
  // Reports produced by the pipeline, rebuilt from their counts and as emitted.
  std::map<std::string, std::map<std::string, double>> by_case;
  for (const ReportRow& r : decoupling.rows)
    if (r.table == "safety") by_case[r.case_name][r.metric] = r.value;
  for (auto& [name, m] : by_case) {
    const SafetyReport s = SafetyReport::from_counts(static_cast<std::size_t>(m["k_dts"]),
                                                     static_cast<std::size_t>(m["k_trj"]),
                                                     static_cast<std::size_t>(m["k_cls"]));
    check(s);
    ++reports;
    broken += m["m_saf"] != (1.0 - m["m_cls"]) * m["m_suc"];
  }
  const SafetyReport none = SafetyReport::from_counts(10, 0, 0);
  const bool zero_ok = none.m_cls == 0.0 && none.m_saf == 0.0;
  return {broken == 0 && zero_ok, fmt::format("{} reports, {} violations, k_trj = 0 handled: {}", reports, broken,
                                              zero_ok ? "yes" : "no")};
}

Outcome decoupling(const ReportBundle& b, double seconds) {
  const double road_ap = row_value(b, "decoupling", "ghost_roadside:3", "delta_ap_points");
  const double road_saf = row_value(b, "decoupling", "ghost_roadside:3", "delta_m_saf_points");
  const double on_ap = row_value(b, "decoupling", "ghost_onroad:1", "delta_ap_points");
  const double on_saf = row_value(b, "decoupling", "ghost_onroad:1", "delta_m_saf_points");
  const bool pass = -road_ap >= kRoadsideMinApDrop && std::abs(road_saf) <= kRoadsideMaxSafetyShift &&
                    -on_ap <= kOnroadMaxApDrop && on_saf <= -kOnroadMinSafetyDrop && seconds < kDecouplingBudgetS;
  return {pass, fmt::format("roadside dAP {:+.1f} pts, dm_saf {:+.1f} pts; onroad dAP {:+.1f} pts, dm_saf {:+.1f} "
                            "pts; {:.2f} s",
                            road_ap, road_saf, on_ap, on_saf, seconds)};
}

Outcome oracle_agreement() {
  int matched = 0, reachable = 0;
  for (std::uint64_t seed = 0; seed < static_cast<std::uint64_t>(kLattices); ++seed) {
    const PlanningScenario s = oracle::random_scenario(seed);
    const PlanResult r = plan_trajectory(s);
    const std::optional<double> best = oracle::ucs_oracle(s);
    reachable += best.has_value();
    matched += r.success() == best.has_value() && !r.budget_exhausted;
  }
  const oracle::SweepAgreement sweep = oracle::sweep_agreement(17, kSweepScenarios);
  const double agreement = static_cast<double>(sweep.agree) / sweep.scenarios;
  return {matched == kLattices && agreement >= kSweepAgreement,
          fmt::format("reachability {}/{} lattices ({} reachable); collision {:.3f} of {} scenarios ({} hits)",
                      matched, kLattices, reachable, agreement, sweep.scenarios, sweep.hits)};
}

Outcome determinism() {
  int identical = 0, pipelines = 0;
  for (Pipeline p : {Pipeline::single_detect, Pipeline::single_identify, Pipeline::fleet, Pipeline::safety,
                     Pipeline::decoupling}) {
    ExperimentConfig c;
    c.pipeline = p;
    c.seed = 20;
    c.corpus_size = p == Pipeline::safety || p == Pipeline::decoupling ? 40 : 4;
    c.calibration_size = 4;
    c.heldout_size = 4;
    const std::string a = serialize(run_experiment(c)), b = serialize(run_experiment(c));
    identical += a == b;
    ++pipelines;
  }
  RandomStream rng(7, "acceptance-round-trip");
  int failures = 0;
  for (int i = 0; i < kRoundTrips; ++i) failures += !gen::round_trip_case(rng, i);
  return {identical == pipelines && failures == 0,
          fmt::format("{}/{} pipelines byte-identical; {} of {} round trips failed", identical, pipelines, failures,
                      kRoundTrips)};
}

}  // namespace

int main() {
  keep_large_blocks_on_heap();
  ExperimentConfig dc;
  dc.pipeline = Pipeline::decoupling;
  dc.corpus_size = 200;
  ReportBundle decoupling_report;
  double decoupling_seconds = 0.0;
  auto decoupling_run = [&]() -> const ReportBundle& {
    if (decoupling_report.rows.empty()) {
      const Stopwatch clock;
      decoupling_report = run_experiment(dc);
      decoupling_seconds = clock.seconds();
    }
    return decoupling_report;
  };

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"identification soundness", identification_soundness},
      {"detection separation", detection_separation},
      {"identification rate", identification_rate},
      {"sensitivity monotonicity", sensitivity_monotonicity},
      {"fleet validation", fleet_validation},
      {"quantile calibration law", quantile_law},
      {"safety metric identity", [&] { return metric_identity(decoupling_run()); }},
      {"decoupling", [&] { return decoupling(decoupling_run(), decoupling_seconds); }},
      {"planner and collision oracles", oracle_agreement},
      {"determinism and round trip", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failed;
}
