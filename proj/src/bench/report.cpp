#include "sdv/bench/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include <fmt/format.h>

#include "sdv/core/errors.hpp"

namespace sdv {

void ReportBundle::validate() const {
  const Provenance& p = provenance;
  if (p.config_hash.empty() || p.version.empty())
    throw InvariantError("report bundle has no provenance block");
  if (p.version != kArtifactVersion) throw InvariantError("unknown artifact version '" + p.version + "'");
  const std::set<std::uint64_t> calibration(p.calibration_ids.begin(), p.calibration_ids.end());
  const std::set<std::uint64_t> heldout(p.heldout_ids.begin(), p.heldout_ids.end());
  for (std::uint64_t id : p.heldout_ids)
    if (calibration.count(id)) throw InvariantError(fmt::format("id {} is both calibration and held-out", id));
  for (std::uint64_t id : p.evaluation_ids) {
    if (calibration.count(id)) throw InvariantError(fmt::format("id {} is both calibration and evaluation", id));
    if (heldout.count(id)) throw InvariantError(fmt::format("id {} is both held-out and evaluation", id));
  }
}

ReportFormat parse_report_format(std::string_view label) {
  if (label == "table") return ReportFormat::table;
  if (label == "csv") return ReportFormat::csv;
  if (label == "plot") return ReportFormat::plot;
  throw ConfigError("unknown report format '" + std::string(label) + "'");
}

std::vector<std::size_t> histogram(std::span<const double> values, double width) {
  if (!(width > 0.0) || !std::isfinite(width)) throw DomainError("histogram bin width must be > 0");
  double max = 0.0;
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) throw DomainError("histogram values must be finite and >= 0");
    max = std::max(max, v);
  }
  if (values.empty()) return {};
  // Edges snap within a relative 1e-9 so decimal inputs such as 0.15 land
  // in the bin a decimal reading would put them in.
  constexpr double kSnap = 1e-9;
  const auto bins = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(max / width - kSnap)));
  std::vector<std::size_t> counts(bins, 0);
  for (double v : values) counts[std::min(bins - 1, static_cast<std::size_t>(std::floor(v / width + kSnap)))]++;
  return counts;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string emit_csv(const ReportBundle& b) {
  std::string out = std::string(kCsvHeader) + "\n";
  for (const ReportRow& r : b.rows)
    out += fmt::format("{},{},{},{},{},{},{}\n", csv_field(r.table), csv_field(r.case_name), csv_field(r.param),
                       r.x, csv_field(r.metric), r.value, r.seed);
  return out;
}

std::string emit_table(const ReportBundle& b) {
  const std::vector<std::string> header{"table", "case", "param", "x", "metric", "value", "seed"};
  std::vector<std::vector<std::string>> cells{header};
  for (const ReportRow& r : b.rows)
    cells.push_back({r.table, r.case_name, r.param, fmt::format("{}", r.x), r.metric,
                     fmt::format("{:.4f}", r.value), fmt::format("{}", r.seed)});
  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) widths[c] = std::max(widths[c], row[c].size());
  std::string out;
  if (!b.provenance.config_hash.empty())
    out += fmt::format("# config {} seed {} {}\n", b.provenance.config_hash, b.provenance.seed,
                       b.provenance.version);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::string line;
    for (std::size_t c = 0; c < cells[i].size(); ++c) {
      if (c > 0) line += "  ";
      line += fmt::format("{:<{}}", cells[i][c], widths[c]);
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out += line + "\n";
    if (i == 0) {
      std::size_t total = 2 * (widths.size() - 1);
      for (std::size_t w : widths) total += w;
      out += std::string(total, '-') + "\n";
    }
  }
  return out;
}

std::string emit_plot(const ReportBundle& b) {
  // One two-column block per (table, case, metric) in first-seen order.
  using Key = std::tuple<std::string, std::string, std::string>;
  std::vector<Key> order;
  std::map<Key, std::vector<const ReportRow*>> groups;
  for (const ReportRow& r : b.rows) {
    Key k{r.table, r.case_name, r.metric};
    auto [it, inserted] = groups.try_emplace(k);
    if (inserted) order.push_back(k);
    it->second.push_back(&r);
  }
  std::string out;
  for (const Key& k : order) {
    const auto& rows = groups[k];
    out += fmt::format("# {} {} {} vs {}\n", std::get<0>(k), std::get<1>(k), std::get<2>(k),
                       rows.front()->param.empty() ? "x" : rows.front()->param);
    for (const ReportRow* r : rows) out += fmt::format("{} {}\n", r->x, r->value);
    out += "\n\n";
  }
  for (const SampleSeries& s : b.samples) {
    out += fmt::format("# histogram {} bin_width {}\n", s.name, kHistogramBinWidth);
    const auto counts = histogram(s.values);
    for (std::size_t i = 0; i < counts.size(); ++i)
      out += fmt::format("{} {}\n", static_cast<double>(i) * kHistogramBinWidth, counts[i]);
    out += "\n\n";
  }
  return out;
}

}  // namespace

std::string emit_report(const ReportBundle& bundle, ReportFormat format) {
  switch (format) {
    case ReportFormat::csv: return emit_csv(bundle);
    case ReportFormat::table: return emit_table(bundle);
    case ReportFormat::plot: return emit_plot(bundle);
  }
  throw ConfigError("unknown report format");
}

std::string emit_report(const ReportBundle& bundle, std::string_view format) {
  return emit_report(bundle, parse_report_format(format));
}

}  // namespace sdv
