#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sdv {

/// One metric value; `seed` is the seed the producing case ran with.
struct ReportRow {
  std::string table;
  std::string case_name;
  std::string param;
  double x = 0.0;
  std::string metric;
  double value = 0.0;
  std::uint64_t seed = 0;
  bool operator==(const ReportRow&) const = default;
};

/// Raw samples kept for histogram emission.
struct SampleSeries {
  std::string name;
  std::vector<double> values;
  bool operator==(const SampleSeries&) const = default;
};

struct Provenance {
  std::string config_hash;  // 16 hex digits
  std::uint64_t seed = 0;
  std::string version;
  std::vector<std::uint64_t> calibration_ids;
  std::vector<std::uint64_t> heldout_ids;
  std::vector<std::uint64_t> evaluation_ids;
  bool operator==(const Provenance&) const = default;
};

inline constexpr std::string_view kArtifactVersion = "sdvbench/1";

struct ReportBundle {
  std::vector<ReportRow> rows;
  std::vector<SampleSeries> samples;
  Provenance provenance;

  /// Throws InvariantError on a missing provenance block or overlapping
  /// calibration, held-out and evaluation id sets.
  void validate() const;
  bool operator==(const ReportBundle&) const = default;
};

enum class ReportFormat { table, csv, plot };

/// "table", "csv" or "plot"; throws ConfigError otherwise.
ReportFormat parse_report_format(std::string_view label);

inline constexpr std::string_view kCsvHeader = "table,case,param,x,metric,value,seed";
inline constexpr double kHistogramBinWidth = 0.05;

/// Counts per bin of `width` covering [0, max(values)]; the maximum falls in
/// the last bin. Throws DomainError on negative or non-finite values.
std::vector<std::size_t> histogram(std::span<const double> values, double width = kHistogramBinWidth);

std::string emit_report(const ReportBundle& bundle, ReportFormat format);
std::string emit_report(const ReportBundle& bundle, std::string_view format);

}  // namespace sdv
