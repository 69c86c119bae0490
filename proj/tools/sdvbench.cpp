// Command-line runner: calibrate, run experiments, emit reports.
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "sdv/bench/allocator.hpp"
#include "sdv/bench/experiment.hpp"
#include "sdv/bench/serialize.hpp"

namespace fs = std::filesystem;
using namespace sdv;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string input;
  std::string format = "all";
};

// Config-stage failures map to exit code 2.
struct ConfigStageError : Error {
  using Error::Error;
};

ExperimentConfig load_config(const Options& o, std::optional<Pipeline> pipeline) {
  try {
    ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : read_artifact<ExperimentConfig>(o.config_path);
    if (pipeline) c.pipeline = *pipeline;
    if (o.seed) c.seed = *o.seed;
    if (!o.out.empty()) c.output_dir = o.out;
    if (c.output_dir.empty()) c.output_dir = ".";
    c.validate();
    return c;
  } catch (const Error& e) {
    throw ConfigStageError(e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error("cannot write '" + path.string() + "'");
}

void write_report(const ReportBundle& bundle, const fs::path& dir) {
  fs::create_directories(dir);
  write_artifact(dir / "report.json", bundle);
  write_text(dir / "report.csv", emit_report(bundle, ReportFormat::csv));
  write_text(dir / "report.txt", emit_report(bundle, ReportFormat::table));
  write_text(dir / "plot.dat", emit_report(bundle, ReportFormat::plot));
  std::cout << emit_report(bundle, ReportFormat::table);
}

std::string r_tag(double r) { return fmt::format("{}", r); }

void run_calibrate(const Options& o) {
  const ExperimentConfig c = load_config(o, std::nullopt);
  const fs::path dir = c.output_dir;
  fs::create_directories(dir);
  if (c.pipeline == Pipeline::fleet) {
    for (const FleetCalibration& cal : calibrate_fleet_pipeline(c)) {
      const fs::path path = dir / ("fleet-calibration-r" + r_tag(cal.r) + ".json");
      write_artifact(path, cal);
      std::cout << fmt::format("{} epsilon={} theta={}\n", path.string(), cal.epsilon, cal.theta);
    }
    return;
  }
  if (c.pipeline == Pipeline::safety || c.pipeline == Pipeline::decoupling)
    throw ConfigStageError("the safety pipelines need no calibration");
  const std::vector<std::string> rigs =
      c.pipeline == Pipeline::single_identify ? std::vector<std::string>{"lidar-3cam"} : c.rigs;
  for (const std::string& rig : rigs) {
    for (const ThresholdTable& table : calibrate_rig(c, rig)) {
      const fs::path path = dir / ("calibration-" + rig + "-r" + r_tag(table.r()) + ".json");
      write_artifact(path, table);
      std::cout << fmt::format("{} triples={}\n", path.string(), table.size());
    }
  }
  write_artifact(dir / "config.json", c);
}

void run_pipeline(const Options& o, std::optional<Pipeline> pipeline) {
  ExperimentConfig c = load_config(o, pipeline);
  if (pipeline == Pipeline::safety && !o.config_path.empty()) {
    // safety-eval honours a decoupling config as-is.
    const ExperimentConfig raw = load_config(Options{o.config_path, o.seed, o.out, {}, {}}, std::nullopt);
    if (raw.pipeline == Pipeline::decoupling) c.pipeline = Pipeline::decoupling;
  }
  write_report(run_experiment(c), c.output_dir);
}

void run_report(const Options& o) {
  ReportBundle bundle;
  fs::path dir;
  if (!o.input.empty()) {
    bundle = read_artifact<ReportBundle>(o.input);
    dir = o.out;
  } else {
    const ExperimentConfig c = load_config(o, std::nullopt);
    bundle = run_experiment(c);
    dir = c.output_dir;
  }
  if (o.format == "all") {
    if (dir.empty()) dir = ".";
    write_report(bundle, dir);
    return;
  }
  const ReportFormat format = [&] {
    try {
      return parse_report_format(o.format);
    } catch (const Error& e) {
      throw ConfigStageError(e.what());
    }
  }();
  const std::string text = emit_report(bundle, format);
  if (dir.empty()) {
    std::cout << text;
  } else {
    fs::create_directories(dir);
    const char* name = format == ReportFormat::csv ? "report.csv" : format == ReportFormat::plot ? "plot.dat" : "report.txt";
    write_text(dir / name, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  keep_large_blocks_on_heap();
  CLI::App app{"Sensor attack detection and driving-safety workbench"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "Experiment config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "Override the config seed");
    sub->add_option("--out", o.out, "Output directory");
    return sub;
  };
  auto* calibrate = common(app.add_subcommand("calibrate", "Calibrate thresholds on attack-free data"));
  auto* detect = common(app.add_subcommand("detect", "Single-vehicle attack detection experiment"));
  auto* identify = common(app.add_subcommand("identify", "Attacked-sensor identification experiment"));
  auto* fleet = common(app.add_subcommand("fleet-validate", "Cross-vehicle LiDAR validation experiment"));
  auto* safety = common(app.add_subcommand("safety-eval", "Driving-safety evaluation under perturbed detections"));
  auto* report = common(app.add_subcommand("report", "Run the configured experiment or re-emit a saved report"));
  report->add_option("--input", o.input, "Saved report.json to re-emit")->check(CLI::ExistingFile);
  report->add_option("--format", o.format, "all, table, csv or plot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (calibrate->parsed()) run_calibrate(o);
    else if (detect->parsed()) run_pipeline(o, Pipeline::single_detect);
    else if (identify->parsed()) run_pipeline(o, Pipeline::single_identify);
    else if (fleet->parsed()) run_pipeline(o, Pipeline::fleet);
    else if (safety->parsed()) run_pipeline(o, Pipeline::safety);
    else if (report->parsed()) run_report(o);
    return 0;
  } catch (const ConfigStageError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
