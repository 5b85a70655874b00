// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

// Command line front end: train, sweep, analyze, pattern check, capacity.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sparsearch/analytics.hpp"
#include "sparsearch/error.hpp"
#include "sparsearch/experiment.hpp"
#include "sparsearch/patterns.hpp"
#include "sparsearch/trajectory.hpp"

namespace {

using namespace sparsearch;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Reads a dense matrix from CSV; every row must have the same width.
Tensor read_tensor_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<float> values;
  std::size_t rows = 0, cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line, ',');
    if (rows == 0) cols = cells.size();
    if (cells.size() != cols) {
      throw DimensionError(path + ": row " + std::to_string(rows + 1) + " has " + std::to_string(cells.size()) +
                           " values, expected " + std::to_string(cols));
    }
    for (const auto& c : cells) {
      try {
        values.push_back(std::stof(c));
      } catch (const std::exception&) {
        throw IoError(path + ": '" + c + "' is not a number");
      }
    }
    ++rows;
  }
  if (rows == 0) throw IoError(path + ": empty tensor");
  return Tensor(rows, cols, std::move(values));
}

int cmd_train(const std::string& config_path, const std::string& output_dir) {
  RunConfig config = load_config(config_path);
  if (!output_dir.empty()) config.output_dir = output_dir;
  const RunSummary summary = run_experiment(config);
  std::cout << summary_to_json(summary) << '\n';
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& axis, const std::string& values, std::size_t seeds,
              std::size_t threads) {
  const RunConfig base = load_config(config_path);
  const SweepResult result = sweep(base, parse_sweep_axis(axis), split(values, ','), seeds, threads);
  std::cout << sweep_to_csv(result);
  return 0;
}

int cmd_analyze(const std::string& log_path, const std::string& report, double d, std::size_t bins, int layer) {
  const TrajectoryLog log = TrajectoryLog::load(log_path);
  std::cout.precision(10);
  if (report == "sets") {
    const double tau = inference_threshold(log, d);
    std::cout << "step,active,inactive,undecided\n";
    for (const auto& s : classify_sets(log, tau)) {
      std::cout << s.step << ',' << s.active << ',' << s.inactive << ',' << s.undecided << '\n';
    }
  } else if (report == "distance") {
    const auto raw = cumulative_distance(log);
    const auto norm = normalize_by_max(raw);
    std::cout << "step,distance,normalized\n";
    for (std::size_t i = 0; i < raw.size(); ++i) {
      std::cout << log.snapshots()[i + 1].step << ',' << raw[i] << ',' << norm[i] << '\n';
    }
  } else if (report == "delta") {
    std::optional<std::size_t> which;
    if (layer >= 0) which = static_cast<std::size_t>(layer);
    const DeltaProfile profile = delta_by_magnitude_bins(log, bins, which);
    std::cout << "layer,bin,min_magnitude,max_magnitude,weights,excluded,median_delta\n";
    for (std::size_t b = 0; b < profile.bins.size(); ++b) {
      const auto& bin = profile.bins[b];
      std::cout << profile.layer << ',' << b << ',' << bin.min_magnitude << ',' << bin.max_magnitude << ','
                << bin.weights << ',' << bin.excluded << ',';
      if (bin.median_delta) std::cout << *bin.median_delta;
      std::cout << '\n';
    }
  } else {
    throw ConfigError("unknown report '" + report + "' (expected sets, distance or delta)");
  }
  return 0;
}

int cmd_pattern_check(const std::string& tensor_path, const std::string& kind_text) {
  const Tensor t = read_tensor_csv(tensor_path);
  Mask mask(t.shape());
  for (std::size_t i = 0; i < t.size(); ++i) mask[i] = t[i] != 0.0f ? 1 : 0;
  const auto violations = validate_structure(mask, parse_pattern_kind(kind_text));
  for (const auto& v : violations) {
    std::cout << "violation at (" << v.row << ", " << v.col << "): " << v.reason << '\n';
  }
  if (violations.empty()) {
    std::cout << "compliant\n";
    return 0;
  }
  std::cout << violations.size() << " violation(s)\n";
  return 1;
}

int cmd_capacity(const std::string& regular, const std::string& search, const std::string& reduce) {
  const RunSummary r = load_summary(regular);
  const RunSummary s = load_summary(search);
  const RunSummary d = load_summary(reduce);
  (void)task_error(r, s);
  (void)task_error(r, d);
  const CapacityReport report = capacity_report(r.score(), s.score(), d.score());
  std::cout.precision(10);
  std::cout << "regular,search,reduce,raw,complement,interpretation\n"
            << r.score() << ',' << s.score() << ',' << d.score() << ',' << report.raw << ',' << report.complement
            << ",\"" << report.interpretation << "\"\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse training with search-space augmentation"};
  app.require_subcommand(1);
  int status = 0;

  std::string config_path, output_dir;
  auto* train = app.add_subcommand("train", "Train one model and write summary, metrics and trajectory");
  train->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
  train->add_option("--output", output_dir, "Overrides output_dir from the config");

  std::string axis, values;
  std::size_t seeds = 5, threads = 0;
  auto* sweep_cmd = app.add_subcommand("sweep", "Sweep one axis over several seeds and print CSV");
  sweep_cmd->add_option("--config", config_path, "Base JSON run configuration")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--axis", axis, "r, s, z, d, t or strategy")->required();
  sweep_cmd->add_option("--values", values, "Comma-separated values")->required();
  sweep_cmd->add_option("--seeds", seeds, "Seeds per value")->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--threads", threads, "Worker threads, 0 for one per core");

  std::string log_path, report;
  double d = 0.1;
  std::size_t bins = 4;
  int layer = -1;
  auto* analyze = app.add_subcommand("analyze", "Report on a trajectory file as CSV");
  analyze->add_option("--log", log_path, "Trajectory file")->required()->check(CLI::ExistingFile);
  analyze->add_option("--report", report, "sets, distance or delta")->required();
  analyze->add_option("--d", d, "Participating fraction for the set threshold");
  analyze->add_option("--bins", bins, "Magnitude bins for the delta report");
  analyze->add_option("--layer", layer, "Layer for the delta report; default the largest");

  std::string tensor_path, kind;
  auto* pattern = app.add_subcommand("pattern", "Structured sparsity tools");
  pattern->require_subcommand(1);
  auto* check = pattern->add_subcommand("check", "Exit 0 iff the nonzeros of a CSV tensor follow the pattern");
  check->add_option("--tensor", tensor_path, "CSV matrix; nonzero entries count as kept")
      ->required()
      ->check(CLI::ExistingFile);
  check->add_option("--kind", kind, "1d, 1d:col, 2d or block:<b>")->required();

  std::string regular, search, reduce;
  auto* capacity = app.add_subcommand("capacity", "Search capacity from three run summaries");
  capacity->add_option("--regular", regular, "Dense run summary")->required()->check(CLI::ExistingFile);
  capacity->add_option("--search", search, "Sparse run summary")->required()->check(CLI::ExistingFile);
  capacity->add_option("--reduce", reduce, "Reduced-width run summary")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) status = cmd_train(config_path, output_dir);
    else if (*sweep_cmd) status = cmd_sweep(config_path, axis, values, seeds, threads);
    else if (*analyze) status = cmd_analyze(log_path, report, d, bins, layer);
    else if (*check) status = cmd_pattern_check(tensor_path, kind);
    else if (*capacity) status = cmd_capacity(regular, search, reduce);
  } catch (const sparsearch::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return status;
}
