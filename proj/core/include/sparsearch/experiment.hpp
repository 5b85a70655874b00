// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "sparsearch/config.hpp"
#include "sparsearch/mlp.hpp"

namespace sparsearch {

struct LayerSummary {
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool sparsified = false;
  double density = 1.0;

  friend bool operator==(const LayerSummary&, const LayerSummary&) = default;
};

// State of every layer right after the exploitation hook of `step`.
struct Probe {
  std::size_t step = 0;
  std::vector<double> max_abs_nonparticipating;
  std::vector<double> density;

  friend bool operator==(const Probe&, const Probe&) = default;
};

struct RunSummary {
  std::string method;
  std::string task;  // dataset descriptor
  std::uint64_t seed = 0;
  std::size_t steps = 0;
  bool classification = true;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
  std::vector<std::size_t> hidden_widths;
  std::vector<LayerSummary> layers;
  std::vector<Probe> probes;
  std::string policy_json;  // echo of the run configuration minus output_dir
  double wall_clock_seconds = 0.0;
  std::string trajectory_file;  // relative to the output directory, empty if not written
  std::string metrics_file;

  // Higher is better: validation accuracy, or -validation MSE for regression.
  double score() const { return classification ? val_accuracy : -val_loss; }
};

std::string summary_to_json(const RunSummary& summary, int indent = 2);
RunSummary summary_from_json(const std::string& text);
RunSummary load_summary(const std::filesystem::path& path);

struct StepView {
  std::size_t step = 0;  // completed optimizer steps
  double loss = 0.0;
  bool rewired = false;
  const Mlp<float>& model;
};

using StepObserver = std::function<void(const StepView&)>;

// Trains one model under the configured policy. Per step: (a) rewire if due,
// (b) forward with w ⊙ m, (c) backward, (d) scale non-participating gradients,
// (e) optimizer step over all weights, (f) exploitation hook, (g) snapshot.
// Writes summary.json, metrics.jsonl and trajectory.sptj when output_dir is set.
RunSummary run_experiment(const RunConfig& config, const StepObserver& observer = {});

// regular.score() - sparse.score(); positive means the sparse model is worse.
// Throws ComparisonError if the runs used different tasks.
double task_error(const RunSummary& regular, const RunSummary& sparse);

enum class SweepAxis { r, s, z, d, t, strategy };

SweepAxis parse_sweep_axis(std::string_view name);
std::string_view to_string(SweepAxis axis);

// Config for one sweep point. Values: numbers; "inf" for r; for strategy one
// of no-explore, no-exploit, fix, reset, regularize or a method name.
RunConfig apply_sweep_value(const RunConfig& base, SweepAxis axis, const std::string& value);

struct SweepPoint {
  std::string value;
  std::vector<double> task_errors;  // per seed
  std::vector<double> scores;       // sparse run score per seed
  std::vector<double> regular_scores;
  double median_task_error = 0.0;
  double median_score = 0.0;
  double median_regular_score = 0.0;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::r;
  std::vector<SweepPoint> points;
};

// One run per (value, seed) plus one dense reference per (stretch, seed).
// Seeds are base.seed, base.seed + 1, ... Runs are independent and are
// spread over `threads` workers; results do not depend on the thread count.
SweepResult sweep(const RunConfig& base, SweepAxis axis, const std::vector<std::string>& values,
                  std::size_t seeds, std::size_t threads = 0);

std::string sweep_to_csv(const SweepResult& result);

}  // namespace sparsearch
