// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sparsearch/policy.hpp"
#include "sparsearch/schedule.hpp"
#include "sparsearch/task.hpp"

namespace sparsearch {

// Everything needed to reproduce one training run.
//
// The config file is JSON. Every key is optional except task.kind; unknown
// keys are rejected. Keys and defaults:
//
//   seed                 0        master seed; data/init/policy seeds derive from it
//   task                 {kind: spiral|teacher|csv, classes 3, points_per_class 300,
//                         turns 2.0, noise_sd 0.2, in_dim 8, teacher_hidden 32,
//                         out_dim 2, samples 2000, path "", target_column "",
//                         classification true, batch_size 32, seed <derived>}
//   hidden_widths        [64, 64]
//   min_sparse_in_dim    16       layers with fewer inputs stay dense
//   sparsify_output      true
//   exempt_incompatible  true     layers a structure cannot tile stay dense instead of failing
//   total_steps          2000     length of the unstretched schedule
//   momentum             0.9
//   schedule             {base_lr 0.05, warmup_steps 100, kind step_drop,
//                         milestones [0.5, 0.75], drop_factor 0.1,
//                         inverse_gamma 0.01, stretch 1.0}
//   policy               {method search, d 1.0, r 1, s 1.0,
//                         exploitation none|fix|reset|regularize, v <steps>,
//                         v_fraction 0.5, z 1000, beta 0.0002,
//                         structure unstructured|two_four_1d|two_four_2d|block,
//                         axis row, block 4, block_score max_abs, p 2.0,
//                         rewire_f0 0.3, lottery_epsilon <steps>,
//                         lottery_epsilon_fraction 0.1, fix_zero_momentum false}
//   snapshot_stride      10       0 disables the trajectory file
//   tracked_per_layer    4096
//   metrics_every        1        0 disables the metrics stream
//   probe_steps          []
//   output_dir           ""       empty: nothing is written
struct RunConfig {
  std::uint64_t seed = 0;
  TaskSpec task;
  std::vector<std::size_t> hidden_widths{64, 64};
  std::size_t min_sparse_in_dim = 16;
  bool sparsify_output = true;
  bool exempt_incompatible = true;
  std::size_t total_steps = 2000;
  double momentum = 0.9;
  LrSchedule schedule = default_schedule();
  SparsityPolicy policy;
  std::optional<std::size_t> fix_v_steps;
  double fix_v_fraction = 0.5;
  std::optional<std::size_t> lottery_epsilon_steps;
  double lottery_epsilon_fraction = 0.1;
  std::size_t snapshot_stride = 10;
  std::size_t tracked_per_layer = 4096;
  std::size_t metrics_every = 1;
  std::vector<std::size_t> probe_steps;
  std::string output_dir;

  static LrSchedule default_schedule() {
    LrSchedule s;
    s.base_lr = 0.05;
    s.warmup_steps = 100;
    return s;
  }

  // Steps actually executed: warmup + stretch * (total_steps - warmup).
  std::size_t executed_steps() const;
  // Schedule with decay_steps filled in from total_steps.
  LrSchedule resolved_schedule() const;
  // Policy with fix v and lottery epsilon resolved to steps.
  SparsityPolicy resolved_policy() const;

  void validate() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const RunConfig& config, int indent = 2);
void save_config(const RunConfig& config, const std::filesystem::path& path);

}  // namespace sparsearch
