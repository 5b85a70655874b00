// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "sparsearch/loss.hpp"
#include "sparsearch/tensor.hpp"

namespace sparsearch {

enum class TaskKind { spiral_classification, teacher_regression, csv_dataset };

TaskKind parse_task_kind(std::string_view name);
std::string_view to_string(TaskKind kind);

struct TaskSpec {
  TaskKind kind = TaskKind::spiral_classification;

  // spiral_classification
  std::size_t classes = 3;
  std::size_t points_per_class = 300;
  double turns = 2.0;  // revolutions swept by each arm
  double noise_sd = 0.2;

  // teacher_regression
  std::size_t in_dim = 8;
  std::size_t teacher_hidden = 32;
  std::size_t out_dim = 2;
  std::size_t samples = 2000;

  // csv_dataset
  std::string path;
  std::string target_column;
  bool classification = true;

  std::size_t batch_size = 32;
  std::optional<std::uint64_t> seed;  // data seed; derived from the run seed when absent

  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

struct Dataset {
  Tensor train_x;
  Tensor train_y;  // class indices (n x 1) or regression targets
  Tensor val_x;
  Tensor val_y;
  LossKind loss = LossKind::cross_entropy;
  bool classification = true;
  std::size_t in_dim = 0;
  std::size_t out_dim = 0;
  // Identifies the task and data seed; runs are comparable iff these match.
  std::string descriptor;
};

// Pure function of (spec, seed). 20% of the samples go to validation after a
// seeded shuffle.
Dataset make_dataset(const TaskSpec& spec, std::uint64_t seed);

}  // namespace sparsearch
