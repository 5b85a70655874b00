// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace sparsearch {

enum class DecayKind { constant, step_drop, inverse, cosine };

DecayKind parse_decay_kind(std::string_view name);
std::string_view to_string(DecayKind kind);

// Linear warmup followed by a decay that can be stretched in time.
//
// After warmup, decay progress is measured in "original" steps
// u = (step - warmup_steps) / stretch, so every milestone of the unstretched
// schedule moves to stretch times its post-warmup offset.
struct LrSchedule {
  double base_lr = 0.1;
  std::size_t warmup_steps = 0;
  // Length of the unstretched post-warmup span; milestones and the cosine
  // period are fractions of it.
  std::size_t decay_steps = 1000;
  DecayKind kind = DecayKind::step_drop;
  std::vector<double> milestones{0.5, 0.75};  // step_drop, fractions of decay_steps
  double drop_factor = 0.1;                   // step_drop
  double inverse_gamma = 0.01;                // inverse: base / (1 + gamma * u)
  double stretch = 1.0;                       // t >= 1

  // Throws DomainError on an invalid combination.
  void validate() const;

  // Number of steps the stretched schedule spans, warmup included.
  std::size_t stretched_total() const;

  friend bool operator==(const LrSchedule&, const LrSchedule&) = default;
};

double lr_at(const LrSchedule& schedule, std::size_t step);

}  // namespace sparsearch
