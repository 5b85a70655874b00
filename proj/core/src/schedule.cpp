// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#include "sparsearch/schedule.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sparsearch/error.hpp"

namespace sparsearch {

DecayKind parse_decay_kind(std::string_view name) {
  if (name == "constant") return DecayKind::constant;
  if (name == "step_drop") return DecayKind::step_drop;
  if (name == "inverse") return DecayKind::inverse;
  if (name == "cosine") return DecayKind::cosine;
  throw ConfigError("unknown decay kind '" + std::string(name) + "'");
}

std::string_view to_string(DecayKind kind) {
  switch (kind) {
    case DecayKind::constant: return "constant";
    case DecayKind::step_drop: return "step_drop";
    case DecayKind::inverse: return "inverse";
    case DecayKind::cosine: return "cosine";
  }
  return "?";
}

void LrSchedule::validate() const {
  if (!(base_lr >= 0.0) || !std::isfinite(base_lr)) throw DomainError("base_lr must be >= 0");
  if (!(stretch >= 1.0) || !std::isfinite(stretch)) throw DomainError("stretch must be >= 1");
  if (drop_factor < 0.0) throw DomainError("drop_factor must be >= 0");
  if (inverse_gamma < 0.0) throw DomainError("inverse_gamma must be >= 0");
  for (double m : milestones) {
    if (m < 0.0) throw DomainError("milestones must be nonnegative fractions");
  }
}

std::size_t LrSchedule::stretched_total() const {
  return warmup_steps + static_cast<std::size_t>(std::llround(stretch * static_cast<double>(decay_steps)));
}

double lr_at(const LrSchedule& s, std::size_t step) {
  if (step < s.warmup_steps) {
    return s.base_lr * static_cast<double>(step) / static_cast<double>(s.warmup_steps);
  }
  const double offset = static_cast<double>(step - s.warmup_steps);
  const double horizon = static_cast<double>(s.decay_steps);
  switch (s.kind) {
    case DecayKind::constant:
      return s.base_lr;
    case DecayKind::step_drop: {
      // Compare in stretched steps so that integer milestones land exactly.
      double lr = s.base_lr;
      for (double m : s.milestones) {
        if (offset >= s.stretch * m * horizon) lr *= s.drop_factor;
      }
      return lr;
    }
    case DecayKind::inverse:
      return s.base_lr / (1.0 + s.inverse_gamma * offset / s.stretch);
    case DecayKind::cosine: {
      if (horizon <= 0.0) return s.base_lr;
      const double progress = std::min(offset / (s.stretch * horizon), 1.0);
      return 0.5 * s.base_lr * (1.0 + std::cos(std::numbers::pi * progress));
    }
  }
  return s.base_lr;
}

}  // namespace sparsearch
