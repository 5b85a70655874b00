// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#include "sparsearch/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sparsearch {

namespace {

// Orders indices by descending magnitude, ascending index on ties.
struct StrongerFirst {
  const std::vector<float>& mag;
  bool operator()(std::size_t a, std::size_t b) const {
    return mag[a] != mag[b] ? mag[a] > mag[b] : a < b;
  }
};

std::vector<float> magnitudes(const Tensor& t) {
  std::vector<float> mag(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) mag[i] = std::abs(t[i]);
  return mag;
}

// Participating indices to drop: the k weakest. On equal magnitude the higher
// index goes first, mirroring topd_mask which keeps lower indices.
std::vector<std::size_t> weakest_participating(const Tensor& weights, const Mask& mask, std::size_t k) {
  const auto mag = magnitudes(weights);
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) active.push_back(i);
  }
  std::sort(active.begin(), active.end(),
            [&](std::size_t a, std::size_t b) { return mag[a] != mag[b] ? mag[a] < mag[b] : a > b; });
  active.resize(std::min(k, active.size()));
  return active;
}

std::size_t drop_count(const Mask& mask, double f) {
  if (!(f >= 0.0 && f <= 1.0)) throw DomainError("rewire fraction must be in [0, 1]");
  const std::size_t active = popcount(mask);
  const std::size_t inactive = mask.size() - active;
  const auto k = static_cast<std::size_t>(std::floor(f * static_cast<double>(active) + 1e-9));
  return std::min(k, inactive);
}

}  // namespace

void SparsityPolicy::validate() const {
  if (!(d > 0.0 && d <= 1.0)) throw ConfigError("d must be in (0, 1], got " + std::to_string(d));
  if (r < 1) throw ConfigError("r must be >= 1");
  if (!(s >= 0.0 && s <= 1.0)) throw ConfigError("s must be in [0, 1], got " + std::to_string(s));
  if (exploitation.kind == ExploitKind::fix && exploitation.v < 1) throw ConfigError("fix v must be >= 1");
  if (exploitation.kind == ExploitKind::reset && exploitation.z < 1) throw ConfigError("reset z must be >= 1");
  if (exploitation.kind == ExploitKind::regularize && !(exploitation.beta >= 0.0 && exploitation.beta < 1.0)) {
    throw ConfigError("regularize beta must be in [0, 1)");
  }
  if (!(rewire_f0 >= 0.0 && rewire_f0 <= 1.0)) throw ConfigError("rewire_f0 must be in [0, 1]");
  if (structure.kind == StructureKind::block && structure.block < 1) throw ConfigError("block size must be >= 1");
  if ((method == Method::set || method == Method::rigl) && structure.kind != StructureKind::unstructured) {
    throw ConfigError("set and rigl support only unstructured masks");
  }
}

Method parse_method(std::string_view name) {
  if (name == "search") return Method::search;
  if (name == "dense") return Method::dense;
  if (name == "reduce") return Method::reduce;
  if (name == "lottery") return Method::lottery;
  if (name == "set") return Method::set;
  if (name == "rigl") return Method::rigl;
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::search: return "search";
    case Method::dense: return "dense";
    case Method::reduce: return "reduce";
    case Method::lottery: return "lottery";
    case Method::set: return "set";
    case Method::rigl: return "rigl";
  }
  return "?";
}

ExploitKind parse_exploit_kind(std::string_view name) {
  if (name == "none") return ExploitKind::none;
  if (name == "fix") return ExploitKind::fix;
  if (name == "reset") return ExploitKind::reset;
  if (name == "regularize") return ExploitKind::regularize;
  throw ConfigError("unknown exploitation '" + std::string(name) + "'");
}

std::string_view to_string(ExploitKind k) {
  switch (k) {
    case ExploitKind::none: return "none";
    case ExploitKind::fix: return "fix";
    case ExploitKind::reset: return "reset";
    case ExploitKind::regularize: return "regularize";
  }
  return "?";
}

StructureKind parse_structure_kind(std::string_view name) {
  if (name == "unstructured") return StructureKind::unstructured;
  if (name == "two_four_1d") return StructureKind::two_four_1d;
  if (name == "two_four_2d") return StructureKind::two_four_2d;
  if (name == "block") return StructureKind::block;
  throw ConfigError("unknown structure '" + std::string(name) + "'");
}

std::string_view to_string(StructureKind k) {
  switch (k) {
    case StructureKind::unstructured: return "unstructured";
    case StructureKind::two_four_1d: return "two_four_1d";
    case StructureKind::two_four_2d: return "two_four_2d";
    case StructureKind::block: return "block";
  }
  return "?";
}

Mask topd_mask(const Tensor& weights, double d) {
  if (weights.empty()) throw DomainError("topd_mask of an empty tensor");
  if (!(d > 0.0 && d <= 1.0)) throw DomainError("d must be in (0, 1]");
  const std::size_t n = weights.size();
  const std::size_t keep = std::min(ceil_fraction(d, n), n);
  Mask mask(weights.shape(), 0);
  if (keep == n) {
    mask.fill(1);
    return mask;
  }
  const auto mag = magnitudes(weights);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(), StrongerFirst{mag});
  for (std::size_t i = 0; i < keep; ++i) mask[order[i]] = 1;
  return mask;
}

Mask structured_mask(const Tensor& weights, double d, const Structure& structure) {
  switch (structure.kind) {
    case StructureKind::unstructured: return topd_mask(weights, d);
    case StructureKind::two_four_1d: return mask_24_1d(weights, structure.axis);
    case StructureKind::two_four_2d: return mask_24_2d(weights);
    case StructureKind::block: return mask_block(weights, structure.block, d, structure.score, structure.p);
  }
  return topd_mask(weights, d);
}

bool should_rewire(std::size_t step, const SparsityPolicy& policy) {
  if (policy.r == 0 || step % policy.r != 0) return false;
  return policy.exploitation.kind != ExploitKind::fix || step < policy.exploitation.v;
}

template <typename Real>
Matrix<Real> scale_nonparticipating_grads(const Matrix<Real>& grads, const Mask& mask, double s) {
  require_same_shape(grads.shape(), mask.shape(), "scale_nonparticipating_grads");
  Matrix<Real> out = grads;
  if (s == 1.0) return out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!mask[i]) out[i] = static_cast<Real>(static_cast<double>(out[i]) * s);
  }
  return out;
}

template <typename Real>
Matrix<Real> apply_exploitation(const Matrix<Real>& weights, const Mask& mask, std::size_t step,
                                const SparsityPolicy& policy) {
  require_same_shape(weights.shape(), mask.shape(), "apply_exploitation");
  Matrix<Real> out = weights;
  const Exploitation& e = policy.exploitation;
  auto zero_n = [&] {
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (!mask[i]) out[i] = Real{0};
    }
  };
  switch (e.kind) {
    case ExploitKind::none:
      break;
    case ExploitKind::fix:
      if (step >= e.v) zero_n();
      break;
    case ExploitKind::reset:
      if (step % e.z == 0) zero_n();
      break;
    case ExploitKind::regularize: {
      const double keep = 1.0 - e.beta;
      for (std::size_t i = 0; i < out.size(); ++i) {
        if (!mask[i]) out[i] = static_cast<Real>(static_cast<double>(out[i]) * keep);
      }
      break;
    }
  }
  return out;
}

template Tensor scale_nonparticipating_grads(const Tensor&, const Mask&, double);
template Tensor64 scale_nonparticipating_grads(const Tensor64&, const Mask&, double);
template Tensor apply_exploitation(const Tensor&, const Mask&, std::size_t, const SparsityPolicy&);
template Tensor64 apply_exploitation(const Tensor64&, const Mask&, std::size_t, const SparsityPolicy&);

double rewire_fraction(std::size_t step, std::size_t total, double f0) {
  if (total == 0) return 0.0;
  const double f = f0 * (1.0 - static_cast<double>(step) / static_cast<double>(total));
  return std::max(f, 0.0);
}

Mask set_rewire(Tensor& weights, const Mask& mask, double f, Rng& rng) {
  require_same_shape(weights.shape(), mask.shape(), "set_rewire");
  const std::size_t k = drop_count(mask, f);
  Mask out = mask;
  if (k == 0) return out;
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) candidates.push_back(i);
  }
  for (std::size_t i : weakest_participating(weights, mask, k)) out[i] = 0;
  for (std::size_t i = 0; i < k; ++i) {
    std::swap(candidates[i], candidates[i + rng.below(candidates.size() - i)]);
    out[candidates[i]] = 1;
    weights[candidates[i]] = 0.0f;
  }
  return out;
}

Mask rigl_rewire(Tensor& weights, const Mask& mask, const Tensor& dense_grads, double f) {
  require_same_shape(weights.shape(), mask.shape(), "rigl_rewire");
  require_same_shape(weights.shape(), dense_grads.shape(), "rigl_rewire grads");
  const std::size_t k = drop_count(mask, f);
  Mask out = mask;
  if (k == 0) return out;
  const auto grad_mag = magnitudes(dense_grads);
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask[i]) candidates.push_back(i);
  }
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k), candidates.end(),
                    StrongerFirst{grad_mag});
  for (std::size_t i : weakest_participating(weights, mask, k)) out[i] = 0;
  for (std::size_t i = 0; i < k; ++i) {
    out[candidates[i]] = 1;
    weights[candidates[i]] = 0.0f;
  }
  return out;
}

std::vector<Mask> lottery_mask(std::span<const Tensor> trained_weights, double d) {
  std::vector<Mask> masks;
  masks.reserve(trained_weights.size());
  for (const auto& w : trained_weights) masks.push_back(topd_mask(w, d));
  return masks;
}

std::vector<Tensor> lottery_rewind(const TrajectoryLog& snapshots, std::size_t epsilon) {
  const std::size_t index = snapshots.index_of_step(epsilon);
  std::vector<Tensor> out;
  for (std::size_t l = 0; l < snapshots.layers().size(); ++l) out.push_back(snapshots.tensor_at(l, index));
  return out;
}

std::size_t mlp_weight_count(std::size_t in_dim, std::span<const std::size_t> hidden_widths, std::size_t out_dim) {
  std::size_t total = 0;
  std::size_t prev = in_dim;
  for (std::size_t h : hidden_widths) {
    total += prev * h;
    prev = h;
  }
  return total + prev * out_dim;
}

std::vector<std::size_t> reduce_arch(std::size_t in_dim, std::span<const std::size_t> hidden_widths,
                                     std::size_t out_dim, double d) {
  if (!(d > 0.0 && d <= 1.0)) throw DomainError("d must be in (0, 1]");
  std::vector<std::size_t> original(hidden_widths.begin(), hidden_widths.end());
  if (d == 1.0 || original.empty()) return original;

  auto widths_at = [&](double m) {
    std::vector<std::size_t> w;
    for (std::size_t h : original) w.push_back(static_cast<std::size_t>(std::llround(static_cast<double>(h) * m)));
    return w;
  };
  auto params_at = [&](double m) {
    const auto w = widths_at(m);
    return static_cast<double>(mlp_weight_count(in_dim, w, out_dim));
  };

  const double target = d * static_cast<double>(mlp_weight_count(in_dim, original, out_dim));
  // Invariant: params_at(lo) < target <= params_at(hi).
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (params_at(mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double over = params_at(hi) - target;
  const double under = target - params_at(lo);
  auto widths = under < over ? widths_at(lo) : widths_at(hi);
  for (std::size_t w : widths) {
    if (w < 1) throw DomainError("reduced width below 1 for d = " + std::to_string(d));
  }
  return widths;
}

}  // namespace sparsearch
