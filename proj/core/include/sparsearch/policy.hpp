// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "sparsearch/patterns.hpp"
#include "sparsearch/rng.hpp"
#include "sparsearch/tensor.hpp"
#include "sparsearch/trajectory.hpp"

namespace sparsearch {

enum class Method { search, dense, reduce, lottery, set, rigl };

enum class ExploitKind { none, fix, reset, regularize };

// How non-participating weights are restrained after each optimizer step.
struct Exploitation {
  ExploitKind kind = ExploitKind::none;
  std::size_t v = 1;      // fix: stop rewiring and zero n from this step on
  std::size_t z = 1000;   // reset: zero n every z steps
  double beta = 0.0002;   // regularize: n <- (1 - beta) n every step

  static Exploitation none() { return {}; }
  static Exploitation fix(std::size_t v) { return {ExploitKind::fix, v, 1000, 0.0002}; }
  static Exploitation reset(std::size_t z) { return {ExploitKind::reset, 1, z, 0.0002}; }
  static Exploitation regularize(double beta) { return {ExploitKind::regularize, 1, 1000, beta}; }

  friend bool operator==(const Exploitation&, const Exploitation&) = default;
};

enum class StructureKind { unstructured, two_four_1d, two_four_2d, block };

struct Structure {
  StructureKind kind = StructureKind::unstructured;
  Axis axis = Axis::row;         // two_four_1d
  std::size_t block = 4;         // block size b
  BlockScore score = BlockScore::max_abs;
  double p = 2.0;                // p-norm exponent when score == p_norm

  friend bool operator==(const Structure&, const Structure&) = default;
};

struct SparsityPolicy {
  Method method = Method::search;
  double d = 1.0;            // participating fraction per sparsified layer
  std::size_t r = 1;         // steps between rewirings
  double s = 1.0;            // gradient scale for non-participating weights
  Exploitation exploitation;
  Structure structure;
  double rewire_f0 = 0.3;    // initial rewire fraction for set / rigl
  std::size_t lottery_epsilon = 0;  // rewind step for lottery
  bool fix_zero_momentum = false;   // under fix, also clear momentum of n

  // Throws ConfigError when a field is out of range.
  void validate() const;

  friend bool operator==(const SparsityPolicy&, const SparsityPolicy&) = default;
};

Method parse_method(std::string_view name);
std::string_view to_string(Method m);
ExploitKind parse_exploit_kind(std::string_view name);
std::string_view to_string(ExploitKind k);
StructureKind parse_structure_kind(std::string_view name);
std::string_view to_string(StructureKind k);

// Keeps the ceil(d N) largest-magnitude entries; ties keep the lower row-major index.
Mask topd_mask(const Tensor& weights, double d);

// Mask for one layer under the policy's structure (topd, 2:4 1D/2D or block).
Mask structured_mask(const Tensor& weights, double d, const Structure& structure);

// True iff step mod r == 0 and, under fix, step < v.
bool should_rewire(std::size_t step, const SparsityPolicy& policy);

// Instantiated for float and double.
template <typename Real>
Matrix<Real> scale_nonparticipating_grads(const Matrix<Real>& grads, const Mask& mask, double s);

// Exploitation hook, run after the optimizer step. Participating entries are never touched.
template <typename Real>
Matrix<Real> apply_exploitation(const Matrix<Real>& weights, const Mask& mask, std::size_t step,
                                const SparsityPolicy& policy);

// f0 (1 - step / total), clamped at 0.
double rewire_fraction(std::size_t step, std::size_t total, double f0);

// SET: drop the floor(f |p|) weakest participating entries and activate as many
// currently non-participating entries uniformly at random. Newly activated
// weights are set to zero. The drop count is clamped to the inactive slots.
Mask set_rewire(Tensor& weights, const Mask& mask, double f, Rng& rng);

// RigL: same drop rule; grows the inactive entries with the largest |gradient|
// (ties keep the lower index).
Mask rigl_rewire(Tensor& weights, const Mask& mask, const Tensor& dense_grads, double f);

// Per-layer topd mask of trained weights.
std::vector<Mask> lottery_mask(std::span<const Tensor> trained_weights, double d);

// Weights recorded at `epsilon`; the log must track every entry.
std::vector<Tensor> lottery_rewind(const TrajectoryLog& snapshots, std::size_t epsilon);

// Hidden widths of a dense MLP whose weight count is about d times that of the
// original. A uniform width multiplier is found by bisection on the
// integer-rounded parameter count.
std::vector<std::size_t> reduce_arch(std::size_t in_dim, std::span<const std::size_t> hidden_widths,
                                     std::size_t out_dim, double d);

// Total weight-matrix entries of an MLP with the given widths.
std::size_t mlp_weight_count(std::size_t in_dim, std::span<const std::size_t> hidden_widths, std::size_t out_dim);

}  // namespace sparsearch
