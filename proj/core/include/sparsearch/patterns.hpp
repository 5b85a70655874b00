// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sparsearch/tensor.hpp"

namespace sparsearch {

// Direction along which 2:4 groups of four are formed.
//   row: four consecutive columns of one row (the inner dimension of y = x W^T)
//   col: four consecutive rows of one column (the inner dimension of the transpose)
enum class Axis { row, col };

enum class PatternType { two_four_1d, two_four_2d, block };

enum class BlockScore { max_abs, p_norm };

struct PatternKind {
  PatternType type = PatternType::two_four_1d;
  Axis axis = Axis::row;                       // two_four_1d only
  std::size_t block = 1;                       // block only, b >= 1
  std::optional<double> keep_fraction;         // block only; when set, the kept tile count is checked too

  static PatternKind two_four_1d(Axis axis = Axis::row) { return {PatternType::two_four_1d, axis, 1, {}}; }
  static PatternKind two_four_2d() { return {PatternType::two_four_2d, Axis::row, 1, {}}; }
  static PatternKind blocks(std::size_t b, std::optional<double> keep = {}) {
    return {PatternType::block, Axis::row, b, keep};
  }
};

// Parses "1d", "1d:row", "1d:col", "2d", "block:<b>".
PatternKind parse_pattern_kind(std::string_view text);

// 4x4 binary tile, row-major.
struct TilePattern {
  std::array<std::uint8_t, 16> bits{};

  std::uint8_t at(std::size_t r, std::size_t c) const { return bits[r * 4 + c]; }
  friend bool operator==(const TilePattern&, const TilePattern&) = default;
};

// All 4x4 patterns with exactly two ones per row and per column (90 of them).
// Canonical order: lexicographic in the tuple of per-row column pairs, pairs
// ordered {0,1} < {0,2} < {0,3} < {1,2} < {1,3} < {2,3}.
const std::vector<TilePattern>& enumerate_24_2d_patterns();

// Keeps the two largest |w| in each group of four along `axis`; ties keep the
// lower index. Throws StructureError if the grouped dimension is not a multiple of 4.
Mask mask_24_1d(const Tensor& weights, Axis axis = Axis::row);

// Per aligned 4x4 tile, the 2D-valid pattern with the largest kept 1-norm;
// ties go to the earliest pattern in canonical order.
Mask mask_24_2d(const Tensor& weights);

// Scores each aligned b x b tile (max |w| by default, or the p-norm) and keeps
// the ceil(keep_fraction * tiles) best tiles whole; ties keep the lower tile index.
Mask mask_block(const Tensor& weights, std::size_t b, double keep_fraction,
                BlockScore score = BlockScore::max_abs, double p = 2.0);

struct Violation {
  std::size_t row = 0;  // origin of the offending group or tile
  std::size_t col = 0;
  std::string reason;
};

// Empty iff the mask satisfies the structure. Groups and tiles are aligned at
// multiples of 4 (or b). 2:4 validators accept at most two kept per group.
std::vector<Violation> validate_structure(const Mask& mask, const PatternKind& kind);

}  // namespace sparsearch
