// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#include "sparsearch/patterns.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

namespace sparsearch {

namespace {

constexpr std::array<std::array<std::size_t, 2>, 6> kPairs{{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};

std::vector<TilePattern> build_2d_patterns() {
  std::vector<TilePattern> out;
  for (const auto& p0 : kPairs)
    for (const auto& p1 : kPairs)
      for (const auto& p2 : kPairs)
        for (const auto& p3 : kPairs) {
          TilePattern t;
          const std::array<const std::array<std::size_t, 2>*, 4> rows{&p0, &p1, &p2, &p3};
          std::array<int, 4> col_count{};
          for (std::size_t r = 0; r < 4; ++r) {
            for (std::size_t c : *rows[r]) {
              t.bits[r * 4 + c] = 1;
              ++col_count[c];
            }
          }
          if (std::all_of(col_count.begin(), col_count.end(), [](int n) { return n == 2; })) {
            out.push_back(t);
          }
        }
  return out;
}

// Positions of the two entries kept out of four magnitudes.
std::array<std::size_t, 2> top_two(const std::array<float, 4>& mag) {
  std::array<std::size_t, 4> order{0, 1, 2, 3};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mag[a] > mag[b]; });
  return {order[0], order[1]};
}

}  // namespace

PatternKind parse_pattern_kind(std::string_view text) {
  if (text == "1d" || text == "1d:row") return PatternKind::two_four_1d(Axis::row);
  if (text == "1d:col") return PatternKind::two_four_1d(Axis::col);
  if (text == "2d") return PatternKind::two_four_2d();
  if (text.starts_with("block:")) {
    const std::string_view num = text.substr(6);
    std::size_t b = 0;
    const auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), b);
    if (ec != std::errc{} || ptr != num.data() + num.size() || b == 0) {
      throw ConfigError("invalid block size in pattern kind '" + std::string(text) + "'");
    }
    return PatternKind::blocks(b);
  }
  throw ConfigError("unknown pattern kind '" + std::string(text) + "' (expected 1d, 1d:col, 2d or block:<b>)");
}

const std::vector<TilePattern>& enumerate_24_2d_patterns() {
  static const std::vector<TilePattern> patterns = build_2d_patterns();
  return patterns;
}

Mask mask_24_1d(const Tensor& weights, Axis axis) {
  const std::size_t grouped = axis == Axis::row ? weights.cols() : weights.rows();
  if (grouped % 4 != 0) {
    throw StructureError("2:4 1D needs the grouped dimension (" + std::to_string(grouped) +
                         ") to be a multiple of 4");
  }
  Mask mask(weights.shape(), 0);
  const std::size_t outer = axis == Axis::row ? weights.rows() : weights.cols();
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t g = 0; g < grouped; g += 4) {
      std::array<float, 4> mag{};
      for (std::size_t k = 0; k < 4; ++k) {
        mag[k] = axis == Axis::row ? std::abs(weights(o, g + k)) : std::abs(weights(g + k, o));
      }
      for (std::size_t k : top_two(mag)) {
        if (axis == Axis::row) {
          mask(o, g + k) = 1;
        } else {
          mask(g + k, o) = 1;
        }
      }
    }
  }
  return mask;
}

Mask mask_24_2d(const Tensor& weights) {
  if (weights.rows() % 4 != 0 || weights.cols() % 4 != 0) {
    throw StructureError("2:4 2D needs both dimensions to be multiples of 4, got " + to_string(weights.shape()));
  }
  const auto& patterns = enumerate_24_2d_patterns();
  Mask mask(weights.shape(), 0);
  std::array<double, 16> mag{};
  for (std::size_t tr = 0; tr < weights.rows(); tr += 4) {
    for (std::size_t tc = 0; tc < weights.cols(); tc += 4) {
      for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) mag[r * 4 + c] = std::abs(static_cast<double>(weights(tr + r, tc + c)));
      std::size_t best = 0;
      double best_norm = -1.0;
      for (std::size_t p = 0; p < patterns.size(); ++p) {
        double norm = 0.0;
        for (std::size_t i = 0; i < 16; ++i) {
          if (patterns[p].bits[i]) norm += mag[i];
        }
        if (norm > best_norm) {
          best_norm = norm;
          best = p;
        }
      }
      for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c) mask(tr + r, tc + c) = patterns[best].at(r, c);
    }
  }
  return mask;
}

Mask mask_block(const Tensor& weights, std::size_t b, double keep_fraction, BlockScore score, double p) {
  if (b == 0) throw DomainError("block size must be >= 1");
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0)) throw DomainError("keep_fraction must be in (0, 1]");
  if (weights.empty()) throw DomainError("mask_block of an empty tensor");
  if (weights.rows() % b != 0 || weights.cols() % b != 0) {
    throw StructureError("block size " + std::to_string(b) + " does not divide shape " + to_string(weights.shape()));
  }
  const std::size_t tile_rows = weights.rows() / b;
  const std::size_t tile_cols = weights.cols() / b;
  const std::size_t tiles = tile_rows * tile_cols;
  std::vector<double> scores(tiles, 0.0);
  for (std::size_t t = 0; t < tiles; ++t) {
    const std::size_t r0 = (t / tile_cols) * b;
    const std::size_t c0 = (t % tile_cols) * b;
    double s = 0.0;
    for (std::size_t r = 0; r < b; ++r)
      for (std::size_t c = 0; c < b; ++c) {
        const double a = std::abs(static_cast<double>(weights(r0 + r, c0 + c)));
        s = score == BlockScore::max_abs ? std::max(s, a) : s + std::pow(a, p);
      }
    scores[t] = score == BlockScore::max_abs ? s : std::pow(s, 1.0 / p);
  }
  const auto keep = ceil_fraction(keep_fraction, tiles);
  std::vector<std::size_t> order(tiles);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) { return scores[a] > scores[c]; });

  Mask mask(weights.shape(), 0);
  for (std::size_t i = 0; i < std::min(keep, tiles); ++i) {
    const std::size_t t = order[i];
    const std::size_t r0 = (t / tile_cols) * b;
    const std::size_t c0 = (t % tile_cols) * b;
    for (std::size_t r = 0; r < b; ++r)
      for (std::size_t c = 0; c < b; ++c) mask(r0 + r, c0 + c) = 1;
  }
  return mask;
}

std::vector<Violation> validate_structure(const Mask& mask, const PatternKind& kind) {
  std::vector<Violation> out;
  const std::size_t rows = mask.rows();
  const std::size_t cols = mask.cols();
  auto kept = [&](std::size_t r, std::size_t c) { return mask(r, c) != 0 ? 1u : 0u; };

  switch (kind.type) {
    case PatternType::two_four_1d: {
      const bool along_row = kind.axis == Axis::row;
      const std::size_t grouped = along_row ? cols : rows;
      const std::size_t outer = along_row ? rows : cols;
      if (grouped % 4 != 0) {
        out.push_back({0, 0, "grouped dimension " + std::to_string(grouped) + " is not a multiple of 4"});
        return out;
      }
      for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t g = 0; g < grouped; g += 4) {
          unsigned n = 0;
          for (std::size_t k = 0; k < 4; ++k) n += along_row ? kept(o, g + k) : kept(g + k, o);
          if (n > 2) {
            const std::size_t r = along_row ? o : g;
            const std::size_t c = along_row ? g : o;
            out.push_back({r, c, std::to_string(n) + " of 4 kept in group (at most 2 allowed)"});
          }
        }
      }
      return out;
    }
    case PatternType::two_four_2d: {
      if (rows % 4 != 0 || cols % 4 != 0) {
        out.push_back({0, 0, "shape " + to_string(mask.shape()) + " is not tileable by 4x4"});
        return out;
      }
      for (std::size_t tr = 0; tr < rows; tr += 4) {
        for (std::size_t tc = 0; tc < cols; tc += 4) {
          for (std::size_t i = 0; i < 4; ++i) {
            unsigned in_row = 0;
            unsigned in_col = 0;
            for (std::size_t k = 0; k < 4; ++k) {
              in_row += kept(tr + i, tc + k);
              in_col += kept(tr + k, tc + i);
            }
            if (in_row > 2) {
              out.push_back({tr, tc, "tile row " + std::to_string(i) + " keeps " + std::to_string(in_row) + " of 4"});
            }
            if (in_col > 2) {
              out.push_back({tr, tc, "tile column " + std::to_string(i) + " keeps " + std::to_string(in_col) + " of 4"});
            }
          }
        }
      }
      return out;
    }
    case PatternType::block: {
      const std::size_t b = kind.block;
      if (b == 0 || rows % b != 0 || cols % b != 0) {
        out.push_back({0, 0, "block size " + std::to_string(b) + " does not divide shape " + to_string(mask.shape())});
        return out;
      }
      std::size_t full = 0;
      for (std::size_t tr = 0; tr < rows; tr += b) {
        for (std::size_t tc = 0; tc < cols; tc += b) {
          std::size_t n = 0;
          for (std::size_t r = 0; r < b; ++r)
            for (std::size_t c = 0; c < b; ++c) n += kept(tr + r, tc + c);
          if (n == b * b) {
            ++full;
          } else if (n != 0) {
            out.push_back({tr, tc, "partially kept block (" + std::to_string(n) + " of " + std::to_string(b * b) + ")"});
          }
        }
      }
      if (kind.keep_fraction) {
        const std::size_t tiles = (rows / b) * (cols / b);
        const auto want = ceil_fraction(*kind.keep_fraction, tiles);
        if (full != want) {
          out.push_back({0, 0, std::to_string(full) + " blocks kept, expected " + std::to_string(want)});
        }
      }
      return out;
    }
  }
  return out;
}

}  // namespace sparsearch
