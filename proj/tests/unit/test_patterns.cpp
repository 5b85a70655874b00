// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "sparsearch/error.hpp"
#include "sparsearch/patterns.hpp"
#include "sparsearch/policy.hpp"
#include "support/oracles.hpp"

namespace sparsearch {
namespace {

Tensor random_tensor(std::mt19937_64& gen, std::size_t rows, std::size_t cols) {
  std::normal_distribution<float> n;
  Tensor t(rows, cols);
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = n(gen);
  return t;
}

TEST(Mask24_1d, KeepsTopTwoPerGroup) {
  EXPECT_EQ(mask_24_1d(Tensor{{1, -2, 0.5f, 3}}), (Mask{{0, 1, 0, 1}}));
}

TEST(Mask24_1d, AllZeroGroupKeepsFirstTwo) {
  EXPECT_EQ(mask_24_1d(Tensor(1, 4)), (Mask{{1, 1, 0, 0}}));
}

TEST(Mask24_1d, KeptPairDominatesAllSixPairs) {
  std::mt19937_64 gen(1);
  for (int t = 0; t < 50; ++t) {
    const Tensor w = random_tensor(gen, 2, 8);
    const Mask m = mask_24_1d(w);
    for (std::size_t r = 0; r < 2; ++r) {
      for (std::size_t g = 0; g < 8; g += 4) {
        double kept_norm = 0.0;
        std::size_t count = 0;
        for (std::size_t c = g; c < g + 4; ++c) {
          if (m(r, c)) {
            kept_norm += std::fabs(w(r, c));
            ++count;
          }
        }
        EXPECT_EQ(count, 2u);
        for (std::size_t a = g; a < g + 4; ++a) {
          for (std::size_t b = a + 1; b < g + 4; ++b) {
            EXPECT_GE(kept_norm, double(std::fabs(w(r, a))) + double(std::fabs(w(r, b))));
          }
        }
      }
    }
  }
}

TEST(Mask24_1d, ColumnAxisGroupsRows) {
  const Tensor w = Tensor{{1, -2, 0.5f, 3}};
  Tensor wt(4, 1);
  for (std::size_t k = 0; k < 4; ++k) wt(k, 0) = w(0, k);
  const Mask m = mask_24_1d(wt, Axis::col);
  EXPECT_EQ(m, (Mask{{0}, {1}, {0}, {1}}));
}

TEST(Mask24_1d, NonDivisibleThrows) {
  EXPECT_THROW(mask_24_1d(Tensor(2, 6)), StructureError);
  EXPECT_THROW(mask_24_1d(Tensor(6, 4), Axis::col), StructureError);
}

TEST(Patterns2d, NinetyPatternsMatchingBruteForce) {
  const auto& ours = enumerate_24_2d_patterns();
  const auto brute = oracle::brute_force_2d_patterns();
  ASSERT_EQ(ours.size(), 90u);
  ASSERT_EQ(brute.size(), 90u);
  // The brute-force loop visits row choices in canonical order.
  for (std::size_t i = 0; i < 90; ++i) EXPECT_EQ(ours[i].bits, brute[i]) << "pattern " << i;
}

TEST(Patterns2d, EveryPatternIsDoublyTwoFour) {
  for (const auto& p : enumerate_24_2d_patterns()) {
    for (std::size_t i = 0; i < 4; ++i) {
      int row = 0, col = 0;
      for (std::size_t j = 0; j < 4; ++j) {
        row += p.at(i, j);
        col += p.at(j, i);
      }
      EXPECT_EQ(row, 2);
      EXPECT_EQ(col, 2);
    }
  }
}

TEST(Mask24_2d, AllOnesTilePicksCanonicalFirst) {
  const Mask m = mask_24_2d(Tensor(4, 4, 1.0f));
  const auto& first = enumerate_24_2d_patterns().front();
  for (std::size_t k = 0; k < 16; ++k) EXPECT_EQ(m[k], first.bits[k]);
}

TEST(Mask24_2d, HeavyDiagonalIsKept) {
  Tensor w(4, 4, 1.0f);
  for (std::size_t i = 0; i < 4; ++i) w(i, i) = 10.0f;
  const Mask m = mask_24_2d(w);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_TRUE(m(i, i));
  EXPECT_EQ(oracle::tile_kept_norm(w, m, 0, 0), oracle::tile_best_norm(w, 0, 0));
}

TEST(Mask24_2d, OptimalOnEveryTile) {
  std::mt19937_64 gen(2);
  for (int t = 0; t < 20; ++t) {
    const Tensor w = random_tensor(gen, 8, 8);
    const Mask m = mask_24_2d(w);
    for (std::size_t r = 0; r < 8; r += 4) {
      for (std::size_t c = 0; c < 8; c += 4) {
        EXPECT_EQ(oracle::tile_kept_norm(w, m, r, c), oracle::tile_best_norm(w, r, c));
      }
    }
  }
}

TEST(Mask24_2d, SatisfiesBothOneDimensionalAxes) {
  std::mt19937_64 gen(3);
  const Mask m = mask_24_2d(random_tensor(gen, 8, 12));
  EXPECT_TRUE(validate_structure(m, PatternKind::two_four_1d(Axis::row)).empty());
  EXPECT_TRUE(validate_structure(m, PatternKind::two_four_1d(Axis::col)).empty());
  EXPECT_TRUE(validate_structure(m, PatternKind::two_four_2d()).empty());
  EXPECT_EQ(density(m), 0.5);
}

TEST(Mask24_2d, NonDivisibleThrows) {
  EXPECT_THROW(mask_24_2d(Tensor(3, 64)), StructureError);
}

TEST(MaskBlock, UnitBlocksAreTopd) {
  std::mt19937_64 gen(4);
  const Tensor w = random_tensor(gen, 6, 10);
  for (double keep : {0.1, 0.33, 0.5, 1.0}) EXPECT_EQ(mask_block(w, 1, keep), topd_mask(w, keep));
}

TEST(MaskBlock, KeepsBestScoringTiles) {
  // tile maxima: top-left 5, top-right 3, bottom-left 4, bottom-right 1
  const Tensor w{{5, 0, 3, 0}, {0, 1, 0, 1}, {0, 4, 0, 1}, {2, 0, 0, 0}};
  EXPECT_EQ(mask_block(w, 2, 0.5), (Mask{{1, 1, 0, 0}, {1, 1, 0, 0}, {1, 1, 0, 0}, {1, 1, 0, 0}}));
}

TEST(MaskBlock, KeptScoresDominateDropped) {
  std::mt19937_64 gen(5);
  for (int t = 0; t < 50; ++t) {
    const Tensor w = random_tensor(gen, 8, 8);
    const Mask m = mask_block(w, 4, 0.5);
    double min_kept = INFINITY, max_dropped = 0.0;
    for (std::size_t r = 0; r < 8; r += 4) {
      for (std::size_t c = 0; c < 8; c += 4) {
        double score = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
          for (std::size_t j = 0; j < 4; ++j) score = std::max(score, double(std::fabs(w(r + i, c + j))));
        }
        (m(r, c) ? min_kept : max_dropped) = m(r, c) ? std::min(min_kept, score) : std::max(max_dropped, score);
      }
    }
    EXPECT_GE(min_kept, max_dropped);
  }
}

TEST(MaskBlock, RaisingKeepFractionIsNested) {
  std::mt19937_64 gen(6);
  const Tensor w = random_tensor(gen, 12, 16);
  Mask prev = mask_block(w, 2, 0.05);
  for (double keep = 0.1; keep <= 1.0; keep += 0.05) {
    const Mask cur = mask_block(w, 2, keep);
    for (std::size_t k = 0; k < cur.size(); ++k) {
      if (prev[k]) EXPECT_TRUE(cur[k]);
    }
    prev = cur;
  }
}

TEST(MaskBlock, PNormScoring) {
  // Tile 0 has one large entry, tile 1 many medium ones.
  const Tensor w{{3, 0, 2, 2}, {0, 0, 2, 2}};
  EXPECT_EQ(mask_block(w, 2, 0.5, BlockScore::max_abs), (Mask{{1, 1, 0, 0}, {1, 1, 0, 0}}));
  EXPECT_EQ(mask_block(w, 2, 0.5, BlockScore::p_norm, 2.0), (Mask{{0, 0, 1, 1}, {0, 0, 1, 1}}));
}

TEST(MaskBlock, NonDivisibleThrows) {
  EXPECT_THROW(mask_block(Tensor(4, 6), 4, 0.5), StructureError);
}

TEST(Validate, AllOnesViolatesEveryGroup) {
  const auto v = validate_structure(Mask(4, 8, 1), PatternKind::two_four_1d());
  EXPECT_EQ(v.size(), 8u);
}

TEST(Validate, AcceptsFewerThanTwoKept) {
  EXPECT_TRUE(validate_structure(Mask{{1, 0, 0, 0}}, PatternKind::two_four_1d()).empty());
}

TEST(Validate, TwoDimensionalRejectsColumnOverflow) {
  Mask m(4, 4);
  for (std::size_t r = 0; r < 4; ++r) {
    m(r, 0) = 1;
    m(r, 1) = 1;
  }
  EXPECT_TRUE(validate_structure(m, PatternKind::two_four_1d()).empty());
  EXPECT_FALSE(validate_structure(m, PatternKind::two_four_2d()).empty());
}

TEST(Validate, BlockRequiresWholeTiles) {
  Mask m(4, 4);
  m(0, 0) = 1;
  EXPECT_FALSE(validate_structure(m, PatternKind::blocks(2)).empty());
  m(0, 1) = m(1, 0) = m(1, 1) = 1;
  EXPECT_TRUE(validate_structure(m, PatternKind::blocks(2)).empty());
  EXPECT_FALSE(validate_structure(m, PatternKind::blocks(2, 0.5)).empty());
}

TEST(Validate, ConstructorOutputsAreCompliant) {
  std::mt19937_64 gen(7);
  for (int t = 0; t < 100; ++t) {
    const Tensor w = random_tensor(gen, 4 * (1 + gen() % 3), 4 * (1 + gen() % 3));
    EXPECT_TRUE(validate_structure(mask_24_1d(w), PatternKind::two_four_1d()).empty());
    EXPECT_TRUE(validate_structure(mask_24_1d(w, Axis::col), PatternKind::two_four_1d(Axis::col)).empty());
    EXPECT_TRUE(validate_structure(mask_24_2d(w), PatternKind::two_four_2d()).empty());
    EXPECT_TRUE(validate_structure(mask_block(w, 4, 0.4), PatternKind::blocks(4, 0.4)).empty());
  }
}

TEST(ParsePatternKind, KnownForms) {
  EXPECT_EQ(parse_pattern_kind("1d").type, PatternType::two_four_1d);
  EXPECT_EQ(parse_pattern_kind("1d:col").axis, Axis::col);
  EXPECT_EQ(parse_pattern_kind("2d").type, PatternType::two_four_2d);
  const auto b = parse_pattern_kind("block:8");
  EXPECT_EQ(b.type, PatternType::block);
  EXPECT_EQ(b.block, 8u);
  EXPECT_THROW(parse_pattern_kind("3d"), ConfigError);
  EXPECT_THROW(parse_pattern_kind("block:0"), ConfigError);
  EXPECT_THROW(parse_pattern_kind("block:x"), ConfigError);
}

}  // namespace
}  // namespace sparsearch
