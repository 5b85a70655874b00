// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "sparsearch/analytics.hpp"
#include "sparsearch/error.hpp"
#include "support/oracles.hpp"

namespace sparsearch {
namespace {

TrajectoryLog single_weight_log(const std::vector<float>& values, std::uint64_t stride = 1) {
  const Shape shapes[] = {{1, 1}};
  auto log = TrajectoryLog::full(shapes, stride);
  for (std::size_t i = 0; i < values.size(); ++i) log.record(i * stride, std::vector<Tensor>{Tensor(1, 1, values[i])});
  return log;
}

std::vector<double> ar1(std::mt19937_64& gen, double phi, std::size_t n, double sd = 1.0) {
  std::normal_distribution<double> noise(0.0, sd);
  std::vector<double> out(n);
  double x = 0.0;
  for (auto& v : out) v = x = phi * x + noise(gen);
  return out;
}

TEST(Trajectory, RecordingAndFencepost) {
  const Shape shapes[] = {{2, 2}};
  auto log = TrajectoryLog::full(shapes, 10);
  log.record(0, std::vector<Tensor>{Tensor(2, 2)});
  EXPECT_EQ(log.size(), 1u);
  for (std::uint64_t s = 10; s <= 100; s += 10) log.record(s, std::vector<Tensor>{Tensor(2, 2, float(s))});
  EXPECT_EQ(log.size(), 11u);
  EXPECT_THROW(log.record(100, std::vector<Tensor>{Tensor(2, 2)}), SequencingError);
  EXPECT_THROW(log.record(50, std::vector<Tensor>{Tensor(2, 2)}), SequencingError);
}

TEST(Trajectory, ShapeMismatchThrows) {
  const Shape shapes[] = {{2, 2}};
  auto log = TrajectoryLog::full(shapes);
  EXPECT_THROW(log.record(0, std::vector<Tensor>{Tensor(2, 3)}), DimensionError);
}

TEST(Trajectory, BinaryRoundTripAndLayout) {
  const Shape shapes[] = {{2, 3}, {1, 4}};
  auto log = TrajectoryLog::subsampled(shapes, 5, 3, 99);
  EXPECT_EQ(log.layers()[0].tracked(), 3u);
  EXPECT_EQ(log.layers()[1].tracked(), 3u);
  log.record(0, std::vector<Tensor>{Tensor(2, 3, 1.5f), Tensor(1, 4, -2.0f)});
  log.record(5, std::vector<Tensor>{Tensor(2, 3, 0.5f), Tensor(1, 4, 7.0f)});
  std::stringstream buf;
  log.write(buf);
  const std::string bytes = buf.str();
  ASSERT_EQ(bytes.substr(0, 4), "SPTJ");
  // header 12 + per layer (12 + 4*3) * 2 + count 4 + per snapshot (8 + 4*6) * 2
  EXPECT_EQ(bytes.size(), 12u + 2 * 24u + 4u + 2 * 32u);
  const auto back = TrajectoryLog::read(buf);
  EXPECT_TRUE(back == log);
  EXPECT_EQ(back.stride(), 5u);
}

TEST(Trajectory, RejectsCorruptFiles) {
  std::stringstream bad("SPTX");
  EXPECT_THROW(TrajectoryLog::read(bad), IoError);
  std::stringstream truncated("SPTJ\x01");
  EXPECT_THROW(TrajectoryLog::read(truncated), IoError);
}

TEST(InferenceThreshold, TopFraction) {
  const std::vector<double> w{4, -3, 2, 1};
  EXPECT_EQ(inference_threshold(w, 0.25), 4.0);
  EXPECT_EQ(inference_threshold(w, 1.0), 1.0);
}

TEST(InferenceThreshold, QuantileOracle) {
  std::mt19937_64 gen(1);
  std::normal_distribution<double> n;
  std::vector<double> w(1000);
  for (auto& v : w) v = n(gen);
  const double tau = inference_threshold(w, 0.25);
  std::size_t above = 0;
  for (double v : w) above += std::fabs(v) >= tau;
  EXPECT_EQ(above, 250u);
}

TEST(ClassifySets, ConstantAboveThresholdIsActiveFromStart) {
  const auto sets = classify_sets(single_weight_log({2, 2, 2, 2}), 1.0);
  for (const auto& s : sets) EXPECT_EQ(s.active, 1.0);
}

TEST(ClassifySets, LateCrossingIsActiveOnlyAtTheEnd) {
  const auto sets = classify_sets(single_weight_log({2, 0.5f, 0.5f, 2, 2}), 1.0);
  EXPECT_EQ(sets[0].undecided, 1.0);
  EXPECT_EQ(sets[2].undecided, 1.0);
  EXPECT_EQ(sets[3].active, 1.0);
  EXPECT_EQ(sets[4].active, 1.0);
}

TEST(ClassifySets, MatchesSuffixScanAndIsMonotone) {
  std::mt19937_64 gen(2);
  std::normal_distribution<float> n;
  const Shape shapes[] = {{4, 6}};
  auto log = TrajectoryLog::full(shapes, 1);
  Tensor w(4, 6);
  for (std::size_t k = 0; k < w.size(); ++k) w[k] = n(gen);
  for (std::uint64_t s = 0; s < 30; ++s) {
    log.record(s, std::vector<Tensor>{w});
    for (std::size_t k = 0; k < w.size(); ++k) w[k] += 0.3f * n(gen);
  }
  const auto sets = classify_sets(log, 0.7);
  const auto brute = oracle::brute_force_sets(log, 0.7);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    double a = 0, in = 0;
    for (int v : brute[i]) {
      a += v == 1;
      in += v == -1;
    }
    EXPECT_DOUBLE_EQ(sets[i].active, a / 24.0);
    EXPECT_DOUBLE_EQ(sets[i].inactive, in / 24.0);
    EXPECT_NEAR(sets[i].active + sets[i].inactive + sets[i].undecided, 1.0, 1e-12);
    if (i > 0) {
      EXPECT_GE(sets[i].active, sets[i - 1].active);
      EXPECT_GE(sets[i].inactive, sets[i - 1].inactive);
    }
  }
  EXPECT_EQ(sets.back().undecided, 0.0);
}

TEST(CumulativeDistance, AbsoluteIncrements) {
  EXPECT_EQ(cumulative_distance(single_weight_log({0, 1, 0.5f})), (std::vector<double>{1.0, 1.5}));
  EXPECT_EQ(cumulative_distance(single_weight_log({3, 3, 3})), (std::vector<double>{0.0, 0.0}));
}

TEST(CumulativeDistance, NormalizedEndsAtOneAndSignInvariant) {
  std::mt19937_64 gen(3);
  std::normal_distribution<float> n;
  std::vector<float> v(20), neg(20);
  for (std::size_t i = 0; i < v.size(); ++i) neg[i] = -(v[i] = n(gen));
  const auto d = cumulative_distance(single_weight_log(v));
  EXPECT_EQ(d, cumulative_distance(single_weight_log(neg)));
  for (std::size_t i = 1; i < d.size(); ++i) EXPECT_GE(d[i], d[i - 1]);
  EXPECT_EQ(normalize_by_max(d).back(), 1.0);
}

TEST(CumulativeDistance, NeedsTwoSnapshots) {
  EXPECT_THROW(cumulative_distance(single_weight_log({1})), DomainError);
}

TEST(Pearson, ClosedForms) {
  const std::vector<double> x{1, 2, 3}, y{1, 2, 4}, neg{-1, -2, -3};
  EXPECT_DOUBLE_EQ(pearson(x, x), 1.0);
  EXPECT_DOUBLE_EQ(pearson(x, neg), -1.0);
  // sxy = 3, sxx = 2, syy = 14/3
  EXPECT_NEAR(pearson(x, y), 3.0 / std::sqrt(2.0 * 14.0 / 3.0), 1e-12);
  EXPECT_NEAR(pearson(x, y), 0.98198050606, 1e-10);
}

TEST(Pearson, AffineInvariance) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> n;
  std::vector<double> x(40), y(40), ax(40);
  for (std::size_t i = 0; i < 40; ++i) {
    x[i] = n(gen);
    y[i] = 0.5 * x[i] + n(gen);
    ax[i] = 7.0 * x[i] - 3.0;
  }
  EXPECT_NEAR(pearson(ax, y), pearson(x, y), 1e-9);
}

TEST(Pearson, ConstantSeriesIsUndefined) {
  const std::vector<double> c{2, 2, 2}, x{1, 2, 3};
  EXPECT_THROW(pearson(c, x), CorrelationError);
  EXPECT_THROW(pearson(x, std::vector<double>{1, 2}), DomainError);
}

TEST(Autocorrelation, LagZeroAndTrend) {
  const std::vector<double> s{1, 2, 4, 7, 11, 16};
  EXPECT_DOUBLE_EQ(autocorrelation_at_lag(s, 0), 1.0);
  EXPECT_GT(autocorrelation_at_lag(s, 1), 0.0);
  EXPECT_THROW(autocorrelation_at_lag(s, 6), DomainError);
}

TEST(Autocorrelation, Ar1DecaysGeometrically) {
  std::mt19937_64 gen(5);
  const auto s = ar1(gen, 0.9, 10000);
  EXPECT_NEAR(autocorrelation_at_lag(s, 10), std::pow(0.9, 10), 0.1);
}

TEST(DecorrelationTime, PersistentTrendNeverCrosses) {
  std::vector<double> s(50);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::exp(0.1 * static_cast<double>(i));
  EXPECT_EQ(decorrelation_time(s, 1.0, 49.0), 1.0);
}

TEST(DecorrelationTime, WhiteNoiseIsShort) {
  std::mt19937_64 gen(6);
  std::normal_distribution<double> n;
  std::vector<double> deltas;
  for (int t = 0; t < 200; ++t) {
    std::vector<double> s(200);
    for (auto& v : s) v = n(gen);
    deltas.push_back(decorrelation_time(s, 1.0, 199.0));
  }
  EXPECT_LT(median(deltas), 0.1);
}

TEST(DecorrelationTime, SlowProcessesDecorrelateLater) {
  std::mt19937_64 gen(7);
  std::vector<double> slow, fast;
  for (int t = 0; t < 100; ++t) {
    slow.push_back(decorrelation_time(ar1(gen, 0.99, 500), 1.0, 499.0));
    fast.push_back(decorrelation_time(ar1(gen, 0.5, 500), 1.0, 499.0));
  }
  EXPECT_GT(median(slow), median(fast));
}

TEST(DecorrelationTime, InterpolatesZeroCrossing) {
  // {1, 0, -1, 0} repeated has zero lag-1 correlation.
  std::vector<double> s;
  for (int i = 0; i < 40; ++i) s.push_back(i % 4 == 0 ? 1.0 : (i % 4 == 2 ? -1.0 : 0.0));
  const double delta = decorrelation_time(s, 10.0, 390.0);
  EXPECT_NEAR(delta, 10.0 / 390.0, 1e-9);
}

TEST(DecorrelationTime, ScaleInvariantAndRejectsConstant) {
  std::mt19937_64 gen(8);
  const auto s = ar1(gen, 0.8, 300);
  std::vector<double> scaled(s);
  for (auto& v : scaled) v *= 42.0;
  EXPECT_NEAR(decorrelation_time(s, 1.0, 299.0), decorrelation_time(scaled, 1.0, 299.0), 1e-12);
  EXPECT_THROW(decorrelation_time(std::vector<double>(10, 3.0), 1.0, 9.0), CorrelationError);
}

TEST(DeltaBins, MagnitudeOrderingOnSyntheticLog) {
  std::mt19937_64 gen(9);
  std::normal_distribution<double> n;
  const std::size_t weights = 100, steps = 300;
  const Shape shapes[] = {{1, weights}, {1, 3}};
  auto log = TrajectoryLog::full(shapes, 1);
  std::vector<std::vector<double>> ar(weights / 2);
  for (auto& s : ar) s = ar1(gen, 0.99, steps, 0.1);
  for (std::size_t t = 0; t < steps; ++t) {
    Tensor w(1, weights);
    for (std::size_t k = 0; k < weights; ++k) {
      w[k] = static_cast<float>(k < weights / 2 ? 5.0 + ar[k][t] : 0.1 * n(gen));
    }
    log.record(t, std::vector<Tensor>{w, Tensor(1, 3)});
  }
  const auto profile = delta_by_magnitude_bins(log, 4);
  EXPECT_EQ(profile.layer, 0u);
  ASSERT_EQ(profile.bins.size(), 4u);
  std::size_t total = 0;
  for (const auto& b : profile.bins) {
    total += b.weights;
    ASSERT_TRUE(b.median_delta.has_value());
    EXPECT_GE(*b.median_delta, 0.0);
    EXPECT_LE(*b.median_delta, 1.0);
  }
  EXPECT_EQ(total, weights);
  EXPECT_GT(*profile.bins.back().median_delta, *profile.bins.front().median_delta);

  const auto one = delta_by_magnitude_bins(log, 1);
  ASSERT_EQ(one.bins.size(), 1u);
  EXPECT_EQ(one.bins[0].weights, weights);
}

TEST(DeltaBins, IdenticalSeriesGiveIdenticalMedians) {
  const Shape shapes[] = {{1, 8}};
  auto log = TrajectoryLog::full(shapes, 1);
  std::mt19937_64 gen(10);
  const auto s = ar1(gen, 0.7, 60);
  for (std::size_t t = 0; t < s.size(); ++t) log.record(t, std::vector<Tensor>{Tensor(1, 8, float(s[t]))});
  const auto profile = delta_by_magnitude_bins(log, 4);
  for (const auto& b : profile.bins) EXPECT_EQ(b.median_delta, profile.bins[0].median_delta);
}

TEST(DeltaBins, ConstantSeriesAreExcluded) {
  const Shape shapes[] = {{1, 4}};
  auto log = TrajectoryLog::full(shapes, 1);
  std::mt19937_64 gen(11);
  std::normal_distribution<float> n;
  for (std::uint64_t t = 0; t < 20; ++t) log.record(t, std::vector<Tensor>{Tensor{{1, 1, n(gen), n(gen)}}});
  const auto profile = delta_by_magnitude_bins(log, 1);
  EXPECT_EQ(profile.excluded, 2u);
}

TEST(Median, EvenAndOdd) {
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 3, 2}), 2.5);
  EXPECT_THROW(median({}), DomainError);
}

TEST(SearchCapacity, RawFormula) {
  EXPECT_EQ(search_capacity(80, 80, 70), 0.0);
  EXPECT_EQ(search_capacity(80, 70, 70), 1.0);
  EXPECT_NEAR(search_capacity(76.71, 76.25, 75.08), 0.2822, 1e-4);
  EXPECT_THROW(search_capacity(1, 1, 1), DomainError);
}

TEST(SearchCapacity, ReportGivesBothOrientations) {
  const auto r = capacity_report(76.71, 76.25, 75.08);
  EXPECT_NEAR(r.raw, 0.46 / 1.63, 1e-9);
  EXPECT_NEAR(r.complement, 1.0 - 0.46 / 1.63, 1e-9);
  EXPECT_FALSE(r.interpretation.empty());
}

}  // namespace
}  // namespace sparsearch
