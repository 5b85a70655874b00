// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sparsearch/trajectory.hpp"

namespace sparsearch {

// Magnitude tau such that exactly ceil(d N) of the values satisfy |w| >= tau
// (the ceil(d N)-th largest magnitude).
double inference_threshold(std::span<const double> final_values, double d);
// Same, over the final snapshot of every layer in the log.
double inference_threshold(const TrajectoryLog& log, double d);

struct SetFractions {
  std::uint64_t step = 0;
  double active = 0.0;
  double inactive = 0.0;
  double undecided = 0.0;
};

using SetEvolution = std::vector<SetFractions>;

// A weight is active at snapshot i iff |w| >= threshold at every snapshot
// j >= i, inactive iff |w| < threshold at every j >= i, undecided otherwise.
SetEvolution classify_sets(const TrajectoryLog& log, double threshold);

// Partial sums over consecutive snapshots of sum_w |w_next - w_prev|, one
// entry per transition (size() - 1 entries).
std::vector<double> cumulative_distance(const TrajectoryLog& log);
// Divides by the final value when it is positive.
std::vector<double> normalize_by_max(std::vector<double> series);

// Pearson correlation. Throws CorrelationError when either series is constant.
double pearson(std::span<const double> x, std::span<const double> y);

// Pearson between series[0 .. n-1-lag] and series[lag .. n-1].
double autocorrelation_at_lag(std::span<const double> series, std::size_t lag);

// First lag at which the autocorrelation is <= 0, linearly interpolated with
// the previous defined lag, in steps (lag * steps_per_sample) divided by
// total_steps. Returns 1 if the autocorrelation never reaches 0.
// Throws CorrelationError if no lag has a defined correlation.
double decorrelation_time(std::span<const double> series, double steps_per_sample, double total_steps);

struct DeltaBin {
  double min_magnitude = 0.0;   // final |w| range of the bin
  double max_magnitude = 0.0;
  std::size_t weights = 0;
  std::size_t excluded = 0;     // constant series, no Δ
  std::optional<double> median_delta;
};

struct DeltaProfile {
  std::size_t layer = 0;
  std::vector<DeltaBin> bins;
  std::size_t excluded = 0;
};

// Layer with the most entries; ties go to the first.
std::size_t largest_layer(const TrajectoryLog& log);

// Bins the tracked weights of one layer into n_bins equal-count quantile bins
// by final |w| and reports the median Δ of each bin.
DeltaProfile delta_by_magnitude_bins(const TrajectoryLog& log, std::size_t n_bins,
                                     std::optional<std::size_t> layer = std::nullopt);

double median(std::vector<double> values);

// f = (regular - search) / (regular - reduce).
double search_capacity(double regular, double search, double reduce);

struct CapacityReport {
  double raw = 0.0;         // the formula value
  double complement = 0.0;  // 1 - raw
  std::string interpretation;
};

CapacityReport capacity_report(double regular, double search, double reduce);

}  // namespace sparsearch
