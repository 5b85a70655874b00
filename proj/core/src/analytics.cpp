// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#include "sparsearch/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sparsearch {

double inference_threshold(std::span<const double> final_values, double d) {
  if (final_values.empty()) throw DomainError("inference_threshold of no weights");
  if (!(d > 0.0 && d <= 1.0)) throw DomainError("d must be in (0, 1]");
  std::vector<double> mag(final_values.size());
  std::transform(final_values.begin(), final_values.end(), mag.begin(), [](double v) { return std::abs(v); });
  const std::size_t k = std::min(ceil_fraction(d, mag.size()), mag.size());
  std::nth_element(mag.begin(), mag.begin() + static_cast<std::ptrdiff_t>(k - 1), mag.end(), std::greater<>());
  return mag[k - 1];
}

double inference_threshold(const TrajectoryLog& log, double d) {
  if (log.empty()) throw DomainError("inference_threshold of an empty log");
  std::vector<double> values;
  for (const auto& layer : log.snapshots().back().values) values.insert(values.end(), layer.begin(), layer.end());
  return inference_threshold(values, d);
}

SetEvolution classify_sets(const TrajectoryLog& log, double threshold) {
  if (log.empty()) throw DomainError("classify_sets of an empty log");
  const auto& snaps = log.snapshots();
  const std::size_t t_count = snaps.size();
  std::vector<std::size_t> active(t_count, 0);
  std::vector<std::size_t> inactive(t_count, 0);
  std::size_t total = 0;
  for (std::size_t l = 0; l < log.layers().size(); ++l) {
    const std::size_t n = log.layers()[l].tracked();
    total += n;
    for (std::size_t w = 0; w < n; ++w) {
      bool above = true;
      bool below = true;
      for (std::size_t i = t_count; i-- > 0;) {
        const bool is_above = std::abs(static_cast<double>(snaps[i].values[l][w])) >= threshold;
        above = above && is_above;
        below = below && !is_above;
        if (!above && !below) break;
        active[i] += above;
        inactive[i] += below;
      }
    }
  }
  SetEvolution out;
  out.reserve(t_count);
  for (std::size_t i = 0; i < t_count; ++i) {
    SetFractions f;
    f.step = snaps[i].step;
    if (total > 0) {
      f.active = static_cast<double>(active[i]) / static_cast<double>(total);
      f.inactive = static_cast<double>(inactive[i]) / static_cast<double>(total);
      f.undecided = static_cast<double>(total - active[i] - inactive[i]) / static_cast<double>(total);
    }
    out.push_back(f);
  }
  return out;
}

std::vector<double> cumulative_distance(const TrajectoryLog& log) {
  if (log.size() < 2) throw DomainError("cumulative_distance needs at least 2 snapshots");
  const auto& snaps = log.snapshots();
  std::vector<double> out;
  out.reserve(snaps.size() - 1);
  double running = 0.0;
  for (std::size_t i = 1; i < snaps.size(); ++i) {
    for (std::size_t l = 0; l < snaps[i].values.size(); ++l) {
      const auto& cur = snaps[i].values[l];
      const auto& prev = snaps[i - 1].values[l];
      for (std::size_t w = 0; w < cur.size(); ++w) {
        running += std::abs(static_cast<double>(cur[w]) - static_cast<double>(prev[w]));
      }
    }
    out.push_back(running);
  }
  return out;
}

std::vector<double> normalize_by_max(std::vector<double> series) {
  if (series.empty() || !(series.back() > 0.0)) return series;
  const double peak = series.back();
  for (auto& v : series) v /= peak;
  return series;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("pearson needs two series of equal length >= 2");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw CorrelationError("zero variance series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double autocorrelation_at_lag(std::span<const double> series, std::size_t lag) {
  if (lag >= series.size()) throw DomainError("lag must be smaller than the series length");
  const std::size_t n = series.size() - lag;
  return pearson(series.subspan(0, n), series.subspan(lag, n));
}

double decorrelation_time(std::span<const double> series, double steps_per_sample, double total_steps) {
  if (series.size() < 3) throw DomainError("decorrelation_time needs at least 3 samples");
  if (!(total_steps > 0.0)) throw DomainError("total_steps must be positive");
  std::optional<std::pair<std::size_t, double>> last;  // last defined (lag, rho) above zero
  bool any_defined = false;
  // Windows need at least two samples, so lags run up to size - 2.
  for (std::size_t lag = 0; lag + 2 <= series.size(); ++lag) {
    double rho;
    try {
      rho = autocorrelation_at_lag(series, lag);
    } catch (const CorrelationError&) {
      continue;
    }
    any_defined = true;
    if (rho <= 0.0) {
      double crossing = static_cast<double>(lag);
      if (last) {
        const auto [prev_lag, prev_rho] = *last;
        crossing = static_cast<double>(prev_lag) +
                   (static_cast<double>(lag - prev_lag)) * prev_rho / (prev_rho - rho);
      }
      return std::clamp(crossing * steps_per_sample / total_steps, 0.0, 1.0);
    }
    last = {lag, rho};
  }
  if (!any_defined) throw CorrelationError("autocorrelation undefined at every lag");
  return 1.0;
}

std::size_t largest_layer(const TrajectoryLog& log) {
  if (log.layers().empty()) throw DomainError("log has no layers");
  std::size_t best = 0;
  for (std::size_t l = 1; l < log.layers().size(); ++l) {
    if (log.layers()[l].shape.size() > log.layers()[best].shape.size()) best = l;
  }
  return best;
}

double median(std::vector<double> values) {
  if (values.empty()) throw DomainError("median of no values");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

DeltaProfile delta_by_magnitude_bins(const TrajectoryLog& log, std::size_t n_bins, std::optional<std::size_t> layer) {
  if (n_bins == 0) throw DomainError("n_bins must be >= 1");
  if (log.size() < 3) throw DomainError("delta profile needs at least 3 snapshots");
  DeltaProfile profile;
  profile.layer = layer.value_or(largest_layer(log));
  if (profile.layer >= log.layers().size()) throw LookupError("layer index out of range");
  const std::size_t n = log.layers()[profile.layer].tracked();
  if (n == 0) throw DomainError("layer has no tracked weights");

  const auto& final_values = log.snapshots().back().values[profile.layer];
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(final_values[a]) < std::abs(final_values[b]);
  });

  const double total = static_cast<double>(log.last_step() - log.first_step());
  const double per_sample = total / static_cast<double>(log.size() - 1);
  const std::size_t bins = std::min(n_bins, n);
  for (std::size_t b = 0; b < bins; ++b) {
    const std::size_t begin = b * n / bins;
    const std::size_t end = (b + 1) * n / bins;
    DeltaBin bin;
    bin.min_magnitude = std::abs(final_values[order[begin]]);
    bin.max_magnitude = std::abs(final_values[order[end - 1]]);
    bin.weights = end - begin;
    std::vector<double> deltas;
    for (std::size_t i = begin; i < end; ++i) {
      try {
        deltas.push_back(decorrelation_time(log.series(profile.layer, order[i]), per_sample, total));
      } catch (const CorrelationError&) {
        ++bin.excluded;
      }
    }
    if (!deltas.empty()) bin.median_delta = median(std::move(deltas));
    profile.excluded += bin.excluded;
    profile.bins.push_back(bin);
  }
  return profile;
}

double search_capacity(double regular, double search, double reduce) {
  if (regular == reduce) throw DomainError("search_capacity: regular equals reduce (degenerate baseline)");
  return (regular - search) / (regular - reduce);
}

CapacityReport capacity_report(double regular, double search, double reduce) {
  CapacityReport r;
  r.raw = search_capacity(regular, search, reduce);
  r.complement = 1.0 - r.raw;
  r.interpretation =
      "raw = (regular - search) / (regular - reduce): 0 when search matches regular, "
      "1 when search matches reduce; complement = 1 - raw reads as the fraction of the "
      "regular-vs-reduce gap recovered by search";
  return r;
}

}  // namespace sparsearch
