// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "sparsearch/tensor.hpp"

namespace sparsearch {

// Which entries of one layer are recorded. Indices are flat row-major and
// strictly increasing.
struct LayerTrack {
  Shape shape;
  std::vector<std::uint32_t> indices;

  std::size_t tracked() const { return indices.size(); }
  bool full() const { return indices.size() == shape.size(); }
};

struct Snapshot {
  std::uint64_t step = 0;
  std::vector<std::vector<float>> values;  // per layer, in LayerTrack::indices order
};

// Time series of (optionally subsampled) layer weights.
//
// On-disk form ("SPTJ", little-endian):
//   "SPTJ" u32 version=1 u32 layer_count
//   per layer: u32 rows, u32 cols, u32 tracked_count, u32 index[tracked_count]
//   u32 snapshot_count
//   per snapshot: u64 step, f32 value[sum of tracked_count] in layer order
class TrajectoryLog {
public:
  static constexpr std::uint32_t kVersion = 1;
  static constexpr std::size_t kDefaultTracked = 4096;

  TrajectoryLog() = default;
  TrajectoryLog(std::vector<LayerTrack> layers, std::uint64_t stride = 1);

  // Tracks every entry of every layer.
  static TrajectoryLog full(std::span<const Shape> shapes, std::uint64_t stride = 1);
  // Tracks at most max_tracked entries per layer, chosen uniformly with a seeded draw.
  static TrajectoryLog subsampled(std::span<const Shape> shapes, std::uint64_t stride,
                                  std::size_t max_tracked, std::uint64_t seed);

  // Appends the tracked entries of `weights`. Throws SequencingError unless
  // step exceeds the last recorded step.
  void record(std::uint64_t step, std::span<const Tensor> weights);
  void record_values(std::uint64_t step, std::vector<std::vector<float>> values);

  const std::vector<LayerTrack>& layers() const { return layers_; }
  const std::vector<Snapshot>& snapshots() const { return snapshots_; }
  std::uint64_t stride() const { return stride_; }
  std::size_t size() const { return snapshots_.size(); }
  bool empty() const { return snapshots_.empty(); }
  std::uint64_t first_step() const;
  std::uint64_t last_step() const;

  // Series of tracked entry `position` of `layer` over all snapshots.
  std::vector<double> series(std::size_t layer, std::size_t position) const;

  // Full tensor of `layer` at snapshot `index`; the layer must be fully tracked.
  Tensor tensor_at(std::size_t layer, std::size_t index) const;
  // Snapshot index recorded at `step`; throws LookupError if absent.
  std::size_t index_of_step(std::uint64_t step) const;

  void write(std::ostream& out) const;
  static TrajectoryLog read(std::istream& in);
  void save(const std::filesystem::path& path) const;
  static TrajectoryLog load(const std::filesystem::path& path);

  friend bool operator==(const TrajectoryLog& a, const TrajectoryLog& b);

private:
  std::vector<LayerTrack> layers_;
  std::vector<Snapshot> snapshots_;
  std::uint64_t stride_ = 1;
};

inline void record_snapshot(TrajectoryLog& log, std::uint64_t step, std::span<const Tensor> weights) {
  log.record(step, weights);
}

}  // namespace sparsearch
