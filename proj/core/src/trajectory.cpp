// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#include "sparsearch/trajectory.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "sparsearch/rng.hpp"

namespace sparsearch {

static_assert(std::endian::native == std::endian::little, "SPTJ I/O assumes a little-endian host");

namespace {

constexpr std::array<char, 4> kMagic{'S', 'P', 'T', 'J'};

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) throw IoError("truncated trajectory file");
  return value;
}

}  // namespace

TrajectoryLog::TrajectoryLog(std::vector<LayerTrack> layers, std::uint64_t stride)
    : layers_(std::move(layers)), stride_(stride == 0 ? 1 : stride) {
  for (const auto& layer : layers_) {
    for (std::size_t i = 0; i < layer.indices.size(); ++i) {
      if (layer.indices[i] >= layer.shape.size() || (i > 0 && layer.indices[i] <= layer.indices[i - 1])) {
        throw DomainError("tracked indices must be increasing and inside the layer");
      }
    }
  }
}

TrajectoryLog TrajectoryLog::full(std::span<const Shape> shapes, std::uint64_t stride) {
  std::vector<LayerTrack> layers;
  for (Shape s : shapes) {
    LayerTrack t{s, std::vector<std::uint32_t>(s.size())};
    std::iota(t.indices.begin(), t.indices.end(), std::uint32_t{0});
    layers.push_back(std::move(t));
  }
  return TrajectoryLog(std::move(layers), stride);
}

TrajectoryLog TrajectoryLog::subsampled(std::span<const Shape> shapes, std::uint64_t stride,
                                        std::size_t max_tracked, std::uint64_t seed) {
  std::vector<LayerTrack> layers;
  for (std::size_t l = 0; l < shapes.size(); ++l) {
    const Shape s = shapes[l];
    std::vector<std::uint32_t> all(s.size());
    std::iota(all.begin(), all.end(), std::uint32_t{0});
    if (all.size() > max_tracked) {
      // Partial Fisher-Yates, then restore index order.
      Rng rng(derive_seed(seed, l));
      for (std::size_t i = 0; i < max_tracked; ++i) {
        std::swap(all[i], all[i + rng.below(all.size() - i)]);
      }
      all.resize(max_tracked);
      std::sort(all.begin(), all.end());
    }
    layers.push_back({s, std::move(all)});
  }
  return TrajectoryLog(std::move(layers), stride);
}

void TrajectoryLog::record(std::uint64_t step, std::span<const Tensor> weights) {
  if (weights.size() != layers_.size()) {
    throw DimensionError("snapshot has " + std::to_string(weights.size()) + " layers, log declares " +
                         std::to_string(layers_.size()));
  }
  std::vector<std::vector<float>> values(layers_.size());
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    require_same_shape(weights[l].shape(), layers_[l].shape, "snapshot layer");
    values[l].reserve(layers_[l].indices.size());
    for (std::uint32_t idx : layers_[l].indices) values[l].push_back(weights[l][idx]);
  }
  record_values(step, std::move(values));
}

void TrajectoryLog::record_values(std::uint64_t step, std::vector<std::vector<float>> values) {
  if (!snapshots_.empty() && step <= snapshots_.back().step) {
    throw SequencingError("snapshot step " + std::to_string(step) + " does not follow step " +
                          std::to_string(snapshots_.back().step));
  }
  if (values.size() != layers_.size()) throw DimensionError("snapshot layer count mismatch");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    if (values[l].size() != layers_[l].indices.size()) throw DimensionError("snapshot tracked count mismatch");
  }
  snapshots_.push_back({step, std::move(values)});
}

std::uint64_t TrajectoryLog::first_step() const {
  if (snapshots_.empty()) throw LookupError("empty trajectory log");
  return snapshots_.front().step;
}

std::uint64_t TrajectoryLog::last_step() const {
  if (snapshots_.empty()) throw LookupError("empty trajectory log");
  return snapshots_.back().step;
}

std::vector<double> TrajectoryLog::series(std::size_t layer, std::size_t position) const {
  std::vector<double> out;
  out.reserve(snapshots_.size());
  for (const auto& s : snapshots_) out.push_back(s.values.at(layer).at(position));
  return out;
}

std::size_t TrajectoryLog::index_of_step(std::uint64_t step) const {
  const auto it = std::lower_bound(snapshots_.begin(), snapshots_.end(), step,
                                   [](const Snapshot& s, std::uint64_t v) { return s.step < v; });
  if (it == snapshots_.end() || it->step != step) {
    throw LookupError("no snapshot recorded at step " + std::to_string(step));
  }
  return static_cast<std::size_t>(it - snapshots_.begin());
}

Tensor TrajectoryLog::tensor_at(std::size_t layer, std::size_t index) const {
  const LayerTrack& t = layers_.at(layer);
  if (!t.full()) throw LookupError("layer " + std::to_string(layer) + " is subsampled; full weights unavailable");
  const auto& v = snapshots_.at(index).values.at(layer);
  return Tensor(t.shape.rows, t.shape.cols, std::vector<float>(v.begin(), v.end()));
}

void TrajectoryLog::write(std::ostream& out) const {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(layers_.size()));
  for (const auto& layer : layers_) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(layer.shape.rows));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(layer.shape.cols));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(layer.indices.size()));
    out.write(reinterpret_cast<const char*>(layer.indices.data()),
              static_cast<std::streamsize>(layer.indices.size() * sizeof(std::uint32_t)));
  }
  put<std::uint32_t>(out, static_cast<std::uint32_t>(snapshots_.size()));
  for (const auto& snap : snapshots_) {
    put<std::uint64_t>(out, snap.step);
    for (const auto& values : snap.values) {
      out.write(reinterpret_cast<const char*>(values.data()),
                static_cast<std::streamsize>(values.size() * sizeof(float)));
    }
  }
  if (!out) throw IoError("failed writing trajectory log");
}

TrajectoryLog TrajectoryLog::read(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw IoError("not an SPTJ trajectory file");
  const auto version = get<std::uint32_t>(in);
  if (version != kVersion) throw IoError("unsupported SPTJ version " + std::to_string(version));
  const auto layer_count = get<std::uint32_t>(in);
  std::vector<LayerTrack> layers(layer_count);
  for (auto& layer : layers) {
    layer.shape.rows = get<std::uint32_t>(in);
    layer.shape.cols = get<std::uint32_t>(in);
    const auto tracked = get<std::uint32_t>(in);
    if (tracked > layer.shape.size()) throw IoError("tracked count exceeds layer size");
    layer.indices.resize(tracked);
    if (!in.read(reinterpret_cast<char*>(layer.indices.data()),
                 static_cast<std::streamsize>(tracked * sizeof(std::uint32_t)))) {
      throw IoError("truncated trajectory file");
    }
  }
  const auto snapshot_count = get<std::uint32_t>(in);
  std::vector<Snapshot> snapshots(snapshot_count);
  for (auto& snap : snapshots) {
    snap.step = get<std::uint64_t>(in);
    snap.values.resize(layer_count);
    for (std::size_t l = 0; l < layer_count; ++l) {
      snap.values[l].resize(layers[l].indices.size());
      if (!in.read(reinterpret_cast<char*>(snap.values[l].data()),
                   static_cast<std::streamsize>(snap.values[l].size() * sizeof(float)))) {
        throw IoError("truncated trajectory file");
      }
    }
  }
  const std::uint64_t stride = snapshots.size() >= 2 ? snapshots[1].step - snapshots[0].step : 1;
  TrajectoryLog log(std::move(layers), stride);
  for (auto& snap : snapshots) log.record_values(snap.step, std::move(snap.values));
  return log;
}

void TrajectoryLog::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write(out);
}

TrajectoryLog TrajectoryLog::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return read(in);
}

bool operator==(const TrajectoryLog& a, const TrajectoryLog& b) {
  if (a.layers_.size() != b.layers_.size() || a.snapshots_.size() != b.snapshots_.size()) return false;
  for (std::size_t l = 0; l < a.layers_.size(); ++l) {
    if (a.layers_[l].shape != b.layers_[l].shape || a.layers_[l].indices != b.layers_[l].indices) return false;
  }
  for (std::size_t i = 0; i < a.snapshots_.size(); ++i) {
    if (a.snapshots_[i].step != b.snapshots_[i].step) return false;
    for (std::size_t l = 0; l < a.layers_.size(); ++l) {
      const auto& x = a.snapshots_[i].values[l];
      const auto& y = b.snapshots_[i].values[l];
      if (std::memcmp(x.data(), y.data(), x.size() * sizeof(float)) != 0) return false;
    }
  }
  return true;
}

}  // namespace sparsearch
