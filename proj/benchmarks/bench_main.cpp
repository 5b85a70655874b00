// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "sparsearch/linear.hpp"
#include "sparsearch/patterns.hpp"
#include "sparsearch/policy.hpp"
#include "sparsearch/rng.hpp"

namespace {

using namespace sparsearch;

Tensor random_tensor(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  Tensor t(rows, cols);
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = static_cast<float>(rng.normal());
  return t;
}

void BM_TopdMask(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor w = random_tensor(n, n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(topd_mask(w, 0.1));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.size()));
}
BENCHMARK(BM_TopdMask)->Arg(64)->Arg(256);

void BM_Mask24_1d(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor w = random_tensor(n, n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(mask_24_1d(w));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.size()));
}
BENCHMARK(BM_Mask24_1d)->Arg(64)->Arg(256);

void BM_Mask24_2d(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor w = random_tensor(n, n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(mask_24_2d(w));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.size()));
}
BENCHMARK(BM_Mask24_2d)->Arg(64)->Arg(256);

void BM_MaskBlock(benchmark::State& state) {
  const Tensor w = random_tensor(256, 256, 4);
  const auto b = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mask_block(w, b, 0.25));
}
BENCHMARK(BM_MaskBlock)->Arg(4)->Arg(16);

void BM_LinearForward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  LinearLayer<float> layer(n, n);
  layer.weights = random_tensor(n, n, 5);
  layer.mask = topd_mask(layer.weights, 0.25);
  const Tensor x = random_tensor(32, n, 6);
  for (auto _ : state) benchmark::DoNotOptimize(linear_forward(layer, x));
}
BENCHMARK(BM_LinearForward)->Arg(64)->Arg(256);

void BM_LinearBackward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  LinearLayer<float> layer(n, n);
  layer.weights = random_tensor(n, n, 7);
  layer.mask = topd_mask(layer.weights, 0.25);
  const Tensor x = random_tensor(32, n, 8);
  const Tensor g = random_tensor(32, n, 9);
  for (auto _ : state) benchmark::DoNotOptimize(linear_backward(layer, x, g));
}
BENCHMARK(BM_LinearBackward)->Arg(64)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
