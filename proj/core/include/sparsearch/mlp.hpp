// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "sparsearch/linear.hpp"
#include "sparsearch/rng.hpp"

namespace sparsearch {

template <typename Real>
struct MlpGrads {
  std::vector<Matrix<Real>> weights;
  std::vector<Matrix<Real>> biases;
};

// Stack of masked linear layers with ReLU between them and a linear output.
template <typename Real>
class Mlp {
public:
  Mlp() = default;
  // Layers with in_dim < min_sparse_in_dim are exempt from sparsification.
  Mlp(std::size_t in_dim, std::span<const std::size_t> hidden, std::size_t out_dim,
      std::size_t min_sparse_in_dim = 16);

  // He-uniform weights, zero biases.
  void initialize(Rng& rng);

  // Caches activations for backward().
  Matrix<Real> forward(const Matrix<Real>& input);
  MlpGrads<Real> backward(const Matrix<Real>& grad_output) const;

  Matrix<Real> predict(const Matrix<Real>& input) const;

  std::vector<LinearLayer<Real>>& layers() { return layers_; }
  const std::vector<LinearLayer<Real>>& layers() const { return layers_; }
  std::size_t in_dim() const { return layers_.front().in_dim(); }
  std::size_t out_dim() const { return layers_.back().out_dim(); }

private:
  std::vector<LinearLayer<Real>> layers_;
  std::vector<Matrix<Real>> inputs_;  // input to each layer from the last forward()
  std::vector<Matrix<Real>> pre_;     // pre-activation of each hidden layer
};

}  // namespace sparsearch
