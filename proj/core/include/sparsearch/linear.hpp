// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "sparsearch/tensor.hpp"

namespace sparsearch {

// Fully connected layer y = x (W ⊙ M)^T + b. Only W is ever masked.
template <typename Real>
struct LinearLayer {
  Matrix<Real> weights;  // out_dim x in_dim
  Mask mask;             // congruent to weights
  Matrix<Real> bias;     // 1 x out_dim
  bool sparsify = true;  // whether the sparsity policy applies to this layer

  LinearLayer() = default;
  LinearLayer(std::size_t in_dim, std::size_t out_dim, bool sparsify_layer = true)
      : weights(out_dim, in_dim), mask(out_dim, in_dim, 1), bias(1, out_dim), sparsify(sparsify_layer) {}

  std::size_t in_dim() const { return weights.cols(); }
  std::size_t out_dim() const { return weights.rows(); }

  // p = w ⊙ m
  Matrix<Real> effective_weights() const;
};

template <typename Real>
struct LinearGrads {
  Matrix<Real> input;    // dL/dx, batch x in_dim
  Matrix<Real> weights;  // dL/dp, dense: defined at masked entries too
  Matrix<Real> bias;     // 1 x out_dim
};

template <typename Real>
Matrix<Real> linear_forward(const LinearLayer<Real>& layer, const Matrix<Real>& input);

template <typename Real>
LinearGrads<Real> linear_backward(const LinearLayer<Real>& layer, const Matrix<Real>& input,
                                  const Matrix<Real>& grad_out);

}  // namespace sparsearch
