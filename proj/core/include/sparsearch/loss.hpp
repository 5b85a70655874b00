// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string_view>

#include "sparsearch/tensor.hpp"

namespace sparsearch {

enum class LossKind { mse, cross_entropy };

LossKind parse_loss_kind(std::string_view name);
std::string_view to_string(LossKind kind);

template <typename Real>
struct LossResult {
  double value = 0.0;
  Matrix<Real> grad;  // dL/dpredictions
};

// mse: mean over every entry of (pred - target)^2.
// cross_entropy: mean over the batch of -log softmax(pred)[target]; targets is
// batch x 1 holding class indices.
template <typename Real>
LossResult<Real> compute_loss(LossKind kind, const Matrix<Real>& predictions, const Matrix<Real>& targets);

// Fraction of rows whose argmax equals the target class index.
template <typename Real>
double accuracy(const Matrix<Real>& predictions, const Matrix<Real>& targets);

}  // namespace sparsearch
