// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#include "sparsearch/optimizer.hpp"

namespace sparsearch {

template <typename Real>
SgdMomentum<Real>::SgdMomentum(LrSchedule schedule, double momentum)
    : schedule_(std::move(schedule)), momentum_(momentum) {
  schedule_.validate();
  if (!(momentum >= 0.0 && momentum < 1.0)) throw DomainError("momentum must be in [0, 1)");
}

template <typename Real>
std::size_t SgdMomentum<Real>::add_slot(Shape shape) {
  velocity_.emplace_back(shape);
  return velocity_.size() - 1;
}

template <typename Real>
void SgdMomentum<Real>::step(std::size_t slot, Matrix<Real>& weights, const Matrix<Real>& grads,
                             std::size_t step) {
  Matrix<Real>& v = velocity_.at(slot);
  require_same_shape(weights.shape(), grads.shape(), "optimizer grads");
  require_same_shape(weights.shape(), v.shape(), "optimizer velocity");
  const double lr = lr_at(schedule_, step);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double vi = momentum_ * static_cast<double>(v[i]) + static_cast<double>(grads[i]);
    v[i] = static_cast<Real>(vi);
    weights[i] = static_cast<Real>(static_cast<double>(weights[i]) - lr * vi);
  }
}

template class SgdMomentum<float>;
template class SgdMomentum<double>;

}  // namespace sparsearch
