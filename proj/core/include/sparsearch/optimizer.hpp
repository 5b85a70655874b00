// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "sparsearch/schedule.hpp"
#include "sparsearch/tensor.hpp"

namespace sparsearch {

// SGD with heavy-ball momentum: v <- mu v + g, w <- w - lr v.
//
// The update touches every entry of the tensor regardless of any mask;
// masking only enters through the gradients the caller passes in.
template <typename Real>
class SgdMomentum {
public:
  SgdMomentum(LrSchedule schedule, double momentum);

  // Registers a parameter tensor and returns its slot.
  std::size_t add_slot(Shape shape);

  void step(std::size_t slot, Matrix<Real>& weights, const Matrix<Real>& grads, std::size_t step);

  const LrSchedule& schedule() const { return schedule_; }
  double momentum() const { return momentum_; }
  Matrix<Real>& velocity(std::size_t slot) { return velocity_.at(slot); }
  const Matrix<Real>& velocity(std::size_t slot) const { return velocity_.at(slot); }

private:
  LrSchedule schedule_;
  double momentum_;
  std::vector<Matrix<Real>> velocity_;
};

}  // namespace sparsearch
