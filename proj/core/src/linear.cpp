// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#include "sparsearch/linear.hpp"

#include <vector>

namespace sparsearch {

template <typename Real>
Matrix<Real> LinearLayer<Real>::effective_weights() const {
  require_same_shape(weights.shape(), mask.shape(), "mask");
  Matrix<Real> p(weights.shape());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    p[i] = mask[i] ? weights[i] : Real{0};
  }
  return p;
}

template <typename Real>
Matrix<Real> linear_forward(const LinearLayer<Real>& layer, const Matrix<Real>& input) {
  if (input.cols() != layer.in_dim()) {
    throw DimensionError("linear_forward: input has " + std::to_string(input.cols()) +
                         " columns, layer expects " + std::to_string(layer.in_dim()));
  }
  require_same_shape(layer.bias.shape(), Shape{1, layer.out_dim()}, "linear_forward bias");
  const Matrix<Real> p = layer.effective_weights();
  const std::size_t batch = input.rows();
  const std::size_t in = layer.in_dim();
  const std::size_t out = layer.out_dim();
  Matrix<Real> output(batch, out);
  for (std::size_t b = 0; b < batch; ++b) {
    const Real* x = input.row(b).data();
    for (std::size_t o = 0; o < out; ++o) {
      const Real* w = p.row(o).data();
      double acc = static_cast<double>(layer.bias[o]);
      for (std::size_t k = 0; k < in; ++k) acc += static_cast<double>(x[k]) * static_cast<double>(w[k]);
      output(b, o) = static_cast<Real>(acc);
    }
  }
  return output;
}

template <typename Real>
LinearGrads<Real> linear_backward(const LinearLayer<Real>& layer, const Matrix<Real>& input,
                                  const Matrix<Real>& grad_out) {
  if (input.cols() != layer.in_dim() || grad_out.cols() != layer.out_dim() ||
      input.rows() != grad_out.rows()) {
    throw DimensionError("linear_backward: input " + to_string(input.shape()) + ", grad_out " +
                         to_string(grad_out.shape()) + ", weights " + to_string(layer.weights.shape()));
  }
  const Matrix<Real> p = layer.effective_weights();
  const std::size_t batch = input.rows();
  const std::size_t in = layer.in_dim();
  const std::size_t out = layer.out_dim();

  LinearGrads<Real> grads;

  // dL/dx = dL/dy * p
  grads.input = Matrix<Real>(batch, in);
  std::vector<double> acc(in);
  for (std::size_t b = 0; b < batch; ++b) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double g = static_cast<double>(grad_out(b, o));
      if (g == 0.0) continue;
      const Real* w = p.row(o).data();
      for (std::size_t k = 0; k < in; ++k) acc[k] += g * static_cast<double>(w[k]);
    }
    for (std::size_t k = 0; k < in; ++k) grads.input(b, k) = static_cast<Real>(acc[k]);
  }

  // dL/dp = dL/dy^T * x, evaluated at every entry.
  grads.weights = Matrix<Real>(out, in);
  std::vector<double> wacc(out * in, 0.0);
  std::vector<double> bacc(out, 0.0);
  for (std::size_t b = 0; b < batch; ++b) {
    const Real* x = input.row(b).data();
    for (std::size_t o = 0; o < out; ++o) {
      const double g = static_cast<double>(grad_out(b, o));
      bacc[o] += g;
      if (g == 0.0) continue;
      double* dst = wacc.data() + o * in;
      for (std::size_t k = 0; k < in; ++k) dst[k] += g * static_cast<double>(x[k]);
    }
  }
  for (std::size_t i = 0; i < wacc.size(); ++i) grads.weights[i] = static_cast<Real>(wacc[i]);
  grads.bias = Matrix<Real>(1, out);
  for (std::size_t o = 0; o < out; ++o) grads.bias[o] = static_cast<Real>(bacc[o]);
  return grads;
}

template struct LinearLayer<float>;
template struct LinearLayer<double>;
template Matrix<float> linear_forward(const LinearLayer<float>&, const Matrix<float>&);
template Matrix<double> linear_forward(const LinearLayer<double>&, const Matrix<double>&);
template LinearGrads<float> linear_backward(const LinearLayer<float>&, const Matrix<float>&,
                                            const Matrix<float>&);
template LinearGrads<double> linear_backward(const LinearLayer<double>&, const Matrix<double>&,
                                             const Matrix<double>&);

}  // namespace sparsearch
