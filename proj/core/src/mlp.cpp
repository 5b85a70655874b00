// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#include "sparsearch/mlp.hpp"

#include <cmath>

namespace sparsearch {

template <typename Real>
Mlp<Real>::Mlp(std::size_t in_dim, std::span<const std::size_t> hidden, std::size_t out_dim,
               std::size_t min_sparse_in_dim) {
  std::size_t prev = in_dim;
  auto add = [&](std::size_t width) {
    if (width == 0) throw DomainError("layer width must be >= 1");
    layers_.emplace_back(prev, width, prev >= min_sparse_in_dim);
    prev = width;
  };
  if (in_dim == 0) throw DomainError("input dimension must be >= 1");
  for (std::size_t h : hidden) add(h);
  add(out_dim);
}

template <typename Real>
void Mlp<Real>::initialize(Rng& rng) {
  for (auto& layer : layers_) {
    const double bound = std::sqrt(6.0 / static_cast<double>(layer.in_dim()));
    for (auto& w : layer.weights.flat()) w = static_cast<Real>(rng.uniform(-bound, bound));
    layer.bias.fill(Real{0});
  }
}

template <typename Real>
Matrix<Real> Mlp<Real>::forward(const Matrix<Real>& input) {
  inputs_.clear();
  pre_.clear();
  Matrix<Real> x = input;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    inputs_.push_back(x);
    Matrix<Real> y = linear_forward(layers_[l], x);
    if (l + 1 < layers_.size()) {
      pre_.push_back(y);
      for (auto& v : y.flat()) v = v > Real{0} ? v : Real{0};
    }
    x = std::move(y);
  }
  return x;
}

template <typename Real>
MlpGrads<Real> Mlp<Real>::backward(const Matrix<Real>& grad_output) const {
  if (inputs_.size() != layers_.size()) throw SequencingError("Mlp::backward called before forward");
  MlpGrads<Real> grads;
  grads.weights.resize(layers_.size());
  grads.biases.resize(layers_.size());
  Matrix<Real> g = grad_output;
  for (std::size_t l = layers_.size(); l-- > 0;) {
    if (l + 1 < layers_.size()) {
      const Matrix<Real>& pre = pre_[l];
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(pre[i] > Real{0})) g[i] = Real{0};
      }
    }
    LinearGrads<Real> lg = linear_backward(layers_[l], inputs_[l], g);
    grads.weights[l] = std::move(lg.weights);
    grads.biases[l] = std::move(lg.bias);
    g = std::move(lg.input);
  }
  return grads;
}

template <typename Real>
Matrix<Real> Mlp<Real>::predict(const Matrix<Real>& input) const {
  Matrix<Real> x = input;
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    x = linear_forward(layers_[l], x);
    if (l + 1 < layers_.size()) {
      for (auto& v : x.flat()) v = v > Real{0} ? v : Real{0};
    }
  }
  return x;
}

template class Mlp<float>;
template class Mlp<double>;

}  // namespace sparsearch
