// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#include "sparsearch/loss.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace sparsearch {

LossKind parse_loss_kind(std::string_view name) {
  if (name == "mse") return LossKind::mse;
  if (name == "cross_entropy") return LossKind::cross_entropy;
  throw ConfigError("unknown loss kind '" + std::string(name) + "'");
}

std::string_view to_string(LossKind kind) {
  return kind == LossKind::mse ? "mse" : "cross_entropy";
}

namespace {

std::size_t class_index(double value, std::size_t classes) {
  const double rounded = std::round(value);
  if (rounded < 0 || rounded >= static_cast<double>(classes) || rounded != value) {
    throw DomainError("class index " + std::to_string(value) + " outside [0, " +
                      std::to_string(classes) + ")");
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace

template <typename Real>
LossResult<Real> compute_loss(LossKind kind, const Matrix<Real>& predictions, const Matrix<Real>& targets) {
  if (predictions.rows() == 0) throw DomainError("loss of an empty batch");
  if (targets.rows() != predictions.rows()) {
    throw DimensionError("loss: " + std::to_string(predictions.rows()) + " predictions vs " +
                         std::to_string(targets.rows()) + " targets");
  }
  LossResult<Real> result;
  result.grad = Matrix<Real>(predictions.shape());
  const std::size_t batch = predictions.rows();

  if (kind == LossKind::mse) {
    require_same_shape(predictions.shape(), targets.shape(), "mse");
    const double n = static_cast<double>(predictions.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
      const double diff = static_cast<double>(predictions[i]) - static_cast<double>(targets[i]);
      sum += diff * diff;
      result.grad[i] = static_cast<Real>(2.0 * diff / n);
    }
    result.value = sum / n;
    return result;
  }

  if (targets.cols() != 1) throw DimensionError("cross_entropy targets must be batch x 1 class indices");
  const std::size_t classes = predictions.cols();
  std::vector<double> prob(classes);
  double sum = 0.0;
  for (std::size_t b = 0; b < batch; ++b) {
    const auto logits = predictions.row(b);
    const std::size_t target = class_index(static_cast<double>(targets(b, 0)), classes);
    double peak = static_cast<double>(logits[0]);
    for (auto v : logits) peak = std::max(peak, static_cast<double>(v));
    double z = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      prob[c] = std::exp(static_cast<double>(logits[c]) - peak);
      z += prob[c];
    }
    sum += -(static_cast<double>(logits[target]) - peak - std::log(z));
    for (std::size_t c = 0; c < classes; ++c) {
      const double p = prob[c] / z - (c == target ? 1.0 : 0.0);
      result.grad(b, c) = static_cast<Real>(p / static_cast<double>(batch));
    }
  }
  result.value = sum / static_cast<double>(batch);
  return result;
}

template <typename Real>
double accuracy(const Matrix<Real>& predictions, const Matrix<Real>& targets) {
  if (predictions.rows() == 0) throw DomainError("accuracy of an empty batch");
  if (targets.rows() != predictions.rows() || targets.cols() != 1) {
    throw DimensionError("accuracy: targets must be batch x 1 class indices");
  }
  std::size_t correct = 0;
  for (std::size_t b = 0; b < predictions.rows(); ++b) {
    const auto row = predictions.row(b);
    std::size_t best = 0;
    for (std::size_t c = 1; c < row.size(); ++c) {
      if (row[c] > row[best]) best = c;
    }
    correct += (static_cast<double>(best) == static_cast<double>(targets(b, 0)));
  }
  return static_cast<double>(correct) / static_cast<double>(predictions.rows());
}

template LossResult<float> compute_loss(LossKind, const Matrix<float>&, const Matrix<float>&);
template LossResult<double> compute_loss(LossKind, const Matrix<double>&, const Matrix<double>&);
template double accuracy(const Matrix<float>&, const Matrix<float>&);
template double accuracy(const Matrix<double>&, const Matrix<double>&);

}  // namespace sparsearch
