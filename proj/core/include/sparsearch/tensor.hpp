// Copyright 2026 The sparsearch Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "sparsearch/error.hpp"

namespace sparsearch {

struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const { return rows * cols; }
  friend bool operator==(const Shape&, const Shape&) = default;
};

inline std::string to_string(Shape s) {
  return std::to_string(s.rows) + "x" + std::to_string(s.cols);
}

// Dense row-major 2-D array.
template <typename T>
class Matrix {
public:
  using value_type = T;

  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : shape_{rows, cols}, data_(rows * cols, fill) {}
  explicit Matrix(Shape shape, T fill = T{}) : Matrix(shape.rows, shape.cols, fill) {}

  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : shape_{rows, cols}, data_(std::move(data)) {
    if (data_.size() != rows * cols) {
      throw DimensionError("matrix data length " + std::to_string(data_.size()) +
                           " does not match shape " + to_string(shape_));
    }
  }

  // Row-list construction, mainly for tests: Matrix<float>{{1, 2}, {3, 4}}.
  Matrix(std::initializer_list<std::initializer_list<T>> rows) {
    shape_.rows = rows.size();
    shape_.cols = rows.size() == 0 ? 0 : rows.begin()->size();
    data_.reserve(shape_.size());
    for (const auto& row : rows) {
      if (row.size() != shape_.cols) throw DimensionError("ragged row list");
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  std::size_t rows() const { return shape_.rows; }
  std::size_t cols() const { return shape_.cols; }
  Shape shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * shape_.cols + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * shape_.cols + c]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::span<T> flat() { return data_; }
  std::span<const T> flat() const { return data_; }
  std::span<T> row(std::size_t r) { return {data_.data() + r * shape_.cols, shape_.cols}; }
  std::span<const T> row(std::size_t r) const {
    return {data_.data() + r * shape_.cols, shape_.cols};
  }

  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  template <typename U>
  Matrix<U> cast() const {
    Matrix<U> out(shape_);
    for (std::size_t i = 0; i < data_.size(); ++i) out[i] = static_cast<U>(data_[i]);
    return out;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

private:
  Shape shape_;
  std::vector<T> data_;
};

using Tensor = Matrix<float>;
using Tensor64 = Matrix<double>;
// 1 = participating, 0 = non-participating.
using Mask = Matrix<std::uint8_t>;

inline void require_same_shape(Shape a, Shape b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": shape " + to_string(a) + " vs " + to_string(b));
  }
}

// ceil(fraction * n), ignoring float noise such as 0.7 * 10 = 7.000000000000001.
inline std::size_t ceil_fraction(double fraction, std::size_t n) {
  const double exact = fraction * static_cast<double>(n);
  return static_cast<std::size_t>(std::ceil(exact - 1e-9 * std::max(1.0, exact)));
}

inline std::size_t popcount(const Mask& mask) {
  std::size_t n = 0;
  for (auto m : mask.flat()) n += (m != 0);
  return n;
}

inline double density(const Mask& mask) {
  return mask.empty() ? 0.0 : static_cast<double>(popcount(mask)) / static_cast<double>(mask.size());
}

template <typename T>
bool all_finite(const Matrix<T>& m) {
  return std::all_of(m.flat().begin(), m.flat().end(),
                     [](T v) { return std::isfinite(static_cast<double>(v)); });
}

// Largest |w| over entries where mask == 0; 0 if every entry participates.
template <typename T>
double max_abs_nonparticipating(const Matrix<T>& weights, const Mask& mask) {
  require_same_shape(weights.shape(), mask.shape(), "max_abs_nonparticipating");
  double best = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (mask[i] == 0) best = std::max(best, std::abs(static_cast<double>(weights[i])));
  }
  return best;
}

}  // namespace sparsearch
