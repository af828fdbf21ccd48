// Copyright 2026 The cosup Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <functional>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "cosup/util/errors.hpp"

namespace cosup {

using Shape = std::vector<std::size_t>;

inline std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_to_string(const Shape& shape);

// Dense row-major tensor. Image batches use NCHW order.
template <typename T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T{0})
      : shape_(std::move(shape)), data_(shape_size(shape_), fill) {}
  Tensor(Shape shape, std::vector<T> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != shape_size(shape_)) {
      throw ArgumentError("tensor data size " + std::to_string(data_.size()) +
                          " does not match shape " + shape_to_string(shape_));
    }
  }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T& at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) {
    assert(rank() == 4);
    return data_[((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
  }
  const T& at(std::size_t n, std::size_t c, std::size_t h,
              std::size_t w) const {
    assert(rank() == 4);
    return data_[((n * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
  }

  // Elements per leading-axis slice (one image of a batch, one row of logits).
  std::size_t stride0() const { return shape_.empty() ? 0 : size() / shape_[0]; }
  std::span<T> slice(std::size_t i) {
    return std::span<T>(data_).subspan(i * stride0(), stride0());
  }
  std::span<const T> slice(std::size_t i) const {
    return std::span<const T>(data_).subspan(i * stride0(), stride0());
  }

  void reshape(Shape shape) {
    if (shape_size(shape) != data_.size()) {
      throw ArgumentError("cannot reshape " + shape_to_string(shape_) +
                          " to " + shape_to_string(shape));
    }
    shape_ = std::move(shape);
  }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  template <typename U>
  Tensor<U> cast() const {
    std::vector<U> out(data_.begin(), data_.end());
    return Tensor<U>(shape_, std::move(out));
  }

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<T> data_;
};

// Gathers leading-axis slices in the given order.
template <typename T>
Tensor<T> gather_rows(const Tensor<T>& src, std::span<const std::size_t> rows) {
  Shape shape = src.shape();
  shape[0] = rows.size();
  Tensor<T> out(shape);
  const std::size_t stride = src.stride0();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto from = src.slice(rows[i]);
    std::copy(from.begin(), from.end(), out.data() + i * stride);
  }
  return out;
}

}  // namespace cosup
