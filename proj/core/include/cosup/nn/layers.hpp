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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cosup/tensor.hpp"
#include "cosup/util/rng.hpp"

namespace cosup::nn {

// Train mode uses batch statistics and caches activations for backward;
// eval mode uses running statistics and caches nothing.
enum class Mode { kTrain, kEval };

// Which gradients a backward pass should produce.
struct Backprop {
  bool params = true;
  bool input = true;
};

template <typename T>
struct Parameter {
  Tensor<T> value;
  Tensor<T> grad;

  Parameter() = default;
  explicit Parameter(const Shape& shape) : value(shape), grad(shape) {}
  void zero_grad() { grad.fill(T{0}); }
};

// Non-owning views handed to optimizers and serializers. They point into
// the network that produced them and are invalidated by copying/moving it.
template <typename T>
struct ParamRef {
  std::string name;
  Parameter<T>* param;
};

template <typename T>
struct BufferRef {
  std::string name;
  Tensor<T>* tensor;
};

void fill_normal(std::span<float> values, double mean, double stddev,
                 RngStream& rng);
void fill_normal(std::span<double> values, double mean, double stddev,
                 RngStream& rng);

struct ConvGeometry {
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 1;
  std::size_t stride = 1;
  std::size_t padding = 0;
};

// 2-D cross-correlation, weight (out, in, k, k), no bias.
template <typename T>
class Conv2d {
 public:
  Conv2d() = default;
  explicit Conv2d(const ConvGeometry& geometry);

  Tensor<T> forward(const Tensor<T>& x, Mode mode);
  Tensor<T> backward(const Tensor<T>& grad_out, Backprop what);

  std::size_t output_size(std::size_t input_size) const;
  const ConvGeometry& geometry() const { return geom_; }
  Parameter<T>& weight() { return weight_; }
  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out);

 private:
  ConvGeometry geom_;
  Parameter<T> weight_;
  Shape input_shape_;
  std::vector<T> columns_;  // per-sample im2col buffers from the last train forward
};

// Fractionally-strided convolution, weight (in, out, k, k), no bias.
template <typename T>
class ConvTranspose2d {
 public:
  ConvTranspose2d() = default;
  explicit ConvTranspose2d(const ConvGeometry& geometry);

  Tensor<T> forward(const Tensor<T>& x, Mode mode);
  Tensor<T> backward(const Tensor<T>& grad_out, Backprop what);

  std::size_t output_size(std::size_t input_size) const;
  const ConvGeometry& geometry() const { return geom_; }
  Parameter<T>& weight() { return weight_; }
  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out);

 private:
  ConvGeometry geom_;
  Parameter<T> weight_;
  Tensor<T> input_;
};

// Per-channel batch normalization over (N, H, W).
template <typename T>
class BatchNorm2d {
 public:
  static constexpr double kEpsilon = 1e-5;
  static constexpr double kMomentum = 0.1;

  BatchNorm2d() = default;
  explicit BatchNorm2d(std::size_t channels);

  Tensor<T> forward(const Tensor<T>& x, Mode mode);
  Tensor<T> backward(const Tensor<T>& grad_out, Backprop what);

  Parameter<T>& gamma() { return gamma_; }
  Parameter<T>& beta() { return beta_; }
  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out);
  void collect_buffers(const std::string& prefix, std::vector<BufferRef<T>>& out);

 private:
  std::size_t channels_ = 0;
  Parameter<T> gamma_;
  Parameter<T> beta_;
  Tensor<T> running_mean_;
  Tensor<T> running_var_;
  Mode last_mode_ = Mode::kTrain;
  Tensor<T> normalized_;
  std::vector<T> inv_std_;
};

// y = x W^T + b, weight (out, in).
template <typename T>
class Linear {
 public:
  Linear() = default;
  Linear(std::size_t in_features, std::size_t out_features);

  Tensor<T> forward(const Tensor<T>& x, Mode mode);
  Tensor<T> backward(const Tensor<T>& grad_out, Backprop what);

  Parameter<T>& weight() { return weight_; }
  Parameter<T>& bias() { return bias_; }
  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out);

 private:
  Parameter<T> weight_;
  Parameter<T> bias_;
  Tensor<T> input_;
};

// Lookup table with one row per class.
template <typename T>
class Embedding {
 public:
  Embedding() = default;
  Embedding(std::size_t rows, std::size_t dim);

  Tensor<T> forward(std::span<const int> ids, Mode mode);
  void backward(const Tensor<T>& grad_out);

  std::size_t rows() const { return table_.value.dim(0); }
  Parameter<T>& table() { return table_; }
  void collect(const std::string& prefix, std::vector<ParamRef<T>>& out);

 private:
  Parameter<T> table_;
  std::vector<int> ids_;
};

template <typename T>
class ReLU {
 public:
  Tensor<T> forward(Tensor<T> x, Mode mode);
  Tensor<T> backward(Tensor<T> grad_out) const;

 private:
  Tensor<T> output_;
};

template <typename T>
class LeakyReLU {
 public:
  explicit LeakyReLU(double slope = 0.2) : slope_(static_cast<T>(slope)) {}
  Tensor<T> forward(Tensor<T> x, Mode mode);
  Tensor<T> backward(Tensor<T> grad_out) const;

 private:
  T slope_;
  Tensor<T> input_;
};

template <typename T>
class Tanh {
 public:
  Tensor<T> forward(Tensor<T> x, Mode mode);
  Tensor<T> backward(Tensor<T> grad_out) const;

 private:
  Tensor<T> output_;
};

// (N, C, H, W) -> (N, C)
template <typename T>
Tensor<T> global_average_pool(const Tensor<T>& x);
template <typename T>
Tensor<T> global_average_pool_backward(const Tensor<T>& grad_out,
                                       const Shape& input_shape);

// Elementwise a += b.
template <typename T>
void add_inplace(Tensor<T>& a, const Tensor<T>& b);

}  // namespace cosup::nn
