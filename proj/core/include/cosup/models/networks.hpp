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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cosup/models/net_config.hpp"
#include "cosup/nn/layers.hpp"
#include "cosup/tensor.hpp"
#include "cosup/util/rng.hpp"

namespace cosup::models {

using nn::Backprop;
using nn::BufferRef;
using nn::Mode;
using nn::ParamRef;

// Conditional DCGAN generator.
//
// The label is embedded into a z_dim vector and concatenated with z; the
// resulting (2 z_dim, 1, 1) input is projected to 4x4 by a transposed conv
// and upsampled by stride-2 transposed convs, each followed by batch norm
// and ReLU. The last layer maps to `channels` and applies tanh.
template <typename T>
class Generator {
 public:
  explicit Generator(const NetConfig& cfg);

  // z: (N, z_dim); labels: N ids in [0, K). Returns (N, C, S, S) in (-1, 1).
  Tensor<T> forward(const Tensor<T>& z, std::span<const int> labels, Mode mode);
  // Accumulates parameter gradients for the last train-mode forward.
  void backward(const Tensor<T>& grad_images);

  std::vector<ParamRef<T>> parameters();
  std::vector<BufferRef<T>> buffers();
  void zero_grad();
  const NetConfig& config() const { return cfg_; }

 private:
  NetConfig cfg_;
  nn::Embedding<T> embed_;
  std::vector<nn::ConvTranspose2d<T>> up_;
  std::vector<nn::BatchNorm2d<T>> norm_;
  std::vector<nn::ReLU<T>> relu_;
  nn::Tanh<T> tanh_;
};

// Conditional DCGAN discriminator. The label enters as K one-hot planes
// stacked after the image channels. Strided convs with LeakyReLU(0.2), batch
// norm on every conv but the first, and a 4x4 valid conv to one logit.
template <typename T>
class Discriminator {
 public:
  static constexpr double kLeakySlope = 0.2;

  explicit Discriminator(const NetConfig& cfg);

  // Returns (N,) logits.
  Tensor<T> forward_logits(const Tensor<T>& images, std::span<const int> labels,
                           Mode mode);
  // Returns (N,) probabilities of "real", strictly inside (0, 1).
  Tensor<T> forward(const Tensor<T>& images, std::span<const int> labels,
                    Mode mode);
  // grad_logits: (N,). Returns d/d(images) when `what.input` is set.
  Tensor<T> backward(const Tensor<T>& grad_logits, Backprop what);

  std::vector<ParamRef<T>> parameters();
  std::vector<BufferRef<T>> buffers();
  void zero_grad();
  const NetConfig& config() const { return cfg_; }

 private:
  NetConfig cfg_;
  std::vector<nn::Conv2d<T>> conv_;
  std::vector<std::optional<nn::BatchNorm2d<T>>> norm_;
  std::vector<nn::LeakyReLU<T>> act_;
};

// Basic residual block: 3x3 conv, BN, ReLU, 3x3 conv, BN, plus an identity
// or 1x1-conv/BN projection shortcut, then ReLU.
template <typename T>
class ResidualBlock {
 public:
  ResidualBlock(std::size_t in_channels, std::size_t out_channels,
                std::size_t stride);

  Tensor<T> forward(const Tensor<T>& x, Mode mode);
  Tensor<T> backward(const Tensor<T>& grad_out, Backprop what);
  void collect(const std::string& prefix, std::vector<ParamRef<T>>& params,
               std::vector<BufferRef<T>>& buffers);

 private:
  nn::Conv2d<T> conv1_;
  nn::BatchNorm2d<T> bn1_;
  nn::ReLU<T> relu1_;
  nn::Conv2d<T> conv2_;
  nn::BatchNorm2d<T> bn2_;
  std::optional<nn::Conv2d<T>> proj_;
  std::optional<nn::BatchNorm2d<T>> proj_bn_;
  nn::ReLU<T> relu_out_;
};

// ResNet-style classifier: stem conv, four stages of residual blocks with
// widths w, 2w, 4w, 8w (stages 2-4 halve the resolution), global average
// pooling and an affine head.
template <typename T>
class Classifier {
 public:
  explicit Classifier(const NetConfig& cfg);

  // Returns (N, K) logits.
  Tensor<T> forward(const Tensor<T>& images, Mode mode);
  Tensor<T> backward(const Tensor<T>& grad_logits, Backprop what);

  std::vector<ParamRef<T>> parameters();
  std::vector<BufferRef<T>> buffers();
  void zero_grad();
  const NetConfig& config() const { return cfg_; }

 private:
  NetConfig cfg_;
  nn::Conv2d<T> stem_;
  nn::BatchNorm2d<T> stem_bn_;
  nn::ReLU<T> stem_relu_;
  std::vector<ResidualBlock<T>> blocks_;
  nn::Linear<T> head_;
  Shape pooled_shape_;
};

template <typename T>
struct Networks {
  Generator<T> generator;
  Discriminator<T> discriminator;
  Classifier<T> classifier;
};

// Draws every weight and embedding from Normal(0, 0.02); normalization
// scales start at 1 and all shifts and biases at 0. Generator, discriminator
// and classifier are initialized in that order from the same stream.
template <typename T>
Networks<T> init_networks(const NetConfig& cfg, RngStream& rng);

template <typename T>
void initialize_parameters(std::vector<ParamRef<T>> params, RngStream& rng);

template <typename T>
std::size_t parameter_count(std::vector<ParamRef<T>> params) {
  std::size_t total = 0;
  for (const auto& p : params) total += p.param->value.size();
  return total;
}

// Validates (N, C, S, S) image batches against the config.
void check_images(const Shape& shape, const NetConfig& cfg, const char* who);
void check_labels(std::span<const int> labels, std::size_t batch,
                  const NetConfig& cfg, const char* who);

}  // namespace cosup::models
