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

#include "cosup/models/networks.hpp"

#include <string_view>

#include "cosup/nn/functional.hpp"
#include "cosup/util/errors.hpp"

namespace cosup::models {
namespace {

bool ends_with(std::string_view text, std::string_view suffix) {
  return text.size() >= suffix.size() &&
         text.substr(text.size() - suffix.size()) == suffix;
}

const NetConfig& validated(const NetConfig& cfg) {
  cfg.validate();
  return cfg;
}

}  // namespace

void NetConfig::validate() const {
  if (image_size != 32 && image_size != 64 && image_size != 128) {
    throw ConfigError("image_size must be 32, 64 or 128, got " +
                      std::to_string(image_size));
  }
  if (z_dim == 0) throw ConfigError("z_dim must be positive");
  if (base_width == 0) throw ConfigError("base_width must be positive");
  if (classifier_width == 0) throw ConfigError("classifier_width must be positive");
  if (classifier_depth == 0) throw ConfigError("classifier_depth must be positive");
  if (channels == 0) throw ConfigError("channels must be positive");
  if (num_classes < 2) throw ConfigError("num_classes must be at least 2");
}

std::size_t NetConfig::scale_stages() const {
  std::size_t stages = 0;
  for (std::size_t s = image_size; s > 4; s /= 2) ++stages;
  return stages;
}

void check_images(const Shape& shape, const NetConfig& cfg, const char* who) {
  if (shape.size() != 4 || shape[1] != cfg.channels ||
      shape[2] != cfg.image_size || shape[3] != cfg.image_size ||
      shape[0] == 0) {
    throw ArgumentError(std::string(who) + ": expected (N, " +
                        std::to_string(cfg.channels) + ", " +
                        std::to_string(cfg.image_size) + ", " +
                        std::to_string(cfg.image_size) + ") images, got " +
                        shape_to_string(shape));
  }
}

void check_labels(std::span<const int> labels, std::size_t batch,
                  const NetConfig& cfg, const char* who) {
  if (labels.size() != batch) {
    throw ArgumentError(std::string(who) + ": " + std::to_string(labels.size()) +
                        " labels for a batch of " + std::to_string(batch));
  }
  for (int y : labels) {
    if (y < 0 || y >= cfg.num_classes) {
      throw ArgumentError(std::string(who) + ": label " + std::to_string(y) +
                          " out of range [0, " +
                          std::to_string(cfg.num_classes) + ")");
    }
  }
}

// ------------------------------------------------------------- Generator

template <typename T>
Generator<T>::Generator(const NetConfig& cfg)
    : cfg_(validated(cfg)),
      embed_(static_cast<std::size_t>(cfg.num_classes), cfg.z_dim) {
  const std::size_t stages = cfg_.scale_stages();
  std::size_t width = cfg_.base_width << (stages - 1);
  up_.emplace_back(nn::ConvGeometry{2 * cfg_.z_dim, width, 4, 1, 0});
  norm_.emplace_back(width);
  for (std::size_t i = 1; i < stages; ++i) {
    up_.emplace_back(nn::ConvGeometry{width, width / 2, 4, 2, 1});
    width /= 2;
    norm_.emplace_back(width);
  }
  up_.emplace_back(nn::ConvGeometry{width, cfg_.channels, 4, 2, 1});
  relu_.resize(norm_.size());
}

template <typename T>
Tensor<T> Generator<T>::forward(const Tensor<T>& z, std::span<const int> labels,
                                Mode mode) {
  if (z.rank() != 2 || z.dim(1) != cfg_.z_dim || z.dim(0) == 0) {
    throw ArgumentError("Generator: expected (N, " + std::to_string(cfg_.z_dim) +
                        ") latent batch, got " + shape_to_string(z.shape()));
  }
  const std::size_t n = z.dim(0);
  check_labels(labels, n, cfg_, "Generator");
  const Tensor<T> emb = embed_.forward(labels, mode);

  Tensor<T> h({n, 2 * cfg_.z_dim, 1, 1});
  for (std::size_t i = 0; i < n; ++i) {
    auto zi = z.slice(i);
    auto ei = emb.slice(i);
    T* dst = h.slice(i).data();
    std::copy(zi.begin(), zi.end(), dst);
    std::copy(ei.begin(), ei.end(), dst + cfg_.z_dim);
  }
  for (std::size_t i = 0; i < norm_.size(); ++i) {
    h = relu_[i].forward(norm_[i].forward(up_[i].forward(h, mode), mode), mode);
  }
  return tanh_.forward(up_.back().forward(h, mode), mode);
}

template <typename T>
void Generator<T>::backward(const Tensor<T>& grad_images) {
  Tensor<T> g = up_.back().backward(tanh_.backward(grad_images), {});
  for (std::size_t i = norm_.size(); i-- > 0;) {
    g = up_[i].backward(norm_[i].backward(relu_[i].backward(std::move(g)), {}),
                        {});
  }
  // g is (N, 2 z_dim, 1, 1); the second half belongs to the embedding.
  const std::size_t n = g.dim(0);
  Tensor<T> g_emb({n, cfg_.z_dim});
  for (std::size_t i = 0; i < n; ++i) {
    auto src = g.slice(i);
    std::copy(src.begin() + static_cast<std::ptrdiff_t>(cfg_.z_dim), src.end(),
              g_emb.data() + i * cfg_.z_dim);
  }
  embed_.backward(g_emb);
}

template <typename T>
std::vector<ParamRef<T>> Generator<T>::parameters() {
  std::vector<ParamRef<T>> out;
  embed_.collect("generator.embed", out);
  for (std::size_t i = 0; i < up_.size(); ++i) {
    up_[i].collect("generator.up" + std::to_string(i), out);
    if (i < norm_.size()) norm_[i].collect("generator.bn" + std::to_string(i), out);
  }
  return out;
}

template <typename T>
std::vector<BufferRef<T>> Generator<T>::buffers() {
  std::vector<BufferRef<T>> out;
  for (std::size_t i = 0; i < norm_.size(); ++i) {
    norm_[i].collect_buffers("generator.bn" + std::to_string(i), out);
  }
  return out;
}

template <typename T>
void Generator<T>::zero_grad() {
  for (auto& p : parameters()) p.param->zero_grad();
}

// --------------------------------------------------------- Discriminator

template <typename T>
Discriminator<T>::Discriminator(const NetConfig& cfg) : cfg_(validated(cfg)) {
  const std::size_t stages = cfg_.scale_stages();
  const std::size_t in = cfg_.channels + static_cast<std::size_t>(cfg_.num_classes);
  std::size_t width = cfg_.base_width;
  conv_.emplace_back(nn::ConvGeometry{in, width, 4, 2, 1});
  norm_.emplace_back(std::nullopt);
  for (std::size_t i = 1; i < stages; ++i) {
    conv_.emplace_back(nn::ConvGeometry{width, width * 2, 4, 2, 1});
    width *= 2;
    norm_.emplace_back(nn::BatchNorm2d<T>(width));
  }
  act_.assign(conv_.size(), nn::LeakyReLU<T>(kLeakySlope));
  conv_.emplace_back(nn::ConvGeometry{width, 1, 4, 1, 0});
}

template <typename T>
Tensor<T> Discriminator<T>::forward_logits(const Tensor<T>& images,
                                           std::span<const int> labels,
                                           Mode mode) {
  check_images(images.shape(), cfg_, "Discriminator");
  const std::size_t n = images.dim(0);
  check_labels(labels, n, cfg_, "Discriminator");

  const std::size_t c = cfg_.channels, k = static_cast<std::size_t>(cfg_.num_classes);
  const std::size_t plane = cfg_.image_size * cfg_.image_size;
  Tensor<T> h({n, c + k, cfg_.image_size, cfg_.image_size});
  for (std::size_t i = 0; i < n; ++i) {
    auto src = images.slice(i);
    T* dst = h.slice(i).data();
    std::copy(src.begin(), src.end(), dst);
    T* onehot = dst + (c + static_cast<std::size_t>(labels[i])) * plane;
    std::fill(onehot, onehot + plane, T{1});
  }
  for (std::size_t i = 0; i < act_.size(); ++i) {
    h = conv_[i].forward(h, mode);
    if (norm_[i]) h = norm_[i]->forward(h, mode);
    h = act_[i].forward(std::move(h), mode);
  }
  h = conv_.back().forward(h, mode);
  h.reshape({n});
  return h;
}

template <typename T>
Tensor<T> Discriminator<T>::forward(const Tensor<T>& images,
                                    std::span<const int> labels, Mode mode) {
  Tensor<T> out = forward_logits(images, labels, mode);
  for (auto& v : out.values()) v = nn::sigmoid(v);
  return out;
}

template <typename T>
Tensor<T> Discriminator<T>::backward(const Tensor<T>& grad_logits,
                                     Backprop what) {
  const std::size_t n = grad_logits.size();
  Tensor<T> g = grad_logits;
  g.reshape({n, 1, 1, 1});
  // Every intermediate gradient is needed to reach earlier layers; only the
  // first conv may skip its input gradient.
  const Backprop inner{what.params, true};
  g = conv_.back().backward(g, inner);
  for (std::size_t i = act_.size(); i-- > 0;) {
    g = act_[i].backward(std::move(g));
    if (norm_[i]) g = norm_[i]->backward(g, inner);
    g = conv_[i].backward(g, i == 0 ? what : inner);
  }
  if (!what.input) return {};
  // Drop the gradient of the constant one-hot planes.
  Tensor<T> dx({n, cfg_.channels, cfg_.image_size, cfg_.image_size});
  const std::size_t keep = dx.stride0();
  for (std::size_t i = 0; i < n; ++i) {
    auto src = g.slice(i);
    std::copy(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(keep),
              dx.data() + i * keep);
  }
  return dx;
}

template <typename T>
std::vector<ParamRef<T>> Discriminator<T>::parameters() {
  std::vector<ParamRef<T>> out;
  for (std::size_t i = 0; i < conv_.size(); ++i) {
    conv_[i].collect("discriminator.conv" + std::to_string(i), out);
    if (i < norm_.size() && norm_[i]) {
      norm_[i]->collect("discriminator.bn" + std::to_string(i), out);
    }
  }
  return out;
}

template <typename T>
std::vector<BufferRef<T>> Discriminator<T>::buffers() {
  std::vector<BufferRef<T>> out;
  for (std::size_t i = 0; i < norm_.size(); ++i) {
    if (norm_[i]) norm_[i]->collect_buffers("discriminator.bn" + std::to_string(i), out);
  }
  return out;
}

template <typename T>
void Discriminator<T>::zero_grad() {
  for (auto& p : parameters()) p.param->zero_grad();
}

// --------------------------------------------------------- ResidualBlock

template <typename T>
ResidualBlock<T>::ResidualBlock(std::size_t in_channels,
                                std::size_t out_channels, std::size_t stride)
    : conv1_({in_channels, out_channels, 3, stride, 1}),
      bn1_(out_channels),
      conv2_({out_channels, out_channels, 3, 1, 1}),
      bn2_(out_channels) {
  if (stride != 1 || in_channels != out_channels) {
    proj_.emplace(nn::ConvGeometry{in_channels, out_channels, 1, stride, 0});
    proj_bn_.emplace(out_channels);
  }
}

template <typename T>
Tensor<T> ResidualBlock<T>::forward(const Tensor<T>& x, Mode mode) {
  Tensor<T> h = relu1_.forward(bn1_.forward(conv1_.forward(x, mode), mode), mode);
  h = bn2_.forward(conv2_.forward(h, mode), mode);
  if (proj_) {
    nn::add_inplace(h, proj_bn_->forward(proj_->forward(x, mode), mode));
  } else {
    nn::add_inplace(h, x);
  }
  return relu_out_.forward(std::move(h), mode);
}

template <typename T>
Tensor<T> ResidualBlock<T>::backward(const Tensor<T>& grad_out, Backprop what) {
  const Tensor<T> g = relu_out_.backward(grad_out);
  const Backprop inner{what.params, true};
  Tensor<T> main = bn2_.backward(g, inner);
  main = conv2_.backward(main, inner);
  main = bn1_.backward(relu1_.backward(std::move(main)), inner);
  main = conv1_.backward(main, what);
  if (!what.input) {
    if (proj_) proj_->backward(proj_bn_->backward(g, inner), what);
    return {};
  }
  if (proj_) {
    nn::add_inplace(main, proj_->backward(proj_bn_->backward(g, inner), what));
  } else {
    nn::add_inplace(main, g);
  }
  return main;
}

template <typename T>
void ResidualBlock<T>::collect(const std::string& prefix,
                               std::vector<ParamRef<T>>& params,
                               std::vector<BufferRef<T>>& buffers) {
  conv1_.collect(prefix + ".conv1", params);
  bn1_.collect(prefix + ".bn1", params);
  bn1_.collect_buffers(prefix + ".bn1", buffers);
  conv2_.collect(prefix + ".conv2", params);
  bn2_.collect(prefix + ".bn2", params);
  bn2_.collect_buffers(prefix + ".bn2", buffers);
  if (proj_) {
    proj_->collect(prefix + ".proj", params);
    proj_bn_->collect(prefix + ".proj_bn", params);
    proj_bn_->collect_buffers(prefix + ".proj_bn", buffers);
  }
}

// ------------------------------------------------------------ Classifier

namespace {

nn::ConvGeometry stem_geometry(const NetConfig& cfg) {
  const std::size_t stride = cfg.image_size / 32;
  if (stride >= 4) return {cfg.channels, cfg.classifier_width, 7, stride, 3};
  return {cfg.channels, cfg.classifier_width, 3, stride, 1};
}

}  // namespace

template <typename T>
Classifier<T>::Classifier(const NetConfig& cfg)
    : cfg_(validated(cfg)),
      stem_(stem_geometry(cfg)),
      stem_bn_(cfg.classifier_width),
      head_(cfg.classifier_width * 8, static_cast<std::size_t>(cfg.num_classes)) {
  std::size_t in = cfg_.classifier_width;
  for (std::size_t stage = 0; stage < 4; ++stage) {
    const std::size_t out = cfg_.classifier_width << stage;
    for (std::size_t b = 0; b < cfg_.classifier_depth; ++b) {
      const std::size_t stride = (stage > 0 && b == 0) ? 2 : 1;
      blocks_.emplace_back(in, out, stride);
      in = out;
    }
  }
}

template <typename T>
Tensor<T> Classifier<T>::forward(const Tensor<T>& images, Mode mode) {
  check_images(images.shape(), cfg_, "Classifier");
  Tensor<T> h = stem_relu_.forward(
      stem_bn_.forward(stem_.forward(images, mode), mode), mode);
  for (auto& block : blocks_) h = block.forward(h, mode);
  pooled_shape_ = h.shape();
  return head_.forward(nn::global_average_pool(h), mode);
}

template <typename T>
Tensor<T> Classifier<T>::backward(const Tensor<T>& grad_logits, Backprop what) {
  const Backprop inner{what.params, true};
  Tensor<T> g = nn::global_average_pool_backward(
      head_.backward(grad_logits, inner), pooled_shape_);
  for (std::size_t i = blocks_.size(); i-- > 0;) g = blocks_[i].backward(g, inner);
  g = stem_bn_.backward(stem_relu_.backward(std::move(g)), inner);
  return stem_.backward(g, what);
}

template <typename T>
std::vector<ParamRef<T>> Classifier<T>::parameters() {
  std::vector<ParamRef<T>> params;
  std::vector<BufferRef<T>> unused;
  stem_.collect("classifier.stem", params);
  stem_bn_.collect("classifier.stem_bn", params);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    blocks_[i].collect("classifier.block" + std::to_string(i), params, unused);
  }
  head_.collect("classifier.head", params);
  return params;
}

template <typename T>
std::vector<BufferRef<T>> Classifier<T>::buffers() {
  std::vector<ParamRef<T>> unused;
  std::vector<BufferRef<T>> buffers;
  stem_bn_.collect_buffers("classifier.stem_bn", buffers);
  for (std::size_t i = 0; i < blocks_.size(); ++i) {
    blocks_[i].collect("classifier.block" + std::to_string(i), unused, buffers);
  }
  return buffers;
}

template <typename T>
void Classifier<T>::zero_grad() {
  for (auto& p : parameters()) p.param->zero_grad();
}

// -------------------------------------------------------- initialization

template <typename T>
void initialize_parameters(std::vector<ParamRef<T>> params, RngStream& rng) {
  for (auto& p : params) {
    auto values = p.param->value.values();
    if (ends_with(p.name, ".gamma")) {
      std::fill(values.begin(), values.end(), T{1});
    } else if (ends_with(p.name, ".beta") || ends_with(p.name, ".bias")) {
      std::fill(values.begin(), values.end(), T{0});
    } else {
      nn::fill_normal(values, 0.0, 0.02, rng);
    }
    p.param->zero_grad();
  }
}

template <typename T>
Networks<T> init_networks(const NetConfig& cfg, RngStream& rng) {
  Networks<T> nets{Generator<T>(cfg), Discriminator<T>(cfg), Classifier<T>(cfg)};
  initialize_parameters(nets.generator.parameters(), rng);
  initialize_parameters(nets.discriminator.parameters(), rng);
  initialize_parameters(nets.classifier.parameters(), rng);
  return nets;
}

#define COSUP_INSTANTIATE(T)                                               \
  template class Generator<T>;                                             \
  template class Discriminator<T>;                                         \
  template class ResidualBlock<T>;                                         \
  template class Classifier<T>;                                            \
  template void initialize_parameters(std::vector<ParamRef<T>>, RngStream&); \
  template Networks<T> init_networks(const NetConfig&, RngStream&);

COSUP_INSTANTIATE(float)
COSUP_INSTANTIATE(double)
#undef COSUP_INSTANTIATE

}  // namespace cosup::models
