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

#include "cosup/nn/layers.hpp"

#include <Eigen/Core>
#include <cmath>

namespace cosup::nn {
namespace {

template <typename T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatrixMap = Eigen::Map<RowMatrix<T>>;
template <typename T>
using ConstMatrixMap = Eigen::Map<const RowMatrix<T>>;

struct Im2ColShape {
  std::size_t channels, height, width;      // image being unfolded
  std::size_t kernel, stride, padding;
  std::size_t out_height, out_width;        // sliding-window grid
};

// Unfolds one (C, H, W) image into a (C*k*k, Ho*Wo) matrix; rows are ordered
// (channel, kernel_row, kernel_col) to match a (out, C, k, k) weight.
template <typename T>
void im2col(const T* image, const Im2ColShape& s, T* columns) {
  const std::size_t plane = s.out_height * s.out_width;
  for (std::size_t c = 0; c < s.channels; ++c) {
    const T* channel = image + c * s.height * s.width;
    for (std::size_t ki = 0; ki < s.kernel; ++ki) {
      for (std::size_t kj = 0; kj < s.kernel; ++kj) {
        T* row = columns + ((c * s.kernel + ki) * s.kernel + kj) * plane;
        for (std::size_t oy = 0; oy < s.out_height; ++oy) {
          const auto iy = static_cast<std::ptrdiff_t>(oy * s.stride + ki) -
                          static_cast<std::ptrdiff_t>(s.padding);
          T* dst = row + oy * s.out_width;
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(s.height)) {
            std::fill(dst, dst + s.out_width, T{0});
            continue;
          }
          const T* src = channel + iy * s.width;
          for (std::size_t ox = 0; ox < s.out_width; ++ox) {
            const auto ix = static_cast<std::ptrdiff_t>(ox * s.stride + kj) -
                            static_cast<std::ptrdiff_t>(s.padding);
            dst[ox] = (ix >= 0 && ix < static_cast<std::ptrdiff_t>(s.width))
                          ? src[ix]
                          : T{0};
          }
        }
      }
    }
  }
}

// Adjoint of im2col: scatters-and-adds the columns back into the image.
template <typename T>
void col2im(const T* columns, const Im2ColShape& s, T* image) {
  const std::size_t plane = s.out_height * s.out_width;
  for (std::size_t c = 0; c < s.channels; ++c) {
    T* channel = image + c * s.height * s.width;
    for (std::size_t ki = 0; ki < s.kernel; ++ki) {
      for (std::size_t kj = 0; kj < s.kernel; ++kj) {
        const T* row = columns + ((c * s.kernel + ki) * s.kernel + kj) * plane;
        for (std::size_t oy = 0; oy < s.out_height; ++oy) {
          const auto iy = static_cast<std::ptrdiff_t>(oy * s.stride + ki) -
                          static_cast<std::ptrdiff_t>(s.padding);
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(s.height)) continue;
          const T* src = row + oy * s.out_width;
          T* dst = channel + iy * s.width;
          for (std::size_t ox = 0; ox < s.out_width; ++ox) {
            const auto ix = static_cast<std::ptrdiff_t>(ox * s.stride + kj) -
                            static_cast<std::ptrdiff_t>(s.padding);
            if (ix >= 0 && ix < static_cast<std::ptrdiff_t>(s.width)) {
              dst[ix] += src[ox];
            }
          }
        }
      }
    }
  }
}

std::size_t conv_out(std::size_t in, const ConvGeometry& g) {
  if (in + 2 * g.padding < g.kernel) {
    throw ArgumentError("convolution input smaller than kernel");
  }
  return (in + 2 * g.padding - g.kernel) / g.stride + 1;
}

void check_rank4(const Shape& shape, std::size_t channels, const char* what) {
  if (shape.size() != 4 || shape[1] != channels) {
    throw ArgumentError(std::string(what) + ": expected (N, " +
                        std::to_string(channels) + ", H, W) input, got " +
                        shape_to_string(shape));
  }
}

}  // namespace

void fill_normal(std::span<float> values, double mean, double stddev,
                 RngStream& rng) {
  for (auto& v : values) v = static_cast<float>(mean + stddev * rng.normal());
}

void fill_normal(std::span<double> values, double mean, double stddev,
                 RngStream& rng) {
  for (auto& v : values) v = mean + stddev * rng.normal();
}

// ---------------------------------------------------------------- Conv2d

template <typename T>
Conv2d<T>::Conv2d(const ConvGeometry& geometry)
    : geom_(geometry),
      weight_({geometry.out_channels, geometry.in_channels, geometry.kernel,
               geometry.kernel}) {}

template <typename T>
std::size_t Conv2d<T>::output_size(std::size_t input_size) const {
  return conv_out(input_size, geom_);
}

template <typename T>
Tensor<T> Conv2d<T>::forward(const Tensor<T>& x, Mode mode) {
  check_rank4(x.shape(), geom_.in_channels, "Conv2d");
  const std::size_t n = x.dim(0), h = x.dim(2), w = x.dim(3);
  const Im2ColShape s{geom_.in_channels, h, w, geom_.kernel, geom_.stride,
                      geom_.padding, conv_out(h, geom_), conv_out(w, geom_)};
  const std::size_t rows = geom_.in_channels * geom_.kernel * geom_.kernel;
  const std::size_t plane = s.out_height * s.out_width;

  Tensor<T> y({n, geom_.out_channels, s.out_height, s.out_width});
  std::vector<T> scratch;
  if (mode == Mode::kTrain) {
    input_shape_ = x.shape();
    columns_.resize(n * rows * plane);
  } else {
    input_shape_.clear();
    scratch.resize(rows * plane);
  }
  ConstMatrixMap<T> weight(weight_.value.data(), geom_.out_channels, rows);
  for (std::size_t i = 0; i < n; ++i) {
    T* col = mode == Mode::kTrain ? columns_.data() + i * rows * plane
                                  : scratch.data();
    im2col(x.slice(i).data(), s, col);
    MatrixMap<T> out(y.slice(i).data(), geom_.out_channels, plane);
    out.noalias() = weight * ConstMatrixMap<T>(col, rows, plane);
  }
  return y;
}

template <typename T>
Tensor<T> Conv2d<T>::backward(const Tensor<T>& grad_out, Backprop what) {
  if (input_shape_.empty()) {
    throw ArgumentError("Conv2d::backward without a train-mode forward");
  }
  const std::size_t n = input_shape_[0];
  const Im2ColShape s{geom_.in_channels, input_shape_[2], input_shape_[3],
                      geom_.kernel, geom_.stride, geom_.padding,
                      grad_out.dim(2), grad_out.dim(3)};
  const std::size_t rows = geom_.in_channels * geom_.kernel * geom_.kernel;
  const std::size_t plane = s.out_height * s.out_width;

  Tensor<T> dx;
  std::vector<T> dcol;
  if (what.input) {
    dx = Tensor<T>(input_shape_);
    dcol.resize(rows * plane);
  }
  ConstMatrixMap<T> weight(weight_.value.data(), geom_.out_channels, rows);
  MatrixMap<T> dweight(weight_.grad.data(), geom_.out_channels, rows);
  for (std::size_t i = 0; i < n; ++i) {
    ConstMatrixMap<T> dy(grad_out.slice(i).data(), geom_.out_channels, plane);
    ConstMatrixMap<T> col(columns_.data() + i * rows * plane, rows, plane);
    if (what.params) dweight.noalias() += dy * col.transpose();
    if (what.input) {
      MatrixMap<T>(dcol.data(), rows, plane).noalias() = weight.transpose() * dy;
      col2im(dcol.data(), s, dx.slice(i).data());
    }
  }
  return dx;
}

template <typename T>
void Conv2d<T>::collect(const std::string& prefix,
                        std::vector<ParamRef<T>>& out) {
  out.push_back({prefix + ".weight", &weight_});
}

// ------------------------------------------------------- ConvTranspose2d

template <typename T>
ConvTranspose2d<T>::ConvTranspose2d(const ConvGeometry& geometry)
    : geom_(geometry),
      weight_({geometry.in_channels, geometry.out_channels, geometry.kernel,
               geometry.kernel}) {}

template <typename T>
std::size_t ConvTranspose2d<T>::output_size(std::size_t input_size) const {
  return (input_size - 1) * geom_.stride + geom_.kernel - 2 * geom_.padding;
}

template <typename T>
Tensor<T> ConvTranspose2d<T>::forward(const Tensor<T>& x, Mode mode) {
  check_rank4(x.shape(), geom_.in_channels, "ConvTranspose2d");
  const std::size_t n = x.dim(0), h = x.dim(2), w = x.dim(3);
  const std::size_t ho = output_size(h), wo = output_size(w);
  // The transposed conv scatters into the output image exactly the way
  // col2im scatters into a conv input of size (ho, wo).
  const Im2ColShape s{geom_.out_channels, ho, wo, geom_.kernel, geom_.stride,
                      geom_.padding, h, w};
  const std::size_t rows = geom_.out_channels * geom_.kernel * geom_.kernel;
  const std::size_t plane = h * w;

  Tensor<T> y({n, geom_.out_channels, ho, wo});
  std::vector<T> col(rows * plane);
  ConstMatrixMap<T> weight(weight_.value.data(), geom_.in_channels, rows);
  for (std::size_t i = 0; i < n; ++i) {
    ConstMatrixMap<T> xi(x.slice(i).data(), geom_.in_channels, plane);
    MatrixMap<T>(col.data(), rows, plane).noalias() = weight.transpose() * xi;
    col2im(col.data(), s, y.slice(i).data());
  }
  input_ = mode == Mode::kTrain ? x : Tensor<T>();
  return y;
}

template <typename T>
Tensor<T> ConvTranspose2d<T>::backward(const Tensor<T>& grad_out,
                                       Backprop what) {
  if (input_.empty()) {
    throw ArgumentError("ConvTranspose2d::backward without a train-mode forward");
  }
  const std::size_t n = input_.dim(0), h = input_.dim(2), w = input_.dim(3);
  const Im2ColShape s{geom_.out_channels, grad_out.dim(2), grad_out.dim(3),
                      geom_.kernel, geom_.stride, geom_.padding, h, w};
  const std::size_t rows = geom_.out_channels * geom_.kernel * geom_.kernel;
  const std::size_t plane = h * w;

  Tensor<T> dx;
  if (what.input) dx = Tensor<T>(input_.shape());
  std::vector<T> dcol(rows * plane);
  ConstMatrixMap<T> weight(weight_.value.data(), geom_.in_channels, rows);
  MatrixMap<T> dweight(weight_.grad.data(), geom_.in_channels, rows);
  for (std::size_t i = 0; i < n; ++i) {
    im2col(grad_out.slice(i).data(), s, dcol.data());
    ConstMatrixMap<T> dc(dcol.data(), rows, plane);
    if (what.params) {
      ConstMatrixMap<T> xi(input_.slice(i).data(), geom_.in_channels, plane);
      dweight.noalias() += xi * dc.transpose();
    }
    if (what.input) {
      MatrixMap<T>(dx.slice(i).data(), geom_.in_channels, plane).noalias() =
          weight * dc;
    }
  }
  return dx;
}

template <typename T>
void ConvTranspose2d<T>::collect(const std::string& prefix,
                                 std::vector<ParamRef<T>>& out) {
  out.push_back({prefix + ".weight", &weight_});
}

// ----------------------------------------------------------- BatchNorm2d

template <typename T>
BatchNorm2d<T>::BatchNorm2d(std::size_t channels)
    : channels_(channels),
      gamma_({channels}),
      beta_({channels}),
      running_mean_({channels}, T{0}),
      running_var_({channels}, T{1}) {
  gamma_.value.fill(T{1});
}

template <typename T>
Tensor<T> BatchNorm2d<T>::forward(const Tensor<T>& x, Mode mode) {
  check_rank4(x.shape(), channels_, "BatchNorm2d");
  const std::size_t n = x.dim(0);
  const std::size_t plane = x.dim(2) * x.dim(3);
  const std::size_t count = n * plane;
  Tensor<T> y(x.shape());
  last_mode_ = mode;

  if (mode == Mode::kEval) {
    for (std::size_t c = 0; c < channels_; ++c) {
      const T inv = static_cast<T>(
          1.0 / std::sqrt(static_cast<double>(running_var_[c]) + kEpsilon));
      const T scale = gamma_.value[c] * inv;
      const T shift = beta_.value[c] - running_mean_[c] * scale;
      for (std::size_t i = 0; i < n; ++i) {
        const T* src = x.data() + (i * channels_ + c) * plane;
        T* dst = y.data() + (i * channels_ + c) * plane;
        for (std::size_t p = 0; p < plane; ++p) dst[p] = src[p] * scale + shift;
      }
    }
    return y;
  }

  normalized_ = Tensor<T>(x.shape());
  inv_std_.assign(channels_, T{0});
  for (std::size_t c = 0; c < channels_; ++c) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const T* src = x.data() + (i * channels_ + c) * plane;
      for (std::size_t p = 0; p < plane; ++p) sum += src[p];
    }
    const double mean = sum / static_cast<double>(count);
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const T* src = x.data() + (i * channels_ + c) * plane;
      for (std::size_t p = 0; p < plane; ++p) {
        const double d = src[p] - mean;
        sq += d * d;
      }
    }
    const double var = sq / static_cast<double>(count);
    const double inv = 1.0 / std::sqrt(var + kEpsilon);
    inv_std_[c] = static_cast<T>(inv);
    const T g = gamma_.value[c], b = beta_.value[c];
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t off = (i * channels_ + c) * plane;
      for (std::size_t p = 0; p < plane; ++p) {
        const T xhat = static_cast<T>((x.data()[off + p] - mean) * inv);
        normalized_.data()[off + p] = xhat;
        y.data()[off + p] = g * xhat + b;
      }
    }
    const double unbiased =
        count > 1 ? var * static_cast<double>(count) / (count - 1) : var;
    running_mean_[c] = static_cast<T>((1.0 - kMomentum) * running_mean_[c] +
                                      kMomentum * mean);
    running_var_[c] = static_cast<T>((1.0 - kMomentum) * running_var_[c] +
                                     kMomentum * unbiased);
  }
  return y;
}

template <typename T>
Tensor<T> BatchNorm2d<T>::backward(const Tensor<T>& grad_out, Backprop what) {
  if (last_mode_ != Mode::kTrain || normalized_.empty()) {
    throw ArgumentError("BatchNorm2d::backward without a train-mode forward");
  }
  const std::size_t n = grad_out.dim(0);
  const std::size_t plane = grad_out.dim(2) * grad_out.dim(3);
  const double count = static_cast<double>(n * plane);
  Tensor<T> dx;
  if (what.input) dx = Tensor<T>(grad_out.shape());

  for (std::size_t c = 0; c < channels_; ++c) {
    double sum_dy = 0.0, sum_dy_xhat = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t off = (i * channels_ + c) * plane;
      for (std::size_t p = 0; p < plane; ++p) {
        const double dy = grad_out.data()[off + p];
        sum_dy += dy;
        sum_dy_xhat += dy * normalized_.data()[off + p];
      }
    }
    if (what.params) {
      gamma_.grad[c] += static_cast<T>(sum_dy_xhat);
      beta_.grad[c] += static_cast<T>(sum_dy);
    }
    if (what.input) {
      const double k = gamma_.value[c] * static_cast<double>(inv_std_[c]) / count;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t off = (i * channels_ + c) * plane;
        for (std::size_t p = 0; p < plane; ++p) {
          dx.data()[off + p] = static_cast<T>(
              k * (count * grad_out.data()[off + p] - sum_dy -
                   normalized_.data()[off + p] * sum_dy_xhat));
        }
      }
    }
  }
  return dx;
}

template <typename T>
void BatchNorm2d<T>::collect(const std::string& prefix,
                             std::vector<ParamRef<T>>& out) {
  out.push_back({prefix + ".gamma", &gamma_});
  out.push_back({prefix + ".beta", &beta_});
}

template <typename T>
void BatchNorm2d<T>::collect_buffers(const std::string& prefix,
                                     std::vector<BufferRef<T>>& out) {
  out.push_back({prefix + ".running_mean", &running_mean_});
  out.push_back({prefix + ".running_var", &running_var_});
}

// ---------------------------------------------------------------- Linear

template <typename T>
Linear<T>::Linear(std::size_t in_features, std::size_t out_features)
    : weight_({out_features, in_features}), bias_({out_features}) {}

template <typename T>
Tensor<T> Linear<T>::forward(const Tensor<T>& x, Mode mode) {
  const std::size_t out_f = weight_.value.dim(0), in_f = weight_.value.dim(1);
  if (x.rank() != 2 || x.dim(1) != in_f) {
    throw ArgumentError("Linear: expected (N, " + std::to_string(in_f) +
                        ") input, got " + shape_to_string(x.shape()));
  }
  const std::size_t n = x.dim(0);
  Tensor<T> y({n, out_f});
  MatrixMap<T> out(y.data(), n, out_f);
  out.noalias() = ConstMatrixMap<T>(x.data(), n, in_f) *
                  ConstMatrixMap<T>(weight_.value.data(), out_f, in_f).transpose();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < out_f; ++j) out(i, j) += bias_.value[j];
  }
  input_ = mode == Mode::kTrain ? x : Tensor<T>();
  return y;
}

template <typename T>
Tensor<T> Linear<T>::backward(const Tensor<T>& grad_out, Backprop what) {
  if (input_.empty()) {
    throw ArgumentError("Linear::backward without a train-mode forward");
  }
  const std::size_t out_f = weight_.value.dim(0), in_f = weight_.value.dim(1);
  const std::size_t n = input_.dim(0);
  ConstMatrixMap<T> dy(grad_out.data(), n, out_f);
  if (what.params) {
    MatrixMap<T>(weight_.grad.data(), out_f, in_f).noalias() +=
        dy.transpose() * ConstMatrixMap<T>(input_.data(), n, in_f);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < out_f; ++j) bias_.grad[j] += dy(i, j);
    }
  }
  Tensor<T> dx;
  if (what.input) {
    dx = Tensor<T>({n, in_f});
    MatrixMap<T>(dx.data(), n, in_f).noalias() =
        dy * ConstMatrixMap<T>(weight_.value.data(), out_f, in_f);
  }
  return dx;
}

template <typename T>
void Linear<T>::collect(const std::string& prefix,
                        std::vector<ParamRef<T>>& out) {
  out.push_back({prefix + ".weight", &weight_});
  out.push_back({prefix + ".bias", &bias_});
}

// ------------------------------------------------------------- Embedding

template <typename T>
Embedding<T>::Embedding(std::size_t rows, std::size_t dim)
    : table_({rows, dim}) {}

template <typename T>
Tensor<T> Embedding<T>::forward(std::span<const int> ids, Mode mode) {
  const std::size_t dim = table_.value.dim(1);
  Tensor<T> out({ids.size(), dim});
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= rows()) {
      throw ArgumentError("embedding id " + std::to_string(ids[i]) +
                          " out of range [0, " + std::to_string(rows()) + ")");
    }
    auto row = table_.value.slice(static_cast<std::size_t>(ids[i]));
    std::copy(row.begin(), row.end(), out.data() + i * dim);
  }
  if (mode == Mode::kTrain) ids_.assign(ids.begin(), ids.end());
  return out;
}

template <typename T>
void Embedding<T>::backward(const Tensor<T>& grad_out) {
  const std::size_t dim = table_.value.dim(1);
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    auto row = table_.grad.slice(static_cast<std::size_t>(ids_[i]));
    for (std::size_t j = 0; j < dim; ++j) row[j] += grad_out[i * dim + j];
  }
}

template <typename T>
void Embedding<T>::collect(const std::string& prefix,
                           std::vector<ParamRef<T>>& out) {
  out.push_back({prefix + ".weight", &table_});
}

// ----------------------------------------------------------- activations

template <typename T>
Tensor<T> ReLU<T>::forward(Tensor<T> x, Mode mode) {
  for (auto& v : x.values()) v = v > T{0} ? v : T{0};
  if (mode == Mode::kTrain) output_ = x;
  return x;
}

template <typename T>
Tensor<T> ReLU<T>::backward(Tensor<T> grad_out) const {
  for (std::size_t i = 0; i < grad_out.size(); ++i) {
    if (!(output_[i] > T{0})) grad_out[i] = T{0};
  }
  return grad_out;
}

template <typename T>
Tensor<T> LeakyReLU<T>::forward(Tensor<T> x, Mode mode) {
  if (mode == Mode::kTrain) input_ = x;
  for (auto& v : x.values()) v = v > T{0} ? v : v * slope_;
  return x;
}

template <typename T>
Tensor<T> LeakyReLU<T>::backward(Tensor<T> grad_out) const {
  for (std::size_t i = 0; i < grad_out.size(); ++i) {
    if (!(input_[i] > T{0})) grad_out[i] *= slope_;
  }
  return grad_out;
}

template <typename T>
Tensor<T> Tanh<T>::forward(Tensor<T> x, Mode mode) {
  for (auto& v : x.values()) v = std::tanh(v);
  if (mode == Mode::kTrain) output_ = x;
  return x;
}

template <typename T>
Tensor<T> Tanh<T>::backward(Tensor<T> grad_out) const {
  for (std::size_t i = 0; i < grad_out.size(); ++i) {
    grad_out[i] *= T{1} - output_[i] * output_[i];
  }
  return grad_out;
}

template <typename T>
Tensor<T> global_average_pool(const Tensor<T>& x) {
  const std::size_t n = x.dim(0), c = x.dim(1), plane = x.dim(2) * x.dim(3);
  Tensor<T> out({n, c});
  for (std::size_t i = 0; i < n * c; ++i) {
    double sum = 0.0;
    const T* src = x.data() + i * plane;
    for (std::size_t p = 0; p < plane; ++p) sum += src[p];
    out[i] = static_cast<T>(sum / static_cast<double>(plane));
  }
  return out;
}

template <typename T>
Tensor<T> global_average_pool_backward(const Tensor<T>& grad_out,
                                       const Shape& input_shape) {
  Tensor<T> dx(input_shape);
  const std::size_t plane = input_shape[2] * input_shape[3];
  const T scale = T{1} / static_cast<T>(plane);
  for (std::size_t i = 0; i < grad_out.size(); ++i) {
    T* dst = dx.data() + i * plane;
    std::fill(dst, dst + plane, grad_out[i] * scale);
  }
  return dx;
}

template <typename T>
void add_inplace(Tensor<T>& a, const Tensor<T>& b) {
  if (a.shape() != b.shape()) {
    throw ArgumentError("add_inplace: shape mismatch " +
                        shape_to_string(a.shape()) + " vs " +
                        shape_to_string(b.shape()));
  }
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
}

#define COSUP_INSTANTIATE(T)                                               \
  template class Conv2d<T>;                                                \
  template class ConvTranspose2d<T>;                                       \
  template class BatchNorm2d<T>;                                           \
  template class Linear<T>;                                                \
  template class Embedding<T>;                                             \
  template class ReLU<T>;                                                  \
  template class LeakyReLU<T>;                                             \
  template class Tanh<T>;                                                  \
  template Tensor<T> global_average_pool(const Tensor<T>&);                \
  template Tensor<T> global_average_pool_backward(const Tensor<T>&,        \
                                                  const Shape&);           \
  template void add_inplace(Tensor<T>&, const Tensor<T>&);

COSUP_INSTANTIATE(float)
COSUP_INSTANTIATE(double)
#undef COSUP_INSTANTIATE

}  // namespace cosup::nn
