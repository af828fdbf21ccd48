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

#include "cosup/data/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "cosup/util/errors.hpp"

namespace cosup::data {
namespace {

// Reflection without edge repetition: -1 -> 1, n -> n - 2.
std::ptrdiff_t reflect(std::ptrdiff_t i, std::ptrdiff_t n) {
  if (i < 0) return -i;
  if (i >= n) return 2 * (n - 1) - i;
  return i;
}

}  // namespace

void AugmentPolicy::validate() const {
  if (!(rotation_range >= 0.0)) throw ArgumentError("rotation_range must be >= 0");
  if (!(hflip_prob >= 0.0 && hflip_prob <= 1.0)) {
    throw ArgumentError("hflip_prob must lie in [0, 1]");
  }
}

template <typename T>
void reflect_crop(std::span<T> image, std::size_t channels, std::size_t height,
                  std::size_t width, std::size_t padding, std::size_t offset_y,
                  std::size_t offset_x) {
  if (padding == 0) return;
  if (padding >= height || padding >= width) {
    throw ArgumentError("crop padding must be smaller than the image");
  }
  const std::vector<T> src(image.begin(), image.end());
  const auto h = static_cast<std::ptrdiff_t>(height);
  const auto w = static_cast<std::ptrdiff_t>(width);
  const auto pad = static_cast<std::ptrdiff_t>(padding);
  for (std::size_t c = 0; c < channels; ++c) {
    const T* plane = src.data() + c * height * width;
    T* out = image.data() + c * height * width;
    for (std::ptrdiff_t y = 0; y < h; ++y) {
      const auto sy = reflect(y + static_cast<std::ptrdiff_t>(offset_y) - pad, h);
      for (std::ptrdiff_t x = 0; x < w; ++x) {
        const auto sx = reflect(x + static_cast<std::ptrdiff_t>(offset_x) - pad, w);
        out[y * w + x] = plane[sy * w + sx];
      }
    }
  }
}

template <typename T>
void rotate_bilinear(std::span<T> image, std::size_t channels,
                     std::size_t height, std::size_t width, double degrees) {
  const std::vector<T> src(image.begin(), image.end());
  const double theta = degrees * std::numbers::pi / 180.0;
  const double cs = std::cos(theta), sn = std::sin(theta);
  const double cy = (static_cast<double>(height) - 1.0) / 2.0;
  const double cx = (static_cast<double>(width) - 1.0) / 2.0;
  const auto h = static_cast<std::ptrdiff_t>(height);
  const auto w = static_cast<std::ptrdiff_t>(width);
  constexpr double kFill = -1.0;

  for (std::size_t c = 0; c < channels; ++c) {
    const T* plane = src.data() + c * height * width;
    T* out = image.data() + c * height * width;
    auto pixel = [&](std::ptrdiff_t y, std::ptrdiff_t x) -> double {
      if (y < 0 || y >= h || x < 0 || x >= w) return kFill;
      return static_cast<double>(plane[y * w + x]);
    };
    for (std::ptrdiff_t y = 0; y < h; ++y) {
      for (std::ptrdiff_t x = 0; x < w; ++x) {
        const double dx = static_cast<double>(x) - cx;
        const double dy = static_cast<double>(y) - cy;
        const double sx = cs * dx + sn * dy + cx;
        const double sy = -sn * dx + cs * dy + cy;
        const double fx0 = std::floor(sx), fy0 = std::floor(sy);
        const double fx = sx - fx0, fy = sy - fy0;
        const auto x0 = static_cast<std::ptrdiff_t>(fx0);
        const auto y0 = static_cast<std::ptrdiff_t>(fy0);
        const double top = pixel(y0, x0) + fx * (pixel(y0, x0 + 1) - pixel(y0, x0));
        const double bottom =
            pixel(y0 + 1, x0) + fx * (pixel(y0 + 1, x0 + 1) - pixel(y0 + 1, x0));
        out[y * w + x] = static_cast<T>(top + fy * (bottom - top));
      }
    }
  }
}

template <typename T>
void hflip(std::span<T> image, std::size_t channels, std::size_t height,
           std::size_t width) {
  for (std::size_t row = 0; row < channels * height; ++row) {
    std::reverse(image.begin() + static_cast<std::ptrdiff_t>(row * width),
                 image.begin() + static_cast<std::ptrdiff_t>((row + 1) * width));
  }
}

template <typename T>
void augment(Tensor<T>& images, const AugmentPolicy& policy, RngStream& rng) {
  if (policy.is_identity()) return;
  policy.validate();
  const std::size_t n = images.dim(0), c = images.dim(1), h = images.dim(2),
                    w = images.dim(3);
  for (std::size_t i = 0; i < n; ++i) {
    auto img = images.slice(i);
    if (policy.crop_padding > 0) {
      const std::size_t span = 2 * policy.crop_padding + 1;
      const auto oy = static_cast<std::size_t>(rng.uniform_index(span));
      const auto ox = static_cast<std::size_t>(rng.uniform_index(span));
      reflect_crop(img, c, h, w, policy.crop_padding, oy, ox);
    }
    if (policy.rotation_range > 0.0) {
      rotate_bilinear(img, c, h, w,
                      rng.uniform(-policy.rotation_range, policy.rotation_range));
    }
    if (policy.hflip_prob > 0.0 && rng.uniform() < policy.hflip_prob) {
      hflip(img, c, h, w);
    }
    for (auto& v : img) v = std::clamp(v, T{-1}, T{1});
  }
}

#define COSUP_INSTANTIATE(T)                                                  \
  template void reflect_crop(std::span<T>, std::size_t, std::size_t,         \
                             std::size_t, std::size_t, std::size_t,          \
                             std::size_t);                                   \
  template void rotate_bilinear(std::span<T>, std::size_t, std::size_t,      \
                                std::size_t, double);                        \
  template void hflip(std::span<T>, std::size_t, std::size_t, std::size_t);  \
  template void augment(Tensor<T>&, const AugmentPolicy&, RngStream&);

COSUP_INSTANTIATE(float)
COSUP_INSTANTIATE(double)
#undef COSUP_INSTANTIATE

}  // namespace cosup::data
