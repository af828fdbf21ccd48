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

#include "cosup/tensor.hpp"
#include "cosup/util/rng.hpp"

namespace cosup::data {

// Label-preserving augmentation applied independently to every image.
struct AugmentPolicy {
  std::size_t crop_padding = 0;  // reflect-pad then random crop; 0 disables
  double rotation_range = 0.0;   // degrees, uniform in [-r, r]; 0 disables
  double hflip_prob = 0.0;

  void validate() const;
  bool is_identity() const {
    return crop_padding == 0 && rotation_range == 0.0 && hflip_prob == 0.0;
  }
  friend bool operator==(const AugmentPolicy&, const AugmentPolicy&) = default;
};

// Crop of the reflect-padded image at (offset_y, offset_x) in padded
// coordinates; offsets lie in [0, 2 * padding] and `padding` is the identity.
template <typename T>
void reflect_crop(std::span<T> image, std::size_t channels, std::size_t height,
                  std::size_t width, std::size_t padding, std::size_t offset_y,
                  std::size_t offset_x);

// Rotation about the image center with bilinear resampling; samples falling
// outside the image read as -1.
template <typename T>
void rotate_bilinear(std::span<T> image, std::size_t channels,
                     std::size_t height, std::size_t width, double degrees);

template <typename T>
void hflip(std::span<T> image, std::size_t channels, std::size_t height,
           std::size_t width);

// Applies crop, rotation and flip (in that order, each only when enabled)
// to every image of an (N, C, H, W) batch and clamps to [-1, 1]. Per image
// the stream is consumed as: crop offsets (y, x), angle, flip coin.
template <typename T>
void augment(Tensor<T>& images, const AugmentPolicy& policy, RngStream& rng);

}  // namespace cosup::data
