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

namespace cosup::data {

// An immutable labelled image set. Pixels are stored in [0, 1].
struct Dataset {
  Tensor<float> images;  // (N, C, H, W)
  std::vector<int> labels;
  int num_classes = 0;
  std::vector<std::size_t> class_counts;
  std::vector<std::string> class_names;  // optional, index order

  std::size_t size() const { return labels.size(); }
  std::size_t channels() const { return images.dim(1); }
  std::size_t height() const { return images.dim(2); }
  std::size_t width() const { return images.dim(3); }

  // Throws ConsistencyError if any invariant is violated.
  void validate() const;
  // Examples at `indices`, in that order; class_counts recomputed.
  Dataset select(std::span<const std::size_t> indices) const;
  std::vector<std::vector<std::size_t>> indices_by_class() const;
};

std::vector<std::size_t> count_classes(std::span<const int> labels,
                                       int num_classes);

// [0, 1] pixel to the [-1, 1] range the networks consume, and back.
inline float normalize_pixel(float p) { return 2.0f * p - 1.0f; }
inline float denormalize_pixel(float v) { return (v + 1.0f) * 0.5f; }

// Shape of the images produced by the loaders.
struct LoadOptions {
  std::size_t image_size = 32;
  std::size_t channels = 1;
  int num_classes = 10;  // IDX only; image folders take K from the layout
};

}  // namespace cosup::data
