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

#include "cosup/data/dataset.hpp"

#include "cosup/util/errors.hpp"

namespace cosup::data {

std::vector<std::size_t> count_classes(std::span<const int> labels,
                                       int num_classes) {
  std::vector<std::size_t> counts(static_cast<std::size_t>(num_classes), 0);
  for (int y : labels) {
    if (y < 0 || y >= num_classes) {
      throw ConsistencyError("label " + std::to_string(y) +
                             " outside [0, " + std::to_string(num_classes) + ")");
    }
    ++counts[static_cast<std::size_t>(y)];
  }
  return counts;
}

void Dataset::validate() const {
  if (images.rank() != 4) {
    throw ConsistencyError("dataset images must be (N, C, H, W), got " +
                           shape_to_string(images.shape()));
  }
  if (images.dim(0) != labels.size()) {
    throw ConsistencyError("dataset has " + std::to_string(images.dim(0)) +
                           " images but " + std::to_string(labels.size()) +
                           " labels");
  }
  if (num_classes < 1) throw ConsistencyError("dataset needs at least one class");
  if (count_classes(labels, num_classes) != class_counts) {
    throw ConsistencyError("class_counts do not match labels");
  }
  for (float p : images.values()) {
    if (!(p >= 0.0f && p <= 1.0f)) {
      throw ConsistencyError("pixel value outside [0, 1]");
    }
  }
}

Dataset Dataset::select(std::span<const std::size_t> indices) const {
  Dataset out;
  out.images = gather_rows(images, indices);
  out.labels.reserve(indices.size());
  for (std::size_t i : indices) out.labels.push_back(labels.at(i));
  out.num_classes = num_classes;
  out.class_counts = count_classes(out.labels, num_classes);
  out.class_names = class_names;
  return out;
}

std::vector<std::vector<std::size_t>> Dataset::indices_by_class() const {
  std::vector<std::vector<std::size_t>> groups(
      static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    groups[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  return groups;
}

}  // namespace cosup::data
