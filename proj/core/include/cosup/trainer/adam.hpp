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

#include <cstdint>
#include <vector>

#include "cosup/nn/layers.hpp"

namespace cosup::trainer {

struct AdamHyper {
  double learning_rate = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// First/second moments per parameter tensor, in parameters() order.
template <typename T>
struct AdamState {
  std::vector<Tensor<T>> first_moment;
  std::vector<Tensor<T>> second_moment;
  std::int64_t step = 0;

  AdamState() = default;
  explicit AdamState(const std::vector<nn::ParamRef<T>>& params) {
    for (const auto& p : params) {
      first_moment.emplace_back(p.param->value.shape());
      second_moment.emplace_back(p.param->value.shape());
    }
  }
  friend bool operator==(const AdamState&, const AdamState&) = default;
};

// One bias-corrected Adam update from the accumulated gradients:
//   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2,
//   p <- p - lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps).
template <typename T>
void adam_step(const std::vector<nn::ParamRef<T>>& params, AdamState<T>& state,
               const AdamHyper& hyper);

}  // namespace cosup::trainer
