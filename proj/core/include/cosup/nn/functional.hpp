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
#include <cmath>
#include <limits>
#include <span>

namespace cosup::nn {

// Logistic function, clamped so the result is strictly inside (0, 1) even
// when the exact value rounds to an endpoint.
template <typename T>
T sigmoid(T logit) {
  const T p = logit >= T{0} ? T{1} / (T{1} + std::exp(-logit))
                            : std::exp(logit) / (T{1} + std::exp(logit));
  return std::clamp(p, std::numeric_limits<T>::min(),
                    std::nextafter(T{1}, T{0}));
}

// log(1 + exp(x)) without overflow.
inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

template <typename T>
double log_sum_exp(std::span<const T> values) {
  double peak = -std::numeric_limits<double>::infinity();
  for (T v : values) peak = std::max(peak, static_cast<double>(v));
  if (!std::isfinite(peak)) return peak;
  double sum = 0.0;
  for (T v : values) sum += std::exp(static_cast<double>(v) - peak);
  return peak + std::log(sum);
}

// Index of the largest entry; ties go to the lowest index.
template <typename T>
std::size_t argmax(std::span<const T> values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace cosup::nn
