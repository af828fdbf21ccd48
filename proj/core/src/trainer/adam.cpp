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

#include "cosup/trainer/adam.hpp"

#include <cmath>

#include "cosup/util/errors.hpp"

namespace cosup::trainer {

template <typename T>
void adam_step(const std::vector<nn::ParamRef<T>>& params, AdamState<T>& state,
               const AdamHyper& hyper) {
  if (state.first_moment.size() != params.size()) {
    throw ArgumentError("optimizer state does not match the parameter list");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const T b1 = static_cast<T>(hyper.beta1);
  const T b2 = static_cast<T>(hyper.beta2);
  const T one_minus_b1 = static_cast<T>(1.0 - hyper.beta1);
  const T one_minus_b2 = static_cast<T>(1.0 - hyper.beta2);
  const T bias1 = static_cast<T>(1.0 - std::pow(hyper.beta1, t));
  const T bias2 = static_cast<T>(1.0 - std::pow(hyper.beta2, t));
  const T lr = static_cast<T>(hyper.learning_rate);
  const T eps = static_cast<T>(hyper.epsilon);

  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& value = params[i].param->value;
    const auto& grad = params[i].param->grad;
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    for (std::size_t j = 0; j < value.size(); ++j) {
      const T g = grad[j];
      m[j] = b1 * m[j] + one_minus_b1 * g;
      v[j] = b2 * v[j] + one_minus_b2 * g * g;
      const T m_hat = m[j] / bias1;
      const T v_hat = v[j] / bias2;
      value[j] -= lr * m_hat / (std::sqrt(v_hat) + eps);
    }
  }
}

template void adam_step(const std::vector<nn::ParamRef<float>>&, AdamState<float>&,
                        const AdamHyper&);
template void adam_step(const std::vector<nn::ParamRef<double>>&,
                        AdamState<double>&, const AdamHyper&);

}  // namespace cosup::trainer
