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

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cosup/nn/layers.hpp"
#include "cosup/util/rng.hpp"

namespace cosup::testing {

struct GradCheckResult {
  std::size_t checked = 0;
  std::size_t rejected = 0;  // coordinates screened out as straddling a kink
  double max_relative_error = 0.0;
  std::string worst;  // "<param>[index]: analytic vs numeric"
};

// Compares accumulated parameter gradients against central differences.
//
// `loss` runs a forward pass and returns the scalar loss. `backward` runs
// the same forward and backward, filling the gradients. `samples`
// coordinates are drawn uniformly over all parameters (every tensor gets
// at least one). Relative error is |a - n| / max(|a| + |n|, floor).
//
// ReLU networks are only piecewise smooth: if a unit changes sign inside
// [x - h, x + h] the central difference measures an average slope. Each
// coordinate is therefore also differenced at h / 10; when the two
// estimates disagree the neighborhood is non-smooth and the coordinate is
// replaced by a fresh draw. The screen never looks at the analytic value.
// At most samples / 4 draws may be rejected, otherwise the check
// reports failure through max_relative_error = infinity.
GradCheckResult check_parameter_gradients(
    const std::vector<nn::ParamRef<double>>& params,
    const std::function<double()>& loss, const std::function<void()>& backward,
    std::size_t samples, RngStream& rng, double step = 1e-6, double floor = 1e-6);

// Same for an input tensor, given the analytic input gradient.
GradCheckResult check_input_gradient(std::span<double> input,
                                     std::span<const double> analytic,
                                     const std::function<double()>& loss,
                                     std::size_t samples, RngStream& rng,
                                     double step = 1e-6, double floor = 1e-6);

}  // namespace cosup::testing
