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

#include "gradcheck.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <optional>

namespace cosup::testing {

namespace {

void record(GradCheckResult& r, const std::string& where, double analytic,
            double numeric, double floor) {
  const double rel =
      std::abs(analytic - numeric) / std::max(std::abs(analytic) + std::abs(numeric), floor);
  ++r.checked;
  if (rel >= r.max_relative_error) {
    r.max_relative_error = rel;
    r.worst = fmt::format("{}: analytic {:.9g} vs numeric {:.9g}", where, analytic, numeric);
  }
}

double central(double& x, double step, const std::function<double()>& loss) {
  const double saved = x;
  x = saved + step;
  const double up = loss();
  x = saved - step;
  const double down = loss();
  x = saved;
  return (up - down) / (2.0 * step);
}

// Central difference at `step`, or nullopt when it disagrees with the one
// at step / 10 (a kink lies inside the interval).
std::optional<double> smooth_central(double& x, double step,
                                     const std::function<double()>& loss) {
  const double coarse = central(x, step, loss);
  const double fine = central(x, step / 10.0, loss);
  if (std::abs(coarse - fine) > 1e-4 * (std::abs(coarse) + std::abs(fine)) + 1e-9) {
    return std::nullopt;
  }
  return coarse;
}

bool too_many_rejections(const GradCheckResult& r, std::size_t samples) {
  return 4 * r.rejected > samples;
}

}  // namespace

GradCheckResult check_parameter_gradients(
    const std::vector<nn::ParamRef<double>>& params,
    const std::function<double()>& loss, const std::function<void()>& backward,
    std::size_t samples, RngStream& rng, double step, double floor) {
  for (const auto& p : params) p.param->zero_grad();
  backward();
  std::vector<std::vector<double>> analytic;
  std::size_t total = 0;
  for (const auto& p : params) {
    const auto g = p.param->grad.values();
    analytic.emplace_back(g.begin(), g.end());
    total += p.param->value.size();
  }

  auto draw = [&](std::size_t which) -> std::pair<std::size_t, std::size_t> {
    if (which < params.size()) {
      return {which, rng.uniform_index(params[which].param->value.size())};
    }
    std::size_t flat = rng.uniform_index(total);
    std::size_t i = 0;
    while (flat >= params[i].param->value.size()) flat -= params[i].param->value.size(), ++i;
    return {i, flat};
  };

  GradCheckResult result;
  const std::size_t wanted = std::max(samples, params.size());
  for (std::size_t n = 0; result.checked < wanted;) {
    const auto [i, j] = draw(n);
    const auto numeric = smooth_central(params[i].param->value[j], step, loss);
    if (!numeric) {
      ++result.rejected;
      if (too_many_rejections(result, samples)) break;
      continue;  // redraw; a tensor's guaranteed pick stays pending
    }
    ++n;
    record(result, fmt::format("{}[{}]", params[i].name, j), analytic[i][j], *numeric, floor);
  }
  if (too_many_rejections(result, samples)) {
    result.max_relative_error = std::numeric_limits<double>::infinity();
    result.worst = fmt::format("{} of {} coordinates straddled a kink", result.rejected,
                               result.rejected + result.checked);
  }
  return result;
}

GradCheckResult check_input_gradient(std::span<double> input,
                                     std::span<const double> analytic,
                                     const std::function<double()>& loss,
                                     std::size_t samples, RngStream& rng, double step,
                                     double floor) {
  GradCheckResult result;
  while (result.checked < samples) {
    const std::size_t j = rng.uniform_index(input.size());
    const auto numeric = smooth_central(input[j], step, loss);
    if (!numeric) {
      ++result.rejected;
      if (too_many_rejections(result, samples)) break;
      continue;
    }
    record(result, fmt::format("input[{}]", j), analytic[j], *numeric, floor);
  }
  if (too_many_rejections(result, samples)) {
    result.max_relative_error = std::numeric_limits<double>::infinity();
    result.worst = fmt::format("{} of {} coordinates straddled a kink", result.rejected,
                               result.rejected + result.checked);
  }
  return result;
}

}  // namespace cosup::testing
