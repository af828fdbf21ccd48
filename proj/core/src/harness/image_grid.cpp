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

#include "cosup/harness/image_grid.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "cosup/util/errors.hpp"
#include "cosup/util/rng.hpp"

namespace cosup::harness {

Tensor<std::uint8_t> render_image_grid(models::Generator<float>& generator,
                                       std::size_t per_class, std::uint64_t seed) {
  if (per_class == 0) throw ArgumentError("grid needs at least one row");
  const auto& cfg = generator.config();
  const auto k = static_cast<std::size_t>(cfg.num_classes);
  const std::size_t s = cfg.image_size;
  const std::size_t ch = cfg.channels;

  // Row-major over the grid: sample (r, c) has label c.
  const std::size_t n = per_class * k;
  RngStream rng(seed, "grid");
  Tensor<float> z({n, cfg.z_dim});
  for (auto& v : z.values()) v = static_cast<float>(rng.normal());
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i % k);
  const Tensor<float> images = generator.forward(z, labels, nn::Mode::kEval);

  Tensor<std::uint8_t> grid({per_class * s, k * s, ch});
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t row = i / k;
    const std::size_t col = i % k;
    const auto img = images.slice(i);
    for (std::size_t c = 0; c < ch; ++c) {
      for (std::size_t y = 0; y < s; ++y) {
        for (std::size_t x = 0; x < s; ++x) {
          const float v = img[(c * s + y) * s + x];
          const float p = std::clamp((v + 1.0f) * 127.5f, 0.0f, 255.0f);
          grid[((row * s + y) * k * s + col * s + x) * ch + c] =
              static_cast<std::uint8_t>(std::lround(p));
        }
      }
    }
  }
  return grid;
}

void export_image_grid(models::Generator<float>& generator, std::size_t per_class,
                       std::uint64_t seed, const std::filesystem::path& path) {
  Tensor<std::uint8_t> grid = render_image_grid(generator, per_class, seed);
  const int rows = static_cast<int>(grid.dim(0));
  const int cols = static_cast<int>(grid.dim(1));
  const int ch = static_cast<int>(grid.dim(2));
  cv::Mat image(rows, cols, CV_8UC(ch), grid.data());
  cv::Mat out = image;
  if (ch == 3) cv::cvtColor(image, out, cv::COLOR_RGB2BGR);
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), out);
  } catch (const cv::Exception& e) {
    throw IoError(fmt::format("cannot write '{}': {}", path.string(), e.what()));
  }
  if (!ok) throw IoError(fmt::format("cannot write '{}'", path.string()));
}

}  // namespace cosup::harness
