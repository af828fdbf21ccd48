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
#include <filesystem>

#include "cosup/models/networks.hpp"
#include "cosup/tensor.hpp"

namespace cosup::harness {

// Samples `per_class` images for every class with the generator in eval
// mode. Returns an 8-bit (rows * S, K * S, C) image, class c in column c,
// no padding. Noise comes from the "grid" stream of `seed`.
Tensor<std::uint8_t> render_image_grid(models::Generator<float>& generator,
                                       std::size_t per_class, std::uint64_t seed);

// Writes render_image_grid as a PNG. Throws IoError if the file cannot be
// written.
void export_image_grid(models::Generator<float>& generator, std::size_t per_class,
                       std::uint64_t seed, const std::filesystem::path& path);

}  // namespace cosup::harness
