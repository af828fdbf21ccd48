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

namespace cosup::models {

// Shapes shared by the generator, discriminator and classifier.
struct NetConfig {
  std::size_t z_dim = 100;
  std::size_t image_size = 32;   // 32, 64 or 128
  std::size_t channels = 1;
  int num_classes = 10;
  std::size_t base_width = 16;   // GAN feature-map multiplier
  std::size_t classifier_width = 8;
  // Residual blocks per stage; 2 with width 64 is the ResNet-18 layout.
  std::size_t classifier_depth = 1;

  // Throws ConfigError on an unsupported configuration.
  void validate() const;
  // Number of stride-2 stages between 4x4 and image_size.
  std::size_t scale_stages() const;

  friend bool operator==(const NetConfig&, const NetConfig&) = default;
};

}  // namespace cosup::models
