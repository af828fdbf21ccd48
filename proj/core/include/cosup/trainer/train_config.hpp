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
#include <string>
#include <string_view>

#include "cosup/data/augment.hpp"
#include "cosup/models/net_config.hpp"
#include "cosup/util/kv.hpp"

namespace cosup::trainer {

enum class Method { kSecCgan, kEcGan, kBaseline };

std::string_view method_name(Method method);
// Accepts "sec_cgan", "ec_gan" and "baseline"; throws ConfigError otherwise.
Method parse_method(std::string_view name);

struct TrainConfig {
  Method method = Method::kSecCgan;
  double lambda = 0.6;  // weight of the synthetic classifier term
  double beta = 0.7;    // discriminator-confidence threshold
  double lr_g = 2e-4;
  double lr_d = 2e-4;
  double lr_c = 2e-4;
  std::size_t batch_size = 64;            // m
  std::size_t synthetic_batch_size = 64;  // k
  std::int64_t iterations = 2000;
  std::int64_t eval_every = 500;          // 0 evaluates only at the end
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t master_seed = 1;
  double pseudo_label_threshold = 0.7;    // ec_gan only
  // Draw a fresh synthetic batch for the classifier update instead of
  // reusing the one the GAN updates saw.
  bool regenerate_synthetic = false;
  data::AugmentPolicy augment;
  models::NetConfig net;

  void validate() const;

  // Flat `key = value` echo, stable across runs (stored in checkpoints).
  std::string to_text() const;
  static TrainConfig from_text(std::string_view text);
  // Applies one recognized key; returns false if the key is unknown.
  bool apply(const kv::Entry& entry);

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

}  // namespace cosup::trainer
