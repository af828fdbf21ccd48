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

#include "cosup/trainer/train_config.hpp"

#include <fmt/format.h>

#include <cmath>

#include "cosup/util/errors.hpp"

namespace cosup::trainer {

std::string_view method_name(Method method) {
  switch (method) {
    case Method::kSecCgan: return "sec_cgan";
    case Method::kEcGan: return "ec_gan";
    case Method::kBaseline: return "baseline";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "sec_cgan") return Method::kSecCgan;
  if (name == "ec_gan") return Method::kEcGan;
  if (name == "baseline") return Method::kBaseline;
  throw ConfigError(fmt::format(
      "unknown method '{}' (expected sec_cgan, ec_gan or baseline)", name));
}

namespace {

void require(bool ok, std::string_view message) {
  if (!ok) throw ConfigError(std::string(message));
}

bool in_unit_open_closed(double x) { return x > 0.0 && x <= 1.0; }

std::size_t to_size(const kv::Entry& e) {
  const auto v = kv::to_int(e);
  if (v < 0) {
    throw ConfigError(fmt::format("line {}: '{}' must be non-negative", e.line,
                                  e.key));
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

void TrainConfig::validate() const {
  require(std::isfinite(lambda) && lambda >= 0.0, "lambda must be non-negative");
  // beta above 1 is allowed: it switches the synthetic term off.
  require(std::isfinite(beta) && beta >= 0.0, "beta must be non-negative");
  require(std::isfinite(lr_g) && std::isfinite(lr_d) && std::isfinite(lr_c) &&
              lr_g >= 0.0 && lr_d >= 0.0 && lr_c >= 0.0,
          "learning rates must be finite and non-negative");
  require(batch_size > 0, "batch_size must be positive");
  require(synthetic_batch_size > 0, "synthetic_batch_size must be positive");
  require(iterations >= 0, "iterations must be non-negative");
  require(eval_every >= 0, "eval_every must be non-negative");
  require(adam_beta1 >= 0.0 && adam_beta1 < 1.0, "adam_beta1 must lie in [0, 1)");
  require(adam_beta2 >= 0.0 && adam_beta2 < 1.0, "adam_beta2 must lie in [0, 1)");
  require(adam_eps > 0.0, "adam_eps must be positive");
  require(in_unit_open_closed(pseudo_label_threshold),
          "pseudo_label_threshold must lie in (0, 1]");
  augment.validate();
  net.validate();
}

std::string TrainConfig::to_text() const {
  std::string out;
  auto put = [&out](std::string_view key, const auto& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  put("method", method_name(method));
  put("lambda", lambda);
  put("beta", beta);
  put("lr_g", lr_g);
  put("lr_d", lr_d);
  put("lr_c", lr_c);
  put("batch_size", batch_size);
  put("synthetic_batch_size", synthetic_batch_size);
  put("iterations", iterations);
  put("eval_every", eval_every);
  put("adam_beta1", adam_beta1);
  put("adam_beta2", adam_beta2);
  put("adam_eps", adam_eps);
  put("master_seed", master_seed);
  put("pseudo_label_threshold", pseudo_label_threshold);
  put("regenerate_synthetic", regenerate_synthetic ? "true" : "false");
  put("crop_padding", augment.crop_padding);
  put("rotation_range", augment.rotation_range);
  put("hflip_prob", augment.hflip_prob);
  put("z_dim", net.z_dim);
  put("image_size", net.image_size);
  put("channels", net.channels);
  put("num_classes", net.num_classes);
  put("base_width", net.base_width);
  put("classifier_width", net.classifier_width);
  put("classifier_depth", net.classifier_depth);
  return out;
}

bool TrainConfig::apply(const kv::Entry& e) {
  const std::string& k = e.key;
  if (k == "method") method = parse_method(e.value);
  else if (k == "lambda") lambda = kv::to_double(e);
  else if (k == "beta") beta = kv::to_double(e);
  else if (k == "lr_g") lr_g = kv::to_double(e);
  else if (k == "lr_d") lr_d = kv::to_double(e);
  else if (k == "lr_c") lr_c = kv::to_double(e);
  else if (k == "batch_size") batch_size = to_size(e);
  else if (k == "synthetic_batch_size") synthetic_batch_size = to_size(e);
  else if (k == "iterations") iterations = kv::to_int(e);
  else if (k == "eval_every") eval_every = kv::to_int(e);
  else if (k == "adam_beta1") adam_beta1 = kv::to_double(e);
  else if (k == "adam_beta2") adam_beta2 = kv::to_double(e);
  else if (k == "adam_eps") adam_eps = kv::to_double(e);
  else if (k == "master_seed") master_seed = static_cast<std::uint64_t>(to_size(e));
  else if (k == "pseudo_label_threshold") pseudo_label_threshold = kv::to_double(e);
  else if (k == "regenerate_synthetic") regenerate_synthetic = kv::to_bool(e);
  else if (k == "crop_padding") augment.crop_padding = to_size(e);
  else if (k == "rotation_range") augment.rotation_range = kv::to_double(e);
  else if (k == "hflip_prob") augment.hflip_prob = kv::to_double(e);
  else if (k == "z_dim") net.z_dim = to_size(e);
  else if (k == "image_size") net.image_size = to_size(e);
  else if (k == "channels") net.channels = to_size(e);
  else if (k == "num_classes") net.num_classes = static_cast<int>(kv::to_int(e));
  else if (k == "base_width") net.base_width = to_size(e);
  else if (k == "classifier_width") net.classifier_width = to_size(e);
  else if (k == "classifier_depth") net.classifier_depth = to_size(e);
  else return false;
  return true;
}

TrainConfig TrainConfig::from_text(std::string_view text) {
  TrainConfig cfg;
  for (const auto& entry : kv::parse(text, "train config")) {
    if (!cfg.apply(entry)) {
      throw ConfigError(fmt::format("line {}: unknown key '{}'", entry.line,
                                    entry.key));
    }
  }
  cfg.validate();
  return cfg;
}

}  // namespace cosup::trainer
