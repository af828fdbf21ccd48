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

#include "cosup/harness/experiment.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "cosup/data/loaders.hpp"
#include "cosup/util/errors.hpp"

namespace cosup::harness {

std::string_view profile_name(Profile profile) {
  return profile == Profile::kDigits32 ? "digits32" : "weather128";
}

Profile parse_profile(std::string_view name) {
  if (name == "digits32") return Profile::kDigits32;
  if (name == "weather128") return Profile::kWeather128;
  throw ConfigError(
      fmt::format("unknown dataset profile '{}' (expected digits32 or weather128)", name));
}

trainer::TrainConfig profile_defaults(Profile profile) {
  trainer::TrainConfig c;
  if (profile == Profile::kDigits32) {
    c.net.image_size = 32;
    c.net.channels = 1;
    c.net.num_classes = 10;
    c.lr_g = c.lr_d = c.lr_c = 2e-4;
    c.augment.crop_padding = 4;
    c.augment.rotation_range = 10.0;
  } else {
    c.net.image_size = 128;
    c.net.channels = 3;
    c.net.num_classes = 4;
    c.lr_d = 5e-5;
    c.lr_g = 2e-4;
    c.lr_c = 2e-4;
    c.augment.hflip_prob = 0.5;
  }
  return c;
}

namespace {

const std::vector<std::string>& harness_keys() {
  static const std::vector<std::string> keys = {
      "dataset",     "train_images", "train_labels",     "test_images",
      "test_labels", "train_root",   "test_root",        "fractions",
      "methods",     "seeds",        "output_dir",       "checkpoint_every",
      "grid_per_class"};
  return keys;
}

std::vector<std::string> train_keys() {
  std::vector<std::string> keys;
  std::istringstream in(trainer::TrainConfig{}.to_text());
  std::string line;
  while (std::getline(in, line)) keys.push_back(kv::trim(line.substr(0, line.find('='))));
  return keys;
}

[[noreturn]] void unknown_key(const kv::Entry& e, std::string_view source) {
  std::vector<std::string> known = harness_keys();
  for (const auto& k : train_keys()) {
    known.push_back(k);
    for (auto m : {trainer::Method::kSecCgan, trainer::Method::kEcGan,
                   trainer::Method::kBaseline}) {
      known.push_back(fmt::format("{}.{}", trainer::method_name(m), k));
    }
  }
  std::string best;
  std::size_t best_distance = std::string::npos;
  for (const auto& k : known) {
    const std::size_t d = kv::edit_distance(e.key, k);
    if (d < best_distance) best_distance = d, best = k;
  }
  std::string hint;
  if (best_distance <= std::max<std::size_t>(2, e.key.size() / 3)) {
    hint = fmt::format(" (did you mean '{}'?)", best);
  }
  throw ConfigError(fmt::format("{}:{}: unknown key '{}'{}", source, e.line, e.key, hint));
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  std::filesystem::path p(value);
  return p.is_absolute() ? p : (base / p).lexically_normal();
}

}  // namespace

void ExperimentSpec::validate() const {
  if (fractions.empty()) throw ConfigError("fractions must not be empty");
  if (methods.empty()) throw ConfigError("methods must not be empty");
  if (seeds.empty()) throw ConfigError("seeds must not be empty");
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (!(fractions[i] > 0.0 && fractions[i] <= 1.0)) {
      throw ConfigError(fmt::format("fraction {} is outside (0, 1]", fractions[i]));
    }
    if (i > 0 && fractions[i] <= fractions[i - 1]) {
      throw ConfigError("fractions must be strictly increasing");
    }
  }
  if (std::set<trainer::Method>(methods.begin(), methods.end()).size() != methods.size()) {
    throw ConfigError("methods must not repeat");
  }
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ConfigError("seeds must not repeat");
  }
  if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be non-negative");
  for (auto m : methods) config_for(m, seeds.front());
}

trainer::TrainConfig ExperimentSpec::config_for(trainer::Method method,
                                                std::uint64_t seed) const {
  trainer::TrainConfig c = base;
  c.method = method;
  c.master_seed = seed;
  if (const auto it = overrides.find(method); it != overrides.end()) {
    for (const auto& e : it->second) {
      if (!c.apply(e)) {
        throw ConfigError(fmt::format("line {}: unknown key '{}'", e.line, e.key));
      }
    }
  }
  c.validate();
  return c;
}

ExperimentSpec parse_config_text(std::string_view text, std::string_view source,
                                 const std::filesystem::path& base_dir) {
  const auto entries = kv::parse(text, source);
  const auto find = [&entries](std::string_view key) -> const kv::Entry* {
    for (const auto& e : entries) {
      if (e.key == key) return &e;
    }
    return nullptr;
  };
  const auto require = [&](std::string_view key) -> const kv::Entry& {
    const kv::Entry* e = find(key);
    if (e == nullptr) {
      throw ConfigError(fmt::format("{}: missing required key '{}'", source, key));
    }
    return *e;
  };

  ExperimentSpec spec;
  spec.dataset.profile = parse_profile(require("dataset").value);
  spec.base = profile_defaults(spec.dataset.profile);
  spec.output_dir = base_dir / "out";

  for (const auto& e : entries) {
    const std::string& k = e.key;
    try {
      if (k == "dataset") {
        continue;
      } else if (k == "train_images") {
        spec.dataset.train_images = resolve(base_dir, e.value);
      } else if (k == "train_labels") {
        spec.dataset.train_labels = resolve(base_dir, e.value);
      } else if (k == "test_images") {
        spec.dataset.test_images = resolve(base_dir, e.value);
      } else if (k == "test_labels") {
        spec.dataset.test_labels = resolve(base_dir, e.value);
      } else if (k == "train_root") {
        spec.dataset.train_root = resolve(base_dir, e.value);
      } else if (k == "test_root") {
        spec.dataset.test_root = resolve(base_dir, e.value);
      } else if (k == "output_dir") {
        spec.output_dir = resolve(base_dir, e.value);
      } else if (k == "fractions") {
        spec.fractions = kv::to_double_list(e);
      } else if (k == "methods") {
        for (const auto& name : kv::split_list(e.value)) {
          spec.methods.push_back(trainer::parse_method(name));
        }
      } else if (k == "seeds") {
        for (auto s : kv::to_int_list(e)) {
          if (s < 0) throw ConfigError("seeds must be non-negative");
          spec.seeds.push_back(static_cast<std::uint64_t>(s));
        }
      } else if (k == "checkpoint_every") {
        spec.checkpoint_every = kv::to_int(e);
      } else if (k == "grid_per_class") {
        const auto n = kv::to_int(e);
        if (n < 0) throw ConfigError("grid_per_class must be non-negative");
        spec.grid_per_class = static_cast<std::size_t>(n);
      } else if (const auto dot = k.find('.'); dot != std::string::npos) {
        const std::string prefix = k.substr(0, dot);
        trainer::Method m;
        try {
          m = trainer::parse_method(prefix);
        } catch (const ConfigError&) {
          unknown_key(e, source);
        }
        kv::Entry inner = e;
        inner.key = k.substr(dot + 1);
        trainer::TrainConfig probe = spec.base;
        if (inner.key == "method" || !probe.apply(inner)) unknown_key(e, source);
        spec.overrides[m].push_back(inner);
      } else if (k == "method" || k == "master_seed") {
        throw ConfigError(fmt::format(
            "'{}' is chosen per run; use 'methods' / 'seeds' instead", k));
      } else if (!spec.base.apply(e)) {
        unknown_key(e, source);
      }
    } catch (const ConfigError& err) {
      const std::string what = err.what();
      if (what.rfind(std::string(source), 0) == 0) throw;
      throw ConfigError(fmt::format("{}:{}: key '{}': {}", source, e.line, k, what));
    }
  }

  require("fractions");
  require("methods");
  require("seeds");
  if (spec.dataset.profile == Profile::kDigits32) {
    require("train_images");
    require("train_labels");
    require("test_images");
    require("test_labels");
  } else {
    require("train_root");
    require("test_root");
  }
  try {
    spec.validate();
  } catch (const ConfigError& err) {
    throw ConfigError(fmt::format("{}: {}", source, err.what()));
  }
  return spec;
}

ExperimentSpec parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open config '{}'", path.string()));
  std::ostringstream text;
  text << in.rdbuf();
  const auto base = std::filesystem::absolute(path).parent_path();
  return parse_config_text(text.str(), path.string(), base);
}

LoadedData load_datasets(const DatasetSource& source, const trainer::TrainConfig& config) {
  data::LoadOptions options;
  options.image_size = config.net.image_size;
  options.channels = config.net.channels;
  options.num_classes = config.net.num_classes;
  if (source.profile == Profile::kDigits32) {
    return {data::load_idx(source.train_images, source.train_labels, options),
            data::load_idx(source.test_images, source.test_labels, options)};
  }
  auto load = [&options](const std::filesystem::path& root) {
    auto result = data::load_image_folder(root, options);
    for (const auto& w : result.warnings) spdlog::warn("{}", w);
    for (const auto& e : result.errors) spdlog::warn("skipped: {}", e);
    return std::move(result.dataset);
  };
  LoadedData out{load(source.train_root), load(source.test_root)};
  if (out.train.class_names != out.test.class_names) {
    throw ConsistencyError("train and test folders list different classes");
  }
  return out;
}

}  // namespace cosup::harness
