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
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "cosup/data/dataset.hpp"
#include "cosup/trainer/train_config.hpp"
#include "cosup/util/kv.hpp"

namespace cosup::harness {

enum class Profile { kDigits32, kWeather128 };

std::string_view profile_name(Profile profile);
Profile parse_profile(std::string_view name);

// Where the data lives. digits32 reads gzipped IDX files; weather128 reads
// one subdirectory per class under train_root / test_root.
struct DatasetSource {
  Profile profile = Profile::kDigits32;
  std::filesystem::path train_images;
  std::filesystem::path train_labels;
  std::filesystem::path test_images;
  std::filesystem::path test_labels;
  std::filesystem::path train_root;
  std::filesystem::path test_root;
};

// Training defaults of a profile (image geometry, learning rates,
// augmentation, budget).
trainer::TrainConfig profile_defaults(Profile profile);

struct ExperimentSpec {
  DatasetSource dataset;
  std::vector<double> fractions;  // strictly increasing, each in (0, 1]
  std::vector<trainer::Method> methods;
  std::vector<std::uint64_t> seeds;
  trainer::TrainConfig base;      // profile defaults plus global keys
  // `<method>.<key> = value` lines, applied on top of `base`.
  std::map<trainer::Method, std::vector<kv::Entry>> overrides;
  std::filesystem::path output_dir;
  std::int64_t checkpoint_every = 250;  // 0 disables periodic checkpoints
  std::size_t grid_per_class = 8;       // 0 disables grid export

  void validate() const;
  // Training config of one run; master_seed is the run's seed.
  trainer::TrainConfig config_for(trainer::Method method, std::uint64_t seed) const;
};

// Flat `key = value` file (see kv::parse). Required keys: dataset, fractions,
// methods, seeds, plus the profile's data paths. Relative paths resolve
// against the config file's directory. Unknown keys are rejected with a
// suggestion of the closest known key.
ExperimentSpec parse_config(const std::filesystem::path& path);
ExperimentSpec parse_config_text(std::string_view text, std::string_view source,
                                 const std::filesystem::path& base_dir);

struct LoadedData {
  data::Dataset train;
  data::Dataset test;
};
LoadedData load_datasets(const DatasetSource& source, const trainer::TrainConfig& config);

}  // namespace cosup::harness
