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

#include <filesystem>
#include <functional>
#include <string>

#include "cosup/harness/experiment.hpp"
#include "cosup/harness/results.hpp"
#include "cosup/trainer/metrics.hpp"

namespace cosup::harness {

struct RunRequest {
  trainer::TrainConfig config;
  double fraction = 1.0;
  std::filesystem::path directory;      // receives config, metrics, checkpoint
  std::int64_t checkpoint_every = 250;  // 0: only at the end
  std::size_t grid_per_class = 0;
};

// Trains request.config on `train_subset` and evaluates on `test`. A
// directory holding a finished run is read back instead of retrained; one
// holding a checkpoint is resumed from it. Failures are returned in
// RunResult::error rather than thrown.
RunResult run_single(const RunRequest& request, const data::Dataset& train_subset,
                     const data::Dataset& test);

// Every (fraction, seed) cell draws one subset shared by all methods.
// Run directories live under output_dir/runs; the tables are written to
// output_dir as results.md, results.csv and runs.csv.
ResultsTable run_experiment(const ExperimentSpec& spec);

std::string run_directory_name(double fraction, trainer::Method method, std::uint64_t seed);

}  // namespace cosup::harness
