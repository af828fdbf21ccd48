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

#include <benchmark/benchmark.h>

#include "cosup/data/sampling.hpp"
#include "cosup/trainer/trainer.hpp"

namespace {

using cosup::Tensor;
using cosup::trainer::Method;
using cosup::trainer::TrainConfig;
using cosup::trainer::Trainer;

// One full iteration of each method at the digits32 defaults.
void BM_TrainStep(benchmark::State& state) {
  TrainConfig cfg;
  cfg.method = static_cast<Method>(state.range(0));
  cfg.batch_size = 64;
  cfg.synthetic_batch_size = 64;
  cfg.beta = 0.0;  // every synthetic sample qualifies: worst case for sec_cgan
  cfg.pseudo_label_threshold = 1e-9;
  Trainer<float> trainer(cfg);

  cosup::RngStream rng(5, "bench");
  cosup::data::LabeledBatch<float> real;
  real.images = Tensor<float>({cfg.batch_size, 1, 32, 32});
  for (auto& v : real.images.values()) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  for (std::size_t i = 0; i < cfg.batch_size; ++i) real.labels.push_back(static_cast<int>(i % 10));
  const auto noise = cosup::data::sample_noise_labels<float>(cfg.synthetic_batch_size, 10,
                                                             cfg.net.z_dim, rng);
  for (auto _ : state) {
    switch (cfg.method) {
      case Method::kSecCgan: benchmark::DoNotOptimize(trainer.step_sec_cgan(real, noise)); break;
      case Method::kEcGan: benchmark::DoNotOptimize(trainer.step_ec_gan(real, noise)); break;
      case Method::kBaseline: benchmark::DoNotOptimize(trainer.step_baseline(real)); break;
    }
  }
  state.SetLabel(std::string(cosup::trainer::method_name(cfg.method)));
}
BENCHMARK(BM_TrainStep)
    ->Arg(static_cast<int>(Method::kBaseline))
    ->Arg(static_cast<int>(Method::kSecCgan))
    ->Arg(static_cast<int>(Method::kEcGan))
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
