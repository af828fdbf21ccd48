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

#include "cosup/nn/layers.hpp"
#include "cosup/util/rng.hpp"

namespace {

using cosup::RngStream;
using cosup::Tensor;
using cosup::nn::Backprop;
using cosup::nn::Mode;

Tensor<float> random_tensor(cosup::Shape shape, std::uint64_t seed) {
  Tensor<float> x(std::move(shape));
  RngStream rng(seed, "bench");
  cosup::nn::fill_normal(x.values(), 0.0, 1.0, rng);
  return x;
}

// Args: batch, channels in/out, spatial size.
void BM_Conv2dForwardBackward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto c = static_cast<std::size_t>(state.range(1));
  const auto s = static_cast<std::size_t>(state.range(2));
  cosup::nn::Conv2d<float> conv({c, 2 * c, 4, 2, 1});
  RngStream rng(1, "init");
  cosup::nn::fill_normal(conv.weight().value.values(), 0.0, 0.02, rng);
  const Tensor<float> x = random_tensor({n, c, s, s}, 2);
  for (auto _ : state) {
    Tensor<float> y = conv.forward(x, Mode::kTrain);
    benchmark::DoNotOptimize(conv.backward(y, Backprop{}));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Conv2dForwardBackward)->Args({64, 16, 32})->Args({64, 32, 16})->Args({8, 64, 64});

void BM_ConvTranspose2dForwardBackward(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto c = static_cast<std::size_t>(state.range(1));
  const auto s = static_cast<std::size_t>(state.range(2));
  cosup::nn::ConvTranspose2d<float> convt({c, c / 2, 4, 2, 1});
  RngStream rng(1, "init");
  cosup::nn::fill_normal(convt.weight().value.values(), 0.0, 0.02, rng);
  const Tensor<float> x = random_tensor({n, c, s, s}, 3);
  for (auto _ : state) {
    Tensor<float> y = convt.forward(x, Mode::kTrain);
    benchmark::DoNotOptimize(convt.backward(y, Backprop{}));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_ConvTranspose2dForwardBackward)->Args({64, 64, 8})->Args({64, 32, 16});

void BM_BatchNormTrain(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0));
  cosup::nn::BatchNorm2d<float> bn(c);
  const Tensor<float> x = random_tensor({64, c, 16, 16}, 4);
  for (auto _ : state) {
    Tensor<float> y = bn.forward(x, Mode::kTrain);
    benchmark::DoNotOptimize(bn.backward(y, Backprop{}));
  }
}
BENCHMARK(BM_BatchNormTrain)->Arg(16)->Arg(64);

}  // namespace
