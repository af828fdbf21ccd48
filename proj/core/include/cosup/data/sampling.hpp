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
#include <span>
#include <vector>

#include "cosup/data/augment.hpp"
#include "cosup/data/dataset.hpp"
#include "cosup/tensor.hpp"
#include "cosup/util/rng.hpp"

namespace cosup::data {

// Stratified draw of round(fraction * count_c) examples from every class,
// without replacement. Deterministic in `seed`; examples keep their original
// relative order. Throws ArgumentError unless 0 < fraction <= 1.
Dataset subset_fraction(const Dataset& d, double fraction, std::uint64_t seed);

// Keeps round(keep_fractions[c] * count_c) examples of class c. Throws if a
// fraction is outside (0, 1] or a class would be left empty.
Dataset induce_imbalance(const Dataset& d, std::span<const double> keep_fractions,
                         std::uint64_t seed);

struct SamplerWeights {
  std::vector<double> per_class_weight;
  void validate() const;
};

// Inverse class frequency, normalized to sum to 1.
SamplerWeights compute_class_weights(const Dataset& d);

template <typename T>
struct LabeledBatch {
  Tensor<T> images;  // (m, C, H, W) in [-1, 1]
  std::vector<int> labels;
};

template <typename T>
struct NoiseLabelBatch {
  Tensor<T> z;  // (k, z_dim), standard normal
  std::vector<int> labels;
};

// Draws batches with replacement, each example with probability proportional
// to its class weight: a class c with probability ~ weight[c] * count[c], then
// an example uniformly within it. Holds a reference to the dataset.
class WeightedBatchSampler {
 public:
  WeightedBatchSampler(const Dataset& data, SamplerWeights weights,
                       AugmentPolicy policy = {});

  template <typename T>
  LabeledBatch<T> sample(std::size_t m, RngStream& sampling,
                         RngStream& augmentation) const;

  const Dataset& dataset() const { return *data_; }
  const SamplerWeights& weights() const { return weights_; }
  const AugmentPolicy& policy() const { return policy_; }

 private:
  const Dataset* data_;
  SamplerWeights weights_;
  AugmentPolicy policy_;
  std::vector<double> cumulative_;
  std::vector<std::vector<std::size_t>> by_class_;
};

template <typename T>
LabeledBatch<T> sample_weighted_batch(const Dataset& d, const SamplerWeights& w,
                                      std::size_t m, const AugmentPolicy& policy,
                                      RngStream& sampling,
                                      RngStream& augmentation) {
  return WeightedBatchSampler(d, w, policy).sample<T>(m, sampling, augmentation);
}

// floor(k / K) labels per class plus one more for each of the first k mod K
// classes, shuffled; then k * z_dim standard normals.
template <typename T>
NoiseLabelBatch<T> sample_noise_labels(std::size_t k, int num_classes,
                                       std::size_t z_dim, RngStream& rng);

}  // namespace cosup::data
