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

#include "cosup/data/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <spdlog/spdlog.h>

#include "cosup/util/errors.hpp"

namespace cosup::data {
namespace {

// First `take` entries of a Fisher-Yates shuffle of `pool`.
std::vector<std::size_t> draw_without_replacement(std::vector<std::size_t> pool,
                                                  std::size_t take,
                                                  RngStream& rng) {
  for (std::size_t i = 0; i < take; ++i) {
    const std::size_t j = i + rng.uniform_index(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(take);
  return pool;
}

Dataset stratified_keep(const Dataset& d, std::span<const double> fractions,
                        RngStream& rng) {
  std::vector<std::size_t> keep;
  const auto groups = d.indices_by_class();
  for (std::size_t c = 0; c < groups.size(); ++c) {
    const auto take = static_cast<std::size_t>(
        std::lround(fractions[c] * static_cast<double>(groups[c].size())));
    auto chosen = draw_without_replacement(groups[c], take, rng);
    keep.insert(keep.end(), chosen.begin(), chosen.end());
  }
  std::sort(keep.begin(), keep.end());
  return d.select(keep);
}

}  // namespace

Dataset subset_fraction(const Dataset& d, double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw ArgumentError("fraction must lie in (0, 1], got " +
                        std::to_string(fraction));
  }
  if (fraction * static_cast<double>(d.size()) < d.num_classes) {
    spdlog::warn("subset of {} x {} examples leaves fewer than one per class",
                 fraction, d.size());
  }
  RngStream rng(seed, "subset");
  const std::vector<double> fractions(static_cast<std::size_t>(d.num_classes),
                                      fraction);
  return stratified_keep(d, fractions, rng);
}

Dataset induce_imbalance(const Dataset& d, std::span<const double> keep_fractions,
                         std::uint64_t seed) {
  if (keep_fractions.size() != static_cast<std::size_t>(d.num_classes)) {
    throw ArgumentError("expected " + std::to_string(d.num_classes) +
                        " keep fractions, got " +
                        std::to_string(keep_fractions.size()));
  }
  for (std::size_t c = 0; c < keep_fractions.size(); ++c) {
    const double f = keep_fractions[c];
    if (!(f > 0.0 && f <= 1.0)) {
      throw ArgumentError("keep fraction for class " + std::to_string(c) +
                          " must lie in (0, 1]");
    }
    if (std::lround(f * static_cast<double>(d.class_counts[c])) == 0) {
      throw ArgumentError("keep fraction " + std::to_string(f) + " empties class " +
                          std::to_string(c));
    }
  }
  RngStream rng(seed, "imbalance");
  return stratified_keep(d, keep_fractions, rng);
}

void SamplerWeights::validate() const {
  if (per_class_weight.empty()) throw ArgumentError("empty sampler weights");
  double sum = 0.0;
  for (double w : per_class_weight) {
    if (!(w > 0.0)) throw ArgumentError("sampler weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw ArgumentError("sampler weights must sum to 1");
  }
}

SamplerWeights compute_class_weights(const Dataset& d) {
  SamplerWeights w;
  double total = 0.0;
  for (std::size_t c = 0; c < d.class_counts.size(); ++c) {
    if (d.class_counts[c] == 0) {
      throw ArgumentError("class " + std::to_string(c) +
                          " has no examples; cannot weight it");
    }
    w.per_class_weight.push_back(1.0 / static_cast<double>(d.class_counts[c]));
    total += w.per_class_weight.back();
  }
  for (double& v : w.per_class_weight) v /= total;
  return w;
}

WeightedBatchSampler::WeightedBatchSampler(const Dataset& data,
                                           SamplerWeights weights,
                                           AugmentPolicy policy)
    : data_(&data), weights_(std::move(weights)), policy_(policy) {
  weights_.validate();
  policy_.validate();
  if (weights_.per_class_weight.size() != static_cast<std::size_t>(data.num_classes)) {
    throw ArgumentError("sampler weights do not match the number of classes");
  }
  by_class_ = data.indices_by_class();
  double run = 0.0;
  for (std::size_t c = 0; c < by_class_.size(); ++c) {
    if (by_class_[c].empty()) {
      throw ArgumentError("cannot sample class " + std::to_string(c) +
                          ": it has no examples");
    }
    // The weights are per example, so a class carries weight * count.
    run += weights_.per_class_weight[c] * static_cast<double>(by_class_[c].size());
    cumulative_.push_back(run);
  }
}

template <typename T>
LabeledBatch<T> WeightedBatchSampler::sample(std::size_t m, RngStream& sampling,
                                             RngStream& augmentation) const {
  if (m == 0) throw ArgumentError("batch size must be positive");
  const Dataset& d = *data_;
  LabeledBatch<T> batch;
  batch.images = Tensor<T>({m, d.channels(), d.height(), d.width()});
  batch.labels.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double u = sampling.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    const auto c = static_cast<std::size_t>(it - cumulative_.begin());
    const auto& pool = by_class_[c];
    const std::size_t idx = pool[sampling.uniform_index(pool.size())];
    batch.labels[i] = static_cast<int>(c);
    auto src = d.images.slice(idx);
    auto dst = batch.images.slice(i);
    for (std::size_t p = 0; p < src.size(); ++p) {
      dst[p] = static_cast<T>(normalize_pixel(src[p]));
    }
  }
  augment(batch.images, policy_, augmentation);
  return batch;
}

template <typename T>
NoiseLabelBatch<T> sample_noise_labels(std::size_t k, int num_classes,
                                       std::size_t z_dim, RngStream& rng) {
  if (k == 0) throw ArgumentError("noise batch size must be positive");
  if (num_classes < 1) throw ArgumentError("need at least one class");
  const auto classes = static_cast<std::size_t>(num_classes);
  NoiseLabelBatch<T> batch;
  batch.labels.reserve(k);
  for (std::size_t c = 0; c < classes; ++c) {
    const std::size_t count = k / classes + (c < k % classes ? 1 : 0);
    batch.labels.insert(batch.labels.end(), count, static_cast<int>(c));
  }
  for (std::size_t i = k; i-- > 1;) {
    std::swap(batch.labels[i], batch.labels[rng.uniform_index(i + 1)]);
  }
  batch.z = Tensor<T>({k, z_dim});
  for (auto& v : batch.z.values()) v = static_cast<T>(rng.normal());
  return batch;
}

#define COSUP_INSTANTIATE(T)                                                  \
  template LabeledBatch<T> WeightedBatchSampler::sample<T>(                  \
      std::size_t, RngStream&, RngStream&) const;                            \
  template NoiseLabelBatch<T> sample_noise_labels<T>(std::size_t, int,       \
                                                     std::size_t, RngStream&);

COSUP_INSTANTIATE(float)
COSUP_INSTANTIATE(double)
#undef COSUP_INSTANTIATE

}  // namespace cosup::data
