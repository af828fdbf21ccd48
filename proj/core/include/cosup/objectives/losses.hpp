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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "cosup/nn/functional.hpp"
#include "cosup/tensor.hpp"
#include "cosup/util/errors.hpp"

namespace cosup::objectives {

// Probabilities are clamped to [eps, 1 - eps] before taking logs.
inline constexpr double kProbEpsilon = 1e-7;

// Generated samples with the labels they were conditioned on and the
// discriminator's confidence that each (image, label) pair is real.
template <typename T>
struct SyntheticBatch {
  Tensor<T> images;  // (k, C, H, W)
  std::vector<int> labels;
  std::vector<T> confidences;

  std::size_t size() const { return labels.size(); }
};

struct LossBreakdown {
  double loss_d = 0.0;
  double loss_g = 0.0;
  double loss_c_real = 0.0;
  double loss_c_syn = 0.0;
  std::size_t k_prime = 0;
};

// -[t ln p + (1 - t) ln(1 - p)]
inline double bce(double p, int target) {
  const double q = std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon);
  return target == 1 ? -std::log(q) : -std::log(1.0 - q);
}

template <typename T>
double bce_mean(std::span<const T> probs, int target) {
  if (probs.empty()) throw ArgumentError("bce_mean of an empty batch");
  double sum = 0.0;
  for (T p : probs) sum += bce(static_cast<double>(p), target);
  return sum / static_cast<double>(probs.size());
}

// -ln softmax(logits)[label], through log-sum-exp.
template <typename T>
double ce(std::span<const T> logits, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= logits.size()) {
    throw ArgumentError("cross-entropy label " + std::to_string(label) +
                        " out of range");
  }
  return nn::log_sum_exp(logits) - static_cast<double>(logits[static_cast<std::size_t>(label)]);
}

// Mean CE over the rows of an (N, K) logit matrix.
template <typename T>
double ce_mean(const Tensor<T>& logits, std::span<const int> labels) {
  if (labels.empty()) throw ArgumentError("ce_mean of an empty batch");
  if (logits.rank() != 2 || logits.dim(0) != labels.size()) {
    throw ArgumentError("ce_mean: logits " + shape_to_string(logits.shape()) +
                        " do not match " + std::to_string(labels.size()) + " labels");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) sum += ce(logits.slice(i), labels[i]);
  return sum / static_cast<double>(labels.size());
}

// Row-wise softmax of an (N, K) matrix.
template <typename T>
Tensor<T> softmax(const Tensor<T>& logits) {
  Tensor<T> out(logits.shape());
  for (std::size_t i = 0; i < logits.dim(0); ++i) {
    auto row = logits.slice(i);
    const double lse = nn::log_sum_exp(row);
    auto dst = out.slice(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      dst[j] = static_cast<T>(std::exp(static_cast<double>(row[j]) - lse));
    }
  }
  return out;
}

// mean BCE(real, 1) + mean BCE(fake, 0)
template <typename T>
double discriminator_loss(std::span<const T> conf_real, std::span<const T> conf_fake) {
  return bce_mean(conf_real, 1) + bce_mean(conf_fake, 0);
}

// Non-saturating generator loss: mean BCE(fake, 1).
template <typename T>
double generator_loss(std::span<const T> conf_fake) {
  return bce_mean(conf_fake, 1);
}

// Positions whose confidence is >= beta, in order.
template <typename T>
std::vector<std::size_t> qualified_indices(std::span<const T> confidences, double beta) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    if (static_cast<double>(confidences[i]) >= beta) keep.push_back(i);
  }
  return keep;
}

template <typename T>
SyntheticBatch<T> filter_qualified(const SyntheticBatch<T>& batch, double beta) {
  const auto keep = qualified_indices(std::span<const T>(batch.confidences), beta);
  SyntheticBatch<T> out;
  if (!keep.empty()) out.images = gather_rows(batch.images, keep);
  for (std::size_t i : keep) {
    out.labels.push_back(batch.labels[i]);
    out.confidences.push_back(batch.confidences[i]);
  }
  return out;
}

// mean CE(real) + lambda * mean CE(qualified synthetic); the synthetic term
// is 0 when no sample qualified.
template <typename T>
std::pair<double, LossBreakdown> classifier_loss(
    const Tensor<T>& logits_real, std::span<const int> labels_real,
    const Tensor<T>& logits_syn, std::span<const int> labels_syn, double lambda) {
  if (labels_real.empty()) throw ArgumentError("classifier_loss needs real examples");
  if (!(lambda >= 0.0)) throw ArgumentError("lambda must be non-negative");
  LossBreakdown parts;
  parts.loss_c_real = ce_mean(logits_real, labels_real);
  parts.k_prime = labels_syn.size();
  if (!labels_syn.empty()) parts.loss_c_syn = ce_mean(logits_syn, labels_syn);
  return {parts.loss_c_real + lambda * parts.loss_c_syn, parts};
}

// mean ln D(x, y) + mean ln(1 - D(G(z, y'), y')); -ln 4 at equilibrium.
template <typename T>
double gan_value_diagnostic(std::span<const T> conf_real, std::span<const T> conf_fake) {
  return -discriminator_loss(conf_real, conf_fake);
}

// ---------------------------------------------------------------------------
// Logit-space forms used on the training path. They return the loss and
// write d(loss)/d(logit), scaled by `scale`, into `grad`.

// mean over i of BCE(sigmoid(logit_i), target) = softplus(-logit) for
// target 1 and softplus(logit) for target 0.
template <typename T>
double bce_with_logits_mean(std::span<const T> logits, int target, T scale,
                            std::span<T> grad) {
  if (logits.empty()) throw ArgumentError("bce_with_logits_mean of an empty batch");
  const double n = static_cast<double>(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double x = logits[i];
    sum += target == 1 ? nn::softplus(-x) : nn::softplus(x);
    if (!grad.empty()) {
      const double p = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                                : std::exp(x) / (1.0 + std::exp(x));
      grad[i] = static_cast<T>(static_cast<double>(scale) * (p - target) / n);
    }
  }
  return sum / n;
}

// Mean CE over rows with d/d(logits) = scale * (softmax - onehot) / N.
template <typename T>
double ce_mean_with_grad(const Tensor<T>& logits, std::span<const int> labels,
                         T scale, Tensor<T>* grad) {
  const double loss = ce_mean(logits, labels);
  if (grad != nullptr) {
    *grad = softmax(logits);
    const double n = static_cast<double>(labels.size());
    const std::size_t k = logits.dim(1);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        const double onehot = static_cast<int>(j) == labels[i] ? 1.0 : 0.0;
        T& g = (*grad)[i * k + j];
        g = static_cast<T>(static_cast<double>(scale) * (static_cast<double>(g) - onehot) / n);
      }
    }
  }
  return loss;
}

}  // namespace cosup::objectives
