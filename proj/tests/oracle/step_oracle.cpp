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

#include "step_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "scalar_tape.hpp"

namespace cosup::oracle {

namespace {

constexpr double kBnEps = 1e-5;
constexpr double kBnMomentum = 0.1;
constexpr double kSlope = 0.2;

struct VT {
  std::vector<std::size_t> shape;
  std::vector<Var> v;
  std::size_t dim(std::size_t i) const { return shape[i]; }
};

// Every parameter of the three networks as a leaf on the tape.
struct Leaves {
  std::map<std::string, std::vector<Var>> vars;
  const std::vector<Var>& operator[](const std::string& name) const {
    auto it = vars.find(name);
    if (it == vars.end()) throw std::runtime_error("oracle: no parameter " + name);
    return it->second;
  }
};

Leaves make_leaves(Tape& t, const NamedTensors& params) {
  Leaves l;
  for (const auto& [name, values] : params) {
    auto& vs = l.vars[name];
    for (double x : values) vs.push_back(t.leaf(x));
  }
  return l;
}

VT constant(Tape& t, std::vector<std::size_t> shape, const std::vector<double>& values) {
  VT out{std::move(shape), {}};
  for (double x : values) out.v.push_back(t.leaf(x));
  return out;
}

std::vector<double> values_of(const Tape& t, const VT& x) {
  std::vector<double> out;
  for (Var v : x.v) out.push_back(t.value(v));
  return out;
}

// Cross-correlation; w is (O, C, k, k).
VT conv2d(Tape& t, const VT& x, const std::vector<Var>& w, std::size_t out_ch, std::size_t k,
          std::size_t stride, std::size_t pad) {
  const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const std::size_t ho = (h + 2 * pad - k) / stride + 1, wo = (wd + 2 * pad - k) / stride + 1;
  VT y{{n, out_ch, ho, wo}, {}};
  std::vector<Var> a, b;
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t o = 0; o < out_ch; ++o)
      for (std::size_t i = 0; i < ho; ++i)
        for (std::size_t j = 0; j < wo; ++j) {
          a.clear();
          b.clear();
          for (std::size_t ci = 0; ci < c; ++ci)
            for (std::size_t p = 0; p < k; ++p)
              for (std::size_t q = 0; q < k; ++q) {
                const long r = static_cast<long>(i * stride + p) - static_cast<long>(pad);
                const long cc = static_cast<long>(j * stride + q) - static_cast<long>(pad);
                if (r < 0 || cc < 0 || r >= static_cast<long>(h) || cc >= static_cast<long>(wd)) continue;
                a.push_back(w[((o * c + ci) * k + p) * k + q]);
                b.push_back(x.v[((s * c + ci) * h + static_cast<std::size_t>(r)) * wd +
                                static_cast<std::size_t>(cc)]);
              }
          y.v.push_back(dot(t, a, b));
        }
  return y;
}

// Fractionally-strided convolution; w is (C, O, k, k). Output pixel (r, c)
// collects input (i, j) through kernel tap (r + pad - i s, c + pad - j s).
VT conv_transpose(Tape& t, const VT& x, const std::vector<Var>& w, std::size_t out_ch,
                  std::size_t k, std::size_t stride, std::size_t pad) {
  const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), wd = x.dim(3);
  const std::size_t ho = (h - 1) * stride + k - 2 * pad, wo = (wd - 1) * stride + k - 2 * pad;
  VT y{{n, out_ch, ho, wo}, {}};
  std::vector<Var> a, b;
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t o = 0; o < out_ch; ++o)
      for (std::size_t r = 0; r < ho; ++r)
        for (std::size_t cc = 0; cc < wo; ++cc) {
          a.clear();
          b.clear();
          for (std::size_t ci = 0; ci < c; ++ci)
            for (std::size_t i = 0; i < h; ++i)
              for (std::size_t j = 0; j < wd; ++j) {
                const long p = static_cast<long>(r + pad) - static_cast<long>(i * stride);
                const long q = static_cast<long>(cc + pad) - static_cast<long>(j * stride);
                if (p < 0 || q < 0 || p >= static_cast<long>(k) || q >= static_cast<long>(k)) continue;
                a.push_back(w[((ci * out_ch + o) * k + static_cast<std::size_t>(p)) * k +
                              static_cast<std::size_t>(q)]);
                b.push_back(x.v[((s * c + ci) * h + i) * wd + j]);
              }
          y.v.push_back(dot(t, a, b));
        }
  return y;
}

struct BnStats {
  std::vector<double> mean, var;  // biased batch variance
  double count = 0.0;
};

VT batch_norm_train(Tape& t, const VT& x, const std::vector<Var>& gamma,
                    const std::vector<Var>& beta, BnStats* stats) {
  const std::size_t n = x.dim(0), c = x.dim(1), plane = x.dim(2) * x.dim(3);
  const double count = static_cast<double>(n * plane);
  VT y{x.shape, std::vector<Var>(x.v.size())};
  for (std::size_t ch = 0; ch < c; ++ch) {
    std::vector<Var> xs;
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t p = 0; p < plane; ++p) xs.push_back(x.v[(s * c + ch) * plane + p]);
    const Var mean = scale(t, sum(t, xs), 1.0 / count);
    std::vector<Var> d;
    for (Var xi : xs) d.push_back(sub(t, xi, mean));
    const Var var = scale(t, dot(t, d, d), 1.0 / count);
    const Var inv = exp(t, scale(t, log(t, add_const(t, var, kBnEps)), -0.5));
    if (stats != nullptr) {
      stats->count = count;
      stats->mean.push_back(t.value(mean));
      stats->var.push_back(t.value(var));
    }
    std::size_t idx = 0;
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t p = 0; p < plane; ++p, ++idx) {
        const Var xhat = mul(t, d[idx], inv);
        y.v[(s * c + ch) * plane + p] = add(t, mul(t, xhat, gamma[ch]), beta[ch]);
      }
  }
  return y;
}

VT batch_norm_eval(Tape& t, const VT& x, const std::vector<Var>& gamma, const std::vector<Var>& beta,
                   const std::vector<double>& rmean, const std::vector<double>& rvar) {
  const std::size_t n = x.dim(0), c = x.dim(1), plane = x.dim(2) * x.dim(3);
  VT y{x.shape, std::vector<Var>(x.v.size())};
  for (std::size_t s = 0; s < n; ++s)
    for (std::size_t ch = 0; ch < c; ++ch) {
      const double inv = 1.0 / std::sqrt(rvar[ch] + kBnEps);
      for (std::size_t p = 0; p < plane; ++p) {
        const std::size_t i = (s * c + ch) * plane + p;
        const Var xhat = scale(t, add_const(t, x.v[i], -rmean[ch]), inv);
        y.v[i] = add(t, mul(t, xhat, gamma[ch]), beta[ch]);
      }
    }
  return y;
}

template <typename F>
VT map(const VT& x, F f) {
  VT y{x.shape, {}};
  for (Var v : x.v) y.v.push_back(f(v));
  return y;
}

VT add_tensors(Tape& t, const VT& a, const VT& b) {
  VT y{a.shape, {}};
  for (std::size_t i = 0; i < a.v.size(); ++i) y.v.push_back(add(t, a.v[i], b.v[i]));
  return y;
}

std::size_t stages(const OracleNetShape& s) {
  std::size_t n = 0;
  for (std::size_t x = s.image_size; x > 4; x /= 2) ++n;
  return n;
}

// ------------------------------------------------------------- networks

VT generator(Tape& t, const Leaves& p, const OracleNetShape& s, const std::vector<double>& z,
             const std::vector<int>& labels) {
  const std::size_t n = labels.size();
  const auto& table = p["generator.embed.weight"];
  VT h{{n, 2 * s.z_dim, 1, 1}, {}};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < s.z_dim; ++j) h.v.push_back(t.leaf(z[i * s.z_dim + j]));
    for (std::size_t j = 0; j < s.z_dim; ++j)
      h.v.push_back(table[static_cast<std::size_t>(labels[i]) * s.z_dim + j]);
  }
  const std::size_t st = stages(s);
  std::size_t width = s.base_width << (st - 1);
  for (std::size_t i = 0; i < st; ++i) {
    const std::string up = "generator.up" + std::to_string(i) + ".weight";
    const std::string bn = "generator.bn" + std::to_string(i);
    const std::size_t out = i == 0 ? width : h.dim(1) / 2;
    h = i == 0 ? conv_transpose(t, h, p[up], out, 4, 1, 0) : conv_transpose(t, h, p[up], out, 4, 2, 1);
    h = batch_norm_train(t, h, p[bn + ".gamma"], p[bn + ".beta"], nullptr);
    h = map(h, [&](Var v) { return relu(t, v); });
  }
  h = conv_transpose(t, h, p["generator.up" + std::to_string(st) + ".weight"], s.channels, 4, 2, 1);
  return map(h, [&](Var v) { return tanh(t, v); });
}

// (N,) logits.
std::vector<Var> discriminator(Tape& t, const Leaves& p, const OracleNetShape& s, const VT& images,
                               const std::vector<int>& labels) {
  const std::size_t n = labels.size(), plane = s.image_size * s.image_size;
  const std::size_t in = s.channels + s.num_classes;
  VT x{{n, in, s.image_size, s.image_size}, {}};
  const Var zero = t.leaf(0.0), one = t.leaf(1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < s.channels; ++c)
      for (std::size_t q = 0; q < plane; ++q) x.v.push_back(images.v[(i * s.channels + c) * plane + q]);
    for (std::size_t k = 0; k < s.num_classes; ++k)
      for (std::size_t q = 0; q < plane; ++q)
        x.v.push_back(static_cast<int>(k) == labels[i] ? one : zero);
  }
  const std::size_t st = stages(s);
  std::size_t width = s.base_width;
  VT h = conv2d(t, x, p["discriminator.conv0.weight"], width, 4, 2, 1);
  h = map(h, [&](Var v) { return leaky_relu(t, v, kSlope); });
  for (std::size_t i = 1; i < st; ++i) {
    width *= 2;
    const std::string bn = "discriminator.bn" + std::to_string(i);
    h = conv2d(t, h, p["discriminator.conv" + std::to_string(i) + ".weight"], width, 4, 2, 1);
    h = batch_norm_train(t, h, p[bn + ".gamma"], p[bn + ".beta"], nullptr);
    h = map(h, [&](Var v) { return leaky_relu(t, v, kSlope); });
  }
  h = conv2d(t, h, p["discriminator.conv" + std::to_string(st) + ".weight"], 1, 4, 1, 0);
  return h.v;
}

// Batch norm in the classifier: train mode records statistics for the
// running-average update, eval mode reads them.
struct ClassifierBn {
  bool train;
  NamedTensors* running;
  std::map<std::string, BnStats> batch_stats;

  VT apply(Tape& t, const Leaves& p, const std::string& name, const VT& x) {
    if (train) {
      BnStats st;
      VT y = batch_norm_train(t, x, p[name + ".gamma"], p[name + ".beta"], &st);
      batch_stats[name] = st;
      return y;
    }
    return batch_norm_eval(t, x, p[name + ".gamma"], p[name + ".beta"],
                           running->at(name + ".running_mean"), running->at(name + ".running_var"));
  }
};

// (N, K) logits, row-major.
std::vector<Var> classifier(Tape& t, const Leaves& p, const OracleNetShape& s, const VT& images,
                            ClassifierBn& bn) {
  const std::size_t w = s.classifier_width;
  VT h = conv2d(t, images, p["classifier.stem.weight"], w, 3, 1, 1);
  h = map(bn.apply(t, p, "classifier.stem_bn", h), [&](Var v) { return relu(t, v); });
  std::size_t in = w, block = 0;
  for (std::size_t stage = 0; stage < 4; ++stage) {
    const std::size_t out = w << stage;
    for (std::size_t b = 0; b < s.classifier_depth; ++b, ++block) {
      const std::size_t stride = (stage > 0 && b == 0) ? 2 : 1;
      const std::string name = "classifier.block" + std::to_string(block);
      VT r = conv2d(t, h, p[name + ".conv1.weight"], out, 3, stride, 1);
      r = map(bn.apply(t, p, name + ".bn1", r), [&](Var v) { return relu(t, v); });
      r = conv2d(t, r, p[name + ".conv2.weight"], out, 3, 1, 1);
      r = bn.apply(t, p, name + ".bn2", r);
      VT shortcut = h;
      if (stride != 1 || in != out) {
        shortcut = conv2d(t, h, p[name + ".proj.weight"], out, 1, stride, 0);
        shortcut = bn.apply(t, p, name + ".proj_bn", shortcut);
      }
      h = map(add_tensors(t, r, shortcut), [&](Var v) { return relu(t, v); });
      in = out;
    }
  }
  const std::size_t n = h.dim(0), c = h.dim(1), plane = h.dim(2) * h.dim(3);
  std::vector<Var> pooled;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t ch = 0; ch < c; ++ch) {
      std::vector<Var> xs(h.v.begin() + static_cast<long>((i * c + ch) * plane),
                          h.v.begin() + static_cast<long>((i * c + ch + 1) * plane));
      pooled.push_back(scale(t, sum(t, xs), 1.0 / static_cast<double>(plane)));
    }
  const auto& wt = p["classifier.head.weight"];
  const auto& bias = p["classifier.head.bias"];
  std::vector<Var> logits;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < s.num_classes; ++k) {
      std::vector<Var> a(wt.begin() + static_cast<long>(k * c), wt.begin() + static_cast<long>((k + 1) * c));
      std::vector<Var> b(pooled.begin() + static_cast<long>(i * c),
                         pooled.begin() + static_cast<long>((i + 1) * c));
      logits.push_back(add(t, dot(t, a, b), bias[k]));
    }
  return logits;
}

// ------------------------------------------------------------- losses

Var bce_logits_mean(Tape& t, const std::vector<Var>& logits, int target) {
  std::vector<Var> terms;
  for (Var x : logits) terms.push_back(softplus(t, target == 1 ? scale(t, x, -1.0) : x));
  return scale(t, sum(t, terms), 1.0 / static_cast<double>(logits.size()));
}

Var ce_mean(Tape& t, const std::vector<Var>& logits, const std::vector<int>& labels, std::size_t k) {
  std::vector<Var> terms;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) m = std::max(m, t.value(logits[i * k + j]));
    std::vector<Var> e;
    for (std::size_t j = 0; j < k; ++j) e.push_back(exp(t, add_const(t, logits[i * k + j], -m)));
    const Var lse = add_const(t, log(t, sum(t, e)), m);
    terms.push_back(sub(t, lse, logits[i * k + static_cast<std::size_t>(labels[i])]));
  }
  return scale(t, sum(t, terms), 1.0 / static_cast<double>(labels.size()));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// ------------------------------------------------------------- updates

void adam_update(NamedTensors& params, OracleAdam& adam, const Leaves& leaves,
                 const std::vector<double>& adj, const std::string& prefix, double lr,
                 const OracleHyper& h) {
  ++adam.step;
  const double c1 = 1.0 - std::pow(h.beta1, static_cast<double>(adam.step));
  const double c2 = 1.0 - std::pow(h.beta2, static_cast<double>(adam.step));
  for (auto& [name, values] : params) {
    if (name.rfind(prefix, 0) != 0) continue;
    auto& m = adam.first[name];
    auto& v = adam.second[name];
    m.resize(values.size(), 0.0);
    v.resize(values.size(), 0.0);
    const auto& vars = leaves[name];
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double g = adj[vars[i]];
      m[i] = h.beta1 * m[i] + (1.0 - h.beta1) * g;
      v[i] = h.beta2 * v[i] + (1.0 - h.beta2) * g * g;
      values[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + h.eps);
    }
  }
}

std::vector<double> scaled_images(const std::vector<double>& all, std::size_t per,
                                  const std::vector<std::size_t>& rows) {
  std::vector<double> out;
  for (std::size_t r : rows) out.insert(out.end(), all.begin() + static_cast<long>(r * per),
                                        all.begin() + static_cast<long>((r + 1) * per));
  return out;
}

double discriminator_update(OracleState& st, const OracleNetShape& s, const OracleHyper& h,
                            const std::vector<double>& images, const std::vector<int>& labels,
                            int target) {
  Tape t;
  const Leaves leaves = make_leaves(t, st.params);
  const VT x = constant(t, {labels.size(), s.channels, s.image_size, s.image_size}, images);
  const Var loss = bce_logits_mean(t, discriminator(t, leaves, s, x, labels), target);
  adam_update(st.params, st.adam_d, leaves, t.adjoints(loss), "discriminator.", h.lr_d, h);
  return t.value(loss);
}

double classifier_update(OracleState& st, const OracleNetShape& s, const OracleHyper& h,
                         const std::vector<double>& images, const std::vector<int>& labels,
                         double weight) {
  Tape t;
  const Leaves leaves = make_leaves(t, st.params);
  const VT x = constant(t, {labels.size(), s.channels, s.image_size, s.image_size}, images);
  ClassifierBn bn{true, &st.running, {}};
  const Var loss = ce_mean(t, classifier(t, leaves, s, x, bn), labels, s.num_classes);
  const Var weighted = scale(t, loss, weight);
  adam_update(st.params, st.adam_c, leaves, t.adjoints(weighted), "classifier.", h.lr_c, h);
  for (const auto& [name, stats] : bn.batch_stats) {
    auto& rm = st.running.at(name + ".running_mean");
    auto& rv = st.running.at(name + ".running_var");
    const double unbias = stats.count / (stats.count - 1.0);
    for (std::size_t c = 0; c < rm.size(); ++c) {
      rm[c] = (1.0 - kBnMomentum) * rm[c] + kBnMomentum * stats.mean[c];
      rv[c] = (1.0 - kBnMomentum) * rv[c] + kBnMomentum * stats.var[c] * unbias;
    }
  }
  return t.value(loss);
}

// Threshold halfway between the two middle scores.
double split_threshold(std::vector<double> scores) {
  std::sort(scores.begin(), scores.end());
  const std::size_t mid = scores.size() / 2;
  return 0.5 * (scores[mid - 1] + scores[mid]);
}

double margin(const std::vector<double>& scores, double threshold) {
  double m = std::numeric_limits<double>::infinity();
  for (double s : scores) m = std::min(m, std::fabs(s - threshold));
  return m;
}

}  // namespace

OracleOutcome oracle_step(const OracleNetShape& s, OracleState& st, OracleHyper& h,
                          const OracleBatch& batch) {
  if (s.image_size != 32) throw std::invalid_argument("oracle supports 32x32 images only");
  OracleOutcome out;
  const std::size_t k = batch.noise_labels.size();
  const std::size_t per = s.channels * s.image_size * s.image_size;
  const std::vector<int> real_gan_labels =
      h.ec_gan ? std::vector<int>(batch.real_labels.size(), 0) : batch.real_labels;
  const std::vector<int> fake_labels = h.ec_gan ? std::vector<int>(k, 0) : batch.noise_labels;

  // 1. discriminator on real pairs, target 1.
  const double loss_real =
      discriminator_update(st, s, h, batch.real_images, real_gan_labels, 1);

  // 2. generated batch, then discriminator on it, target 0.
  std::vector<double> fake;
  {
    Tape t;
    const Leaves leaves = make_leaves(t, st.params);
    fake = values_of(t, generator(t, leaves, s, batch.z, fake_labels));
  }
  const double loss_fake = discriminator_update(st, s, h, fake, fake_labels, 0);
  out.loss_d = loss_real + loss_fake;

  // 3. generator through a fresh discriminator evaluation, target 1.
  std::vector<double> conf_syn;
  {
    Tape t;
    const Leaves leaves = make_leaves(t, st.params);
    const VT images = generator(t, leaves, s, batch.z, fake_labels);
    const std::vector<Var> logits = discriminator(t, leaves, s, images, fake_labels);
    for (Var l : logits) conf_syn.push_back(sigmoid(t.value(l)));
    const Var loss = bce_logits_mean(t, logits, 1);
    out.loss_g = t.value(loss);
    adam_update(st.params, st.adam_g, leaves, t.adjoints(loss), "generator.", h.lr_g, h);
  }

  // 4. classifier on the real batch.
  out.loss_c_real = classifier_update(st, s, h, batch.real_images, batch.real_labels, 1.0);

  // 5. qualified synthetic samples, weighted by lambda.
  std::vector<std::size_t> keep;
  std::vector<int> kept_labels;
  if (!h.ec_gan) {
    if (std::isnan(h.beta)) h.beta = split_threshold(conf_syn);
    out.threshold_used = h.beta;
    out.threshold_margin = margin(conf_syn, h.beta);
    for (std::size_t i = 0; i < k; ++i) {
      if (conf_syn[i] >= h.beta) {
        keep.push_back(i);
        kept_labels.push_back(batch.noise_labels[i]);
      }
    }
  } else {
    Tape t;
    const Leaves leaves = make_leaves(t, st.params);
    const VT x = constant(t, {k, s.channels, s.image_size, s.image_size}, fake);
    ClassifierBn bn{false, &st.running, {}};
    const std::vector<Var> logits = classifier(t, leaves, s, x, bn);
    std::vector<double> best_prob(k);
    std::vector<int> best_class(k);
    for (std::size_t i = 0; i < k; ++i) {
      double m = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < s.num_classes; ++j) m = std::max(m, t.value(logits[i * s.num_classes + j]));
      double z = 0.0;
      for (std::size_t j = 0; j < s.num_classes; ++j) z += std::exp(t.value(logits[i * s.num_classes + j]) - m);
      best_prob[i] = 0.0;
      for (std::size_t j = 0; j < s.num_classes; ++j) {
        const double pj = std::exp(t.value(logits[i * s.num_classes + j]) - m) / z;
        if (pj > best_prob[i]) {
          best_prob[i] = pj;
          best_class[i] = static_cast<int>(j);
        }
      }
    }
    if (std::isnan(h.pseudo_label_threshold)) h.pseudo_label_threshold = split_threshold(best_prob);
    out.threshold_used = h.pseudo_label_threshold;
    out.threshold_margin = margin(best_prob, h.pseudo_label_threshold);
    for (std::size_t i = 0; i < k; ++i) {
      if (best_prob[i] >= h.pseudo_label_threshold) {
        keep.push_back(i);
        kept_labels.push_back(best_class[i]);
      }
    }
  }
  out.k_prime = keep.size();
  if (!keep.empty() && h.lambda > 0.0) {
    out.loss_c_syn = classifier_update(st, s, h, scaled_images(fake, per, keep), kept_labels, h.lambda);
  }
  return out;
}

}  // namespace cosup::oracle
