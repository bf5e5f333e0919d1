/* Copyright 2026 The drivenet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License. */

#pragma once

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

#include "drivenet/augment/pipeline.hpp"
#include "drivenet/dataio/manifest.hpp"
#include "drivenet/dataio/split.hpp"
#include "drivenet/net/checkpoint.hpp"
#include "drivenet/net/isda.hpp"
#include "drivenet/train/adam.hpp"
#include "drivenet/train/targets.hpp"

namespace drivenet::train {

enum class LossKind { cross_entropy, isda };

inline std::string_view to_string(LossKind k) { return k == LossKind::isda ? "isda" : "cross_entropy"; }

inline LossKind parse_loss(std::string_view s) {
  if (s == "isda") return LossKind::isda;
  if (s == "cross_entropy") return LossKind::cross_entropy;
  throw ConfigError("unknown loss: " + std::string(s));
}

struct TrainConfig {
  int epochs = 320;
  int batch_size = 5;
  AdamConfig adam;
  LossKind loss = LossKind::isda;
  double label_smoothing = 0.0;
  double isda_lambda0 = 0.5;
  std::uint64_t seed = 7;
  int workers = 1;
  double val_fraction = 0.0;
  net::ModelConfig model;
  augment::AugPipelineConfig augment;
  std::string config_hash;

  void validate() const {
    if (epochs < 1) throw ConfigError("train.epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
    if (!(adam.learning_rate > 0.0)) throw ConfigError("train.learning_rate must be > 0");
    if (label_smoothing < 0.0 || label_smoothing >= 1.0) throw ConfigError("train.label_smoothing must be in [0, 1)");
    if (augment.smoothing < 0.0 || augment.smoothing >= 1.0) throw ConfigError("augment.smoothing must be in [0, 1)");
    if (isda_lambda0 < 0.0) throw ConfigError("train.isda_lambda0 must be >= 0");
    if (val_fraction < 0.0 || val_fraction >= 1.0) throw ConfigError("data.val_fraction must be in [0, 1)");
    model.dims.validate();
  }

  /// An explicit label_smoothing wins; otherwise the pipeline's value
  /// applies when its label_smoothing op is enabled.
  double effective_smoothing() const {
    if (label_smoothing > 0.0) return label_smoothing;
    return augment.has(augment::AugOp::label_smoothing) ? augment.smoothing : 0.0;
  }
};

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  double train_accuracy = 0.0;
  std::optional<double> val_accuracy;
  double wall_seconds = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;

  void write_csv(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write history " + path.string());
    out << "epoch,loss,train_accuracy,val_accuracy,wall_seconds\n";
    out << std::setprecision(8);
    for (const auto& e : epochs) {
      out << e.epoch << ',' << e.loss << ',' << e.train_accuracy << ',';
      if (e.val_accuracy) out << *e.val_accuracy;
      out << ',' << std::fixed << std::setprecision(3) << e.wall_seconds << std::defaultfloat << std::setprecision(8)
          << '\n';
    }
  }
};

/// Loads every clip of a manifest for the given branches.
inline std::vector<Clip> load_clips(const DatasetManifest& m, const std::vector<BranchKind>& branches,
                                    int workers = 1) {
  m.require_branches(branches);
  std::vector<Clip> clips(m.size());
  net::parallel_for(m.size(), workers, [&](std::size_t i) { clips[i] = load_clip(m, m.records[i], branches); });
  return clips;
}

using Model = net::Model<float>;

struct TrainResult {
  Model final_model;
  Model best_model;
  TrainHistory history;
  net::CheckpointMeta meta;
  int best_epoch = 0;
};

/// Mini-batch training with Adam. Every random draw comes from a stream
/// keyed by (seed, purpose, clip id, epoch), and per-sample gradients are
/// summed in batch order, so results do not depend on the worker count.
class Trainer {
public:
  using EpochCallback = std::function<void(const EpochRecord&)>;

  Trainer(TrainConfig cfg, std::vector<Clip> clips, std::vector<Clip> val_clips = {},
          net::ExternalExtractor<float> extractor = {})
      : cfg_(std::move(cfg)), clips_(std::move(clips)), val_clips_(std::move(val_clips)),
        augmentor_(cfg_.augment) {
    cfg_.validate();
    if (clips_.empty()) throw Error("training set is empty");
    auto init_rng = make_rng(cfg_.seed, "init");
    model_ = Model(cfg_.model, init_rng, std::move(extractor));
    std::vector<const Clip*> ptrs;
    for (const auto& c : clips_) ptrs.push_back(&c);
    model_.set_norm_stats(net::estimate_norm_stats(ptrs, cfg_.model));
    adam_ = AdamState<float>::like(model_.params());
    isda_ = net::IsdaState<float>(cfg_.model.dims.fusion_dense_units, cfg_.model.dims.n_classes, cfg_.isda_lambda0);
  }

  const TrainConfig& config() const { return cfg_; }
  Model& model() { return model_; }
  const Model& model() const { return model_; }
  long steps() const { return adam_.step; }

  struct StepResult {
    double loss = 0.0;
    int correct = 0;
    bool finite = true;
  };

  /// One optimizer update on `batch` (augmented, training mode).
  StepResult step(const std::vector<const Clip*>& batch, int epoch) {
    const auto B = batch.size();
    std::vector<Clip> augmented(B);
    std::vector<net::ForwardCache<float>> caches(B);
    std::vector<net::ForwardResult<float>> outs(B);
    net::parallel_for(B, cfg_.workers, [&](std::size_t i) {
      auto rng = make_rng(cfg_.seed, "sample", batch[i]->id, epoch, adam_.step);
      augmented[i] = augmentor_(*batch[i], rng);
      outs[i] = model_.forward(model_.prepare(augmented[i]), true, &rng, &caches[i]);
    });

    const auto D = model_.config().dims.fusion_dense_units;
    const auto K = model_.config().dims.n_classes;
    net::Mat<float> features(D, static_cast<Eigen::Index>(B));
    net::Mat<float> targets(K, static_cast<Eigen::Index>(B));
    std::vector<int> labels(B);
    StepResult r;
    for (std::size_t i = 0; i < B; ++i) {
      const auto col = static_cast<Eigen::Index>(i);
      features.col(col) = outs[i].features;
      targets.col(col) = smoothed_targets<float>(augmented[i].label, cfg_.effective_smoothing(), K);
      labels[i] = static_cast<int>(index_of(augmented[i].label));
      if (!outs[i].logits.allFinite()) r.finite = false;
      else if (net::argmax(outs[i].logits) == labels[i]) ++r.correct;
    }

    auto grads = model_.params().zeros_like();
    net::Mat<float> d_features(D, static_cast<Eigen::Index>(B));
    if (r.finite) {
      if (cfg_.loss == LossKind::isda) {
        isda_.update(features, labels);
        const auto lambda = static_cast<float>(isda_.lambda(epoch, cfg_.epochs));
        auto res = net::isda_loss(features, labels, targets, model_.params().fusion.classifier, isda_.var, lambda);
        r.loss = res.loss;
        d_features = res.d_features;
        grads.fusion.classifier = res.grad;
      } else {
        const float inv_b = 1.0f / static_cast<float>(B);
        for (std::size_t i = 0; i < B; ++i) {
          const auto col = static_cast<Eigen::Index>(i);
          r.loss += net::cross_entropy<float>(outs[i].logits, targets.col(col)) * inv_b;
          const net::Vec<float> dz = net::cross_entropy_grad<float>(outs[i].logits, targets.col(col)) * inv_b;
          d_features.col(col) = net::linear_backward(model_.params().fusion.classifier, outs[i].features, dz,
                                                     grads.fusion.classifier);
        }
      }
      if (!std::isfinite(r.loss)) r.finite = false;
    }
    if (!r.finite) {
      r.loss = std::numeric_limits<double>::quiet_NaN();
      return r;
    }

    std::vector<net::ModelParams<float>> per_sample(B);
    net::parallel_for(B, cfg_.workers, [&](std::size_t i) {
      per_sample[i] = model_.params().zeros_like();
      model_.backward_features(caches[i], d_features.col(static_cast<Eigen::Index>(i)), per_sample[i]);
    });
    auto total = grads.tensors();
    for (auto& ps : per_sample) {
      auto g = ps.tensors();
      for (std::size_t t = 0; t < total.size(); ++t) *total[t] += *g[t];
    }
    adam_step(model_.params(), grads, adam_, cfg_.adam);
    return r;
  }

  /// Batch loss in evaluation mode with no parameter update.
  double eval_loss(const std::vector<const Clip*>& batch) const {
    double loss = 0.0;
    for (const Clip* c : batch) {
      const auto out = model_.forward(model_.prepare(*c), false, nullptr);
      loss += net::cross_entropy<float>(out.logits, smoothed_targets<float>(c->label, cfg_.effective_smoothing(),
                                                                            cfg_.model.dims.n_classes));
    }
    return loss / static_cast<double>(batch.size());
  }

  double accuracy(const std::vector<Clip>& clips) const {
    if (clips.empty()) return 0.0;
    std::vector<int> hit(clips.size(), 0);
    net::parallel_for(clips.size(), cfg_.workers, [&](std::size_t i) {
      const auto out = model_.forward(model_.prepare(clips[i]), false, nullptr);
      hit[i] = net::argmax(out.logits) == static_cast<Eigen::Index>(index_of(clips[i].label));
    });
    return std::accumulate(hit.begin(), hit.end(), 0.0) / static_cast<double>(clips.size());
  }

  EpochRecord run_epoch(int epoch) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::size_t> order(clips_.size());
    std::iota(order.begin(), order.end(), 0);
    auto rng = make_rng(cfg_.seed, "order", epoch);
    detail::seeded_shuffle(order, rng);

    double loss_sum = 0.0;
    int batches = 0, correct = 0, seen = 0;
    for (std::size_t s = 0; s < order.size(); s += static_cast<std::size_t>(cfg_.batch_size)) {
      std::vector<const Clip*> batch;
      for (std::size_t i = s; i < std::min(order.size(), s + cfg_.batch_size); ++i) batch.push_back(&clips_[order[i]]);
      const auto r = step(batch, epoch);
      if (!r.finite) {
        if (++nonfinite_streak_ >= 3)
          throw Error("non-finite loss for 3 consecutive batches (epoch " + std::to_string(epoch) + ", step " +
                      std::to_string(adam_.step) + ")");
        continue;
      }
      nonfinite_streak_ = 0;
      loss_sum += r.loss;
      ++batches;
      correct += r.correct;
      seen += static_cast<int>(batch.size());
    }
    EpochRecord rec;
    rec.epoch = epoch + 1;
    rec.loss = batches ? loss_sum / batches : std::numeric_limits<double>::quiet_NaN();
    rec.train_accuracy = seen ? static_cast<double>(correct) / seen : 0.0;
    if (!val_clips_.empty()) rec.val_accuracy = accuracy(val_clips_);
    rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
  }

  TrainResult run(const EpochCallback& on_epoch = {}) {
    TrainResult out;
    double best_loss = std::numeric_limits<double>::infinity();
    out.best_model = model_;
    for (int e = 0; e < cfg_.epochs; ++e) {
      auto rec = run_epoch(e);
      if (on_epoch) on_epoch(rec);
      if (std::isfinite(rec.loss) && rec.loss < best_loss) {
        best_loss = rec.loss;
        out.best_model = model_;
        out.best_epoch = rec.epoch;
      }
      out.history.epochs.push_back(std::move(rec));
    }
    out.final_model = model_;
    out.meta.step = adam_.step;
    out.meta.epochs = cfg_.epochs;
    out.meta.batch_size = cfg_.batch_size;
    out.meta.learning_rate = cfg_.adam.learning_rate;
    out.meta.config_hash = cfg_.config_hash;
    return out;
  }

private:
  TrainConfig cfg_;
  std::vector<Clip> clips_;
  std::vector<Clip> val_clips_;
  augment::Augmentor augmentor_;
  Model model_;
  AdamState<float> adam_;
  net::IsdaState<float> isda_;
  int nonfinite_streak_ = 0;
};

/// Loads the manifest's clips (plus an optional validation carve-out) and
/// trains.
inline TrainResult train(const DatasetManifest& manifest, const TrainConfig& cfg,
                         const Trainer::EpochCallback& on_epoch = {}) {
  cfg.validate();
  if (manifest.empty()) throw Error("training manifest is empty");
  const auto branches = net::active_branches(cfg.model.scenario);
  DatasetManifest fit = manifest;
  DatasetManifest val{manifest.root, {}};
  if (cfg.val_fraction > 0.0) {
    auto split = holdout_split(manifest, 1.0 - cfg.val_fraction, cfg.seed);
    fit = std::move(split.train);
    val = std::move(split.test);
  }
  Trainer trainer(cfg, load_clips(fit, branches, cfg.workers), load_clips(val, branches, cfg.workers));
  return trainer.run(on_epoch);
}

}  // namespace drivenet::train
