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

#include <map>
#include <optional>

#include "drivenet/net/attention.hpp"
#include "drivenet/net/conv.hpp"
#include "drivenet/net/dropblock.hpp"
#include "drivenet/net/linear.hpp"
#include "drivenet/net/lstm.hpp"
#include "drivenet/net/model_config.hpp"
#include "drivenet/net/preprocess.hpp"
#include "drivenet/net/softmax.hpp"

namespace drivenet::net {

template <typename T>
struct AppearanceBranchParams {
  TinyConvParams<T> backbone;  // empty when an external extractor is injected
  LstmParams<T> lstm;
  AttentionParams<T> attention;

  void visit(const std::string& prefix, const TensorVisitor<T>& f) {
    backbone.visit(prefix + ".backbone", f);
    lstm.visit(prefix + ".lstm", f);
    attention.visit(prefix + ".attention", f);
  }
};

template <typename T>
struct FlowBranchParams {
  LstmParams<T> lstm1;
  LstmParams<T> lstm2;

  void visit(const std::string& prefix, const TensorVisitor<T>& f) {
    lstm1.visit(prefix + ".lstm1", f);
    lstm2.visit(prefix + ".lstm2", f);
  }
};

template <typename T>
struct FusionParams {
  LinearParams<T> dense;
  LinearParams<T> classifier;

  void visit(const std::string& prefix, const TensorVisitor<T>& f) {
    dense.visit(prefix + ".dense", f);
    classifier.visit(prefix + ".classifier", f);
  }
};

template <typename T>
struct ModelParams {
  std::map<BranchKind, AppearanceBranchParams<T>> appearance;
  std::map<BranchKind, FlowBranchParams<T>> flow;
  FusionParams<T> fusion;

  /// Visits every tensor in a fixed order under a stable dotted name.
  void visit(const TensorVisitor<T>& f) {
    for (auto& [b, p] : appearance) p.visit(std::string(to_string(b)), f);
    for (auto& [b, p] : flow) p.visit(std::string(to_string(b)), f);
    fusion.visit("fusion", f);
  }
  void visit(const std::function<void(const std::string&, const Mat<T>&)>& f) const {
    const_cast<ModelParams*>(this)->visit(TensorVisitor<T>([&](const std::string& n, Mat<T>& m) { f(n, m); }));
  }

  std::vector<Mat<T>*> tensors() {
    std::vector<Mat<T>*> out;
    visit(TensorVisitor<T>([&](const std::string&, Mat<T>& m) { out.push_back(&m); }));
    return out;
  }

  ModelParams zeros_like() const {
    ModelParams z = *this;
    z.visit(TensorVisitor<T>([](const std::string&, Mat<T>& m) { m.setZero(); }));
    return z;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    visit([&](const std::string&, const Mat<T>& m) { n += static_cast<std::size_t>(m.size()); });
    return n;
  }
};

template <typename T>
struct AppearanceCache {
  std::vector<TinyConvCache<T>> backbone;
  std::vector<DropBlockMask<T>> masks;
  std::vector<int> map_hw;  // spatial size of each frame's map
  LstmCache<T> lstm;
  AttentionCache<T> attention;
  Vec<T> alpha() const { return attention.alpha; }
};

template <typename T>
struct FlowCache {
  LstmCache<T> lstm1;
  LstmCache<T> lstm2;
};

template <typename T>
struct ForwardCache {
  std::map<BranchKind, AppearanceCache<T>> appearance;
  std::map<BranchKind, FlowCache<T>> flow;
  Vec<T> fused;        // concatenated branch features
  Vec<T> dense_pre;    // dense layer before the rectifier
  Vec<T> dropout;      // multiplicative dropout mask (already rescaled)
  Vec<T> features;     // classifier input
};

template <typename T>
struct ForwardResult {
  Vec<T> logits;
  Vec<T> features;
};

/// Four-branch maneuver classifier: per-view appearance encoders
/// (backbone, DropBlock, spatial average, LSTM, attention), per-view flow
/// encoders (two stacked LSTMs over patch-mean flow vectors) and a fusion
/// head (dense, rectifier, dropout, linear classifier).
template <typename T>
class Model {
public:
  Model() = default;

  Model(const ModelConfig& cfg, Rng& rng, ExternalExtractor<T> extractor = {}) : cfg_(cfg) {
    cfg_.dims.validate();
    if (cfg_.backbone.kind == BackboneKind::densenet121_interface && !extractor)
      throw Error("densenet121_interface backbone requires an injected extractor");
    extractor_ = std::move(extractor);
    const int map_size = backbone_map_size();
    if (cfg_.backbone.kind == BackboneKind::tiny_conv) cfg_.dropblock.validate(map_size, map_size);
    for (auto b : active_branches(cfg_.scenario)) {
      if (is_flow(b)) {
        auto& fp = params_.flow[b];
        fp.lstm1.init(BranchDims::flow_feature_dim(), cfg_.dims.flow_lstm_units, rng);
        fp.lstm2.init(cfg_.dims.flow_lstm_units, cfg_.dims.flow_lstm_units, rng);
      } else {
        auto& ap = params_.appearance[b];
        if (cfg_.backbone.kind == BackboneKind::tiny_conv)
          ap.backbone.init(cfg_.backbone.channels, cfg_.dims.appearance_input_size, rng);
        ap.lstm.init(cfg_.backbone.output_channels(), cfg_.dims.appearance_lstm_units, rng);
        ap.attention.init(cfg_.dims.appearance_lstm_units, cfg_.dims.attention_units, rng);
      }
    }
    params_.fusion.dense.init(cfg_.fusion_input_dim(), cfg_.dims.fusion_dense_units, rng);
    params_.fusion.classifier.init(cfg_.dims.fusion_dense_units, cfg_.dims.n_classes, rng);
  }

  const ModelConfig& config() const { return cfg_; }
  ModelParams<T>& params() { return params_; }
  const ModelParams<T>& params() const { return params_; }
  const NormStats& norm_stats() const { return stats_; }
  void set_norm_stats(NormStats s) { stats_ = std::move(s); }
  void set_extractor(ExternalExtractor<T> e) { extractor_ = std::move(e); }

  /// Spatial size of the tiny backbone's output map.
  int backbone_map_size() const {
    int s = cfg_.dims.appearance_input_size;
    for (int stride : backbone_strides(s, cfg_.backbone.channels.size())) s = conv_out_size(s, stride);
    return s;
  }

  ClipInput<T> prepare(const Clip& clip) const { return prepare_input<T>(clip, cfg_, stats_); }

  /// `rng` is only consulted in training mode (DropBlock and dropout).
  ForwardResult<T> forward(const ClipInput<T>& in, bool training, Rng* rng, ForwardCache<T>* cache = nullptr) const {
    if (training && rng == nullptr) throw Error("training forward requires an rng");
    ForwardCache<T> local;
    ForwardCache<T>& c = cache ? *cache : local;
    std::vector<Vec<T>> parts;
    for (auto b : active_branches(cfg_.scenario)) {
      if (is_flow(b)) {
        auto it = in.flow.find(b);
        if (it == in.flow.end()) throw Error("input is missing branch " + std::string(to_string(b)));
        parts.push_back(flow_branch_forward(params_.flow.at(b), it->second, c.flow[b]));
      } else {
        auto it = in.appearance.find(b);
        if (it == in.appearance.end()) throw Error("input is missing branch " + std::string(to_string(b)));
        parts.push_back(appearance_branch_forward(params_.appearance.at(b), it->second, training, rng,
                                                  c.appearance[b]));
      }
    }
    Eigen::Index total = 0;
    for (const auto& p : parts) total += p.size();
    if (total != cfg_.fusion_input_dim()) throw Error("fusion input dimension does not match scenario");
    c.fused.resize(total);
    Eigen::Index off = 0;
    for (const auto& p : parts) {
      c.fused.segment(off, p.size()) = p;
      off += p.size();
    }
    return fusion_forward(c.fused, training, rng, c);
  }

  /// Fusion head on an already concatenated feature vector.
  ForwardResult<T> fusion_forward(const Vec<T>& fused, bool training, Rng* rng, ForwardCache<T>& c) const {
    if (fused.size() != params_.fusion.dense.in_dim()) throw Error("fusion input dimension does not match scenario");
    c.fused = fused;
    c.dense_pre = linear_forward(params_.fusion.dense, fused);
    const Vec<T> act = c.dense_pre.cwiseMax(T(0));
    c.dropout = Vec<T>::Ones(act.size());
    if (training && cfg_.dims.fusion_dropout > 0.0) {
      const T keep_scale = T(1) / static_cast<T>(1.0 - cfg_.dims.fusion_dropout);
      for (Eigen::Index i = 0; i < act.size(); ++i)
        c.dropout(i) = uniform01(*rng) < cfg_.dims.fusion_dropout ? T(0) : keep_scale;
    }
    c.features = act.cwiseProduct(c.dropout);
    return {linear_forward(params_.fusion.classifier, c.features), c.features};
  }

  /// Backpropagates dL/d(features) (the classifier input) into `grad`.
  /// Classifier gradients are the caller's responsibility.
  void backward_features(const ForwardCache<T>& c, const Vec<T>& d_features, ModelParams<T>& grad) const {
    const Vec<T> d_act = d_features.cwiseProduct(c.dropout);
    const Vec<T> d_pre = (c.dense_pre.array() > T(0)).select(d_act, T(0));
    const Vec<T> d_fused = linear_backward(params_.fusion.dense, c.fused, d_pre, grad.fusion.dense);
    Eigen::Index off = 0;
    for (auto b : active_branches(cfg_.scenario)) {
      if (is_flow(b)) {
        const auto n = cfg_.dims.flow_lstm_units;
        flow_branch_backward(params_.flow.at(b), c.flow.at(b), d_fused.segment(off, n), grad.flow.at(b));
        off += n;
      } else {
        const auto n = cfg_.dims.appearance_lstm_units;
        appearance_branch_backward(params_.appearance.at(b), c.appearance.at(b), d_fused.segment(off, n),
                                   grad.appearance.at(b));
        off += n;
      }
    }
  }

  /// Full backward pass from dL/d(logits).
  void backward_logits(const ForwardCache<T>& c, const Vec<T>& d_logits, ModelParams<T>& grad) const {
    const Vec<T> d_feat = linear_backward(params_.fusion.classifier, c.features, d_logits, grad.fusion.classifier);
    backward_features(c, d_feat, grad);
  }

  Vec<T> flow_branch_forward(const FlowBranchParams<T>& p, const Mat<T>& x, FlowCache<T>& c) const {
    if (x.rows() != BranchDims::flow_feature_dim()) throw Error("flow branch: wrong input shape");
    const Mat<T> h1 = lstm_forward(p.lstm1, x, c.lstm1);
    const Mat<T>& h2 = lstm_forward(p.lstm2, h1, c.lstm2);
    return h2.col(h2.cols() - 1);
  }

  Vec<T> appearance_branch_forward(const AppearanceBranchParams<T>& p, const std::vector<FeatureMap<T>>& frames,
                                   bool training, Rng* rng, AppearanceCache<T>& c) const {
    if (frames.empty()) throw Error("appearance branch: empty sequence");
    const auto n = static_cast<Eigen::Index>(frames.size());
    const auto C = cfg_.backbone.output_channels();
    Mat<T> pooled(C, n);
    c.backbone.assign(frames.size(), {});
    c.masks.assign(frames.size(), {});
    c.map_hw.assign(frames.size(), 0);
    for (Eigen::Index t = 0; t < n; ++t) {
      const auto& f = frames[static_cast<std::size_t>(t)];
      if (f.channels() != 3 || f.height != cfg_.dims.appearance_input_size ||
          f.width != cfg_.dims.appearance_input_size)
        throw Error("appearance branch: frame shape mismatch");
      FeatureMap<T> map = extractor_ ? extractor_(f) : tiny_conv_forward(p.backbone, f, c.backbone[t]);
      if (map.channels() != C) throw Error("appearance branch: backbone channel mismatch");
      if (training && cfg_.backbone.kind == BackboneKind::tiny_conv) {
        c.masks[t] = sample_dropblock_mask<T>(C, map.height, map.width, cfg_.dropblock, *rng);
        map = apply_dropblock(map, c.masks[t]);
      }
      c.map_hw[t] = map.height * map.width;
      pooled.col(t) = map.data.rowwise().mean();
    }
    const Mat<T>& hs = lstm_forward(p.lstm, pooled, c.lstm);
    return attention_forward(p.attention, hs, c.attention);
  }

private:
  void flow_branch_backward(const FlowBranchParams<T>& p, const FlowCache<T>& c, const Vec<T>& d_out,
                            FlowBranchParams<T>& g) const {
    const auto n = c.lstm2.hidden.cols();
    Mat<T> dh2 = Mat<T>::Zero(c.lstm2.hidden.rows(), n);
    dh2.col(n - 1) = d_out;
    const Mat<T> dh1 = lstm_backward(p.lstm2, c.lstm2, dh2, g.lstm2);
    lstm_backward(p.lstm1, c.lstm1, dh1, g.lstm1);
  }

  void appearance_branch_backward(const AppearanceBranchParams<T>& p, const AppearanceCache<T>& c,
                                  const Vec<T>& d_ctx, AppearanceBranchParams<T>& g) const {
    const Mat<T> d_hs = attention_backward(p.attention, c.attention, d_ctx, g.attention);
    const Mat<T> d_pooled = lstm_backward(p.lstm, c.lstm, d_hs, g.lstm);
    if (extractor_) return;  // frozen external backbone
    for (std::size_t t = 0; t < c.backbone.size(); ++t) {
      const auto hw = c.map_hw[t];
      Mat<T> d_map = (d_pooled.col(static_cast<Eigen::Index>(t)) / static_cast<T>(hw)).replicate(1, hw);
      if (!c.masks[t].identity()) d_map = d_map.cwiseProduct(c.masks[t].scale);
      tiny_conv_backward(p.backbone, c.backbone[t], std::move(d_map), g.backbone);
    }
  }

  ModelConfig cfg_;
  ModelParams<T> params_;
  NormStats stats_;
  ExternalExtractor<T> extractor_;
};

}  // namespace drivenet::net
