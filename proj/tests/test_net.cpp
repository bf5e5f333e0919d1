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

#include <gtest/gtest.h>

#include <cmath>

#include "drivenet/net/checkpoint.hpp"
#include "drivenet/dataio/sampling.hpp"
#include "drivenet/net/isda.hpp"
#include "support.hpp"

using namespace drivenet;
using namespace drivenet::net;

namespace {

Mat<double> random_mat(Eigen::Index r, Eigen::Index c, Rng& rng, double scale = 1.0) {
  Mat<double> m(r, c);
  std::normal_distribution<double> n(0.0, scale);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({1e-6, std::abs(a), std::abs(b)}); }

/// Central-difference check of every entry of `param` against `analytic`.
template <typename Loss>
double max_grad_error(Mat<double>& param, const Mat<double>& analytic, Loss loss, double h = 1e-6) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < param.size(); ++i) {
    const double keep = param.data()[i];
    param.data()[i] = keep + h;
    const double up = loss();
    param.data()[i] = keep - h;
    const double down = loss();
    param.data()[i] = keep;
    worst = std::max(worst, rel_err((up - down) / (2 * h), analytic.data()[i]));
  }
  return worst;
}

ModelConfig small_config(Scenario s) {
  ModelConfig c;
  c.scenario = s;
  c.dims.appearance_lstm_units = 5;
  c.dims.attention_units = 4;
  c.dims.flow_lstm_units = 4;
  c.dims.flow_input_height = 8;
  c.dims.flow_input_width = 24;
  c.dims.appearance_input_size = 16;
  c.dims.fusion_dense_units = 6;
  c.backbone.channels = {2, 3};
  return c;
}

}  // namespace

TEST(Softmax, NormalizedShiftInvariantArgmaxPreserving) {
  auto rng = make_rng(1);
  for (int t = 0; t < 1000; ++t) {
    const Vec<double> z = random_mat(5, 1, rng, 5.0);
    const Vec<double> p = softmax(z);
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    EXPECT_EQ(argmax(p), argmax(z));
    const Vec<double> q = softmax<double>((z.array() + 123.4).matrix());
    EXPECT_LT((p - q).cwiseAbs().maxCoeff(), 1e-12);
  }
  Vec<double> bad(2);
  bad << 1.0, std::nan("");
  EXPECT_THROW(softmax(bad), Error);
}

TEST(Softmax, CrossEntropyGradient) {
  auto rng = make_rng(2);
  Vec<double> z = random_mat(5, 1, rng);
  Vec<double> q = Vec<double>::Constant(5, 0.02);
  q(2) = 0.92;
  const Vec<double> g = cross_entropy_grad(z, q);
  Mat<double> zm = z;
  EXPECT_LT(max_grad_error(zm, g, [&] { return cross_entropy<double>(zm, q); }), 1e-6);
}

TEST(Linear, Gradients) {
  auto rng = make_rng(3);
  LinearParams<double> p, g;
  p.init(4, 3, rng);
  g.weight = Mat<double>::Zero(3, 4);
  g.bias = Mat<double>::Zero(3, 1);
  Mat<double> x = random_mat(4, 1, rng);
  const Vec<double> w = random_mat(3, 1, rng);
  auto loss = [&] { return linear_forward<double>(p, x).dot(w); };
  const Vec<double> dx = linear_backward<double>(p, x, w, g);
  EXPECT_LT(max_grad_error(p.weight, g.weight, loss), 1e-6);
  EXPECT_LT(max_grad_error(p.bias, g.bias, loss), 1e-6);
  EXPECT_LT(max_grad_error(x, dx, loss), 1e-6);
}

TEST(Lstm, GradientsThroughTime) {
  auto rng = make_rng(4);
  LstmParams<double> p;
  p.init(3, 4, rng);
  auto g = p;
  g.wx.setZero();
  g.wh.setZero();
  g.bias.setZero();
  Mat<double> x = random_mat(3, 6, rng);
  const Mat<double> w = random_mat(4, 6, rng);
  auto loss = [&] {
    LstmCache<double> c;
    return lstm_forward(p, x, c).cwiseProduct(w).sum();
  };
  LstmCache<double> cache;
  lstm_forward(p, x, cache);
  const Mat<double> dx = lstm_backward(p, cache, w, g);
  EXPECT_LT(max_grad_error(p.wx, g.wx, loss), 1e-5);
  EXPECT_LT(max_grad_error(p.wh, g.wh, loss), 1e-5);
  EXPECT_LT(max_grad_error(p.bias, g.bias, loss), 1e-5);
  EXPECT_LT(max_grad_error(x, dx, loss), 1e-5);
}

TEST(Lstm, AcceptsEveryHorizonLength) {
  auto rng = make_rng(5);
  LstmParams<float> p;
  p.init(3, 4, rng);
  for (int n : {3, 6, 9, 12, 15}) {
    LstmCache<float> c;
    EXPECT_EQ(lstm_forward(p, Mat<float>::Random(3, n).eval(), c).cols(), n);
  }
}

TEST(Attention, WeightsPositiveAndNormalized) {
  auto rng = make_rng(6);
  AttentionParams<double> p;
  p.init(6, 5, rng);
  for (int t = 0; t < 1000; ++t) {
    const int n = 3 + t % 13;
    AttentionCache<double> c;
    attention_forward(p, random_mat(6, n, rng, 3.0), c);
    EXPECT_NEAR(c.alpha.sum(), 1.0, 1e-6);
    EXPECT_GT(c.alpha.minCoeff(), 0.0);
  }
}

TEST(Attention, Gradients) {
  auto rng = make_rng(7);
  AttentionParams<double> p;
  p.init(4, 3, rng);
  auto g = p;
  g.wq.setZero();
  g.wk.setZero();
  g.v.setZero();
  Mat<double> s = random_mat(4, 5, rng);
  const Vec<double> w = random_mat(4, 1, rng);
  auto loss = [&] {
    AttentionCache<double> c;
    return attention_forward(p, s, c).dot(w);
  };
  AttentionCache<double> cache;
  attention_forward(p, s, cache);
  const Mat<double> ds = attention_backward(p, cache, w, g);
  EXPECT_LT(max_grad_error(p.wq, g.wq, loss), 1e-5);
  EXPECT_LT(max_grad_error(p.wk, g.wk, loss), 1e-5);
  EXPECT_LT(max_grad_error(p.v, g.v, loss), 1e-5);
  EXPECT_LT(max_grad_error(s, ds, loss), 1e-5);
}

TEST(Conv, GradientsAndShapes) {
  auto rng = make_rng(8);
  ConvParams<double> p;
  p.init(2, 3, 2, rng);
  auto g = p;
  g.weight.setZero();
  g.bias.setZero();
  FeatureMap<double> in{random_mat(2, 7 * 7, rng), 7, 7};
  ConvCache<double> cache;
  const auto out = conv_forward(p, in, cache);
  EXPECT_EQ(out.height, 4);
  EXPECT_EQ(out.width, 4);
  const Mat<double> w = random_mat(3, 16, rng);
  auto loss = [&] {
    ConvCache<double> c;
    return conv_forward(p, in, c).data.cwiseProduct(w).sum();
  };
  const Mat<double> dx = conv_backward(p, cache, w, g, true);
  EXPECT_LT(max_grad_error(p.weight, g.weight, loss), 1e-5);
  EXPECT_LT(max_grad_error(p.bias, g.bias, loss), 1e-5);
  EXPECT_LT(max_grad_error(in.data, dx, loss), 1e-5);
}

TEST(Conv, BackboneProducesEightByEight) {
  EXPECT_EQ(backbone_strides(128, 4), (std::vector<int>{2, 2, 2, 2}));
  EXPECT_EQ(backbone_strides(64, 4), (std::vector<int>{2, 2, 2, 1}));
  auto rng = make_rng(9);
  TinyConvParams<float> p;
  p.init({16, 32, 64, 128}, 128, rng);
  TinyConvCache<float> c;
  const auto out = tiny_conv_forward(p, FeatureMap<float>{Mat<float>::Random(3, 128 * 128), 128, 128}, c);
  EXPECT_EQ(out.channels(), 128);
  EXPECT_EQ(out.height, 8);
  EXPECT_EQ(out.width, 8);
}

TEST(DropBlock, EvalIsExactIdentity) {
  auto rng = make_rng(10);
  FeatureMap<float> m{Mat<float>::Random(4, 256), 16, 16};
  const auto out = dropblock(m, DropBlockParams{}, false, rng);
  EXPECT_TRUE((out.data.array() == m.data.array()).all());
}

TEST(DropBlock, KeepFractionAndBlockShape) {
  auto rng = make_rng(11);
  const DropBlockParams p{5, 0.9};
  double kept = 0, total = 0;
  for (int t = 0; t < 2000; ++t) {
    const auto mask = sample_dropblock_mask<double>(1, 16, 16, p, rng);
    for (Eigen::Index i = 0; i < mask.scale.size(); ++i) kept += mask.scale.data()[i] > 0;
    total += 256;
  }
  EXPECT_NEAR(kept / total, 0.9, 0.05);
  EXPECT_THROW((DropBlockParams{4, 0.9}.validate(16, 16)), Error);
  EXPECT_THROW((DropBlockParams{5, 0.0}.validate(16, 16)), Error);
  EXPECT_THROW((DropBlockParams{5, 0.9}.validate(4, 16)), Error);
}

TEST(DropBlock, DroppedRegionsAreWholeBlocks) {
  auto rng = make_rng(12);
  const auto mask = sample_dropblock_mask<double>(1, 16, 16, DropBlockParams{5, 0.97}, rng);
  if (mask.identity()) GTEST_SKIP();
  // Every zero lies inside some all-zero 5x5 window.
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) {
      if (mask.scale(0, y * 16 + x) != 0) continue;
      bool covered = false;
      for (int sy = std::max(0, y - 4); sy <= std::min(y, 11) && !covered; ++sy)
        for (int sx = std::max(0, x - 4); sx <= std::min(x, 11) && !covered; ++sx) {
          bool all = true;
          for (int i = 0; i < 5 && all; ++i)
            for (int j = 0; j < 5 && all; ++j) all = mask.scale(0, (sy + i) * 16 + sx + j) == 0;
          covered = all;
        }
      EXPECT_TRUE(covered);
    }
}

TEST(Isda, LambdaZeroEqualsCrossEntropy) {
  auto rng = make_rng(13);
  for (int t = 0; t < 200; ++t) {
    const int D = 1 + t % 7, B = 1 + t % 4;
    LinearParams<double> cls;
    cls.init(D, 5, rng);
    const Mat<double> f = random_mat(D, B, rng);
    std::vector<int> y(B);
    Mat<double> q = Mat<double>::Zero(5, B);
    double ce = 0;
    for (int s = 0; s < B; ++s) {
      y[s] = static_cast<int>(rng() % 5);
      q(y[s], s) = 1;
      ce += cross_entropy<double>(linear_forward<double>(cls, f.col(s)), q.col(s)) / B;
    }
    const Mat<double> var = random_mat(D, 5, rng).cwiseAbs();
    EXPECT_NEAR(isda_loss(f, y, q, cls, var, 0.0).loss, ce, 1e-9);
  }
}

TEST(Isda, AugmentedLogitsMatchQuadraticForm) {
  auto rng = make_rng(14);
  const Mat<double> W = random_mat(5, 3, rng);
  const Vec<double> z = random_mat(5, 1, rng);
  const Vec<double> var = random_mat(3, 1, rng).cwiseAbs();
  const Vec<double> out = isda_augmented_logits(z, W, var, 2, 0.7);
  for (int j = 0; j < 5; ++j) {
    const Vec<double> d = (W.row(j) - W.row(2)).transpose();
    EXPECT_NEAR(out(j), z(j) + 0.35 * (d.transpose() * var.asDiagonal() * d)(0), 1e-12);
  }
  EXPECT_EQ(out(2), z(2));
}

TEST(Isda, GradientsMatchFiniteDifferences) {
  auto rng = make_rng(15);
  for (int t = 0; t < 20; ++t) {
    LinearParams<double> cls;
    cls.init(4, 5, rng);
    Mat<double> f = random_mat(4, 3, rng);
    const std::vector<int> y = {static_cast<int>(rng() % 5), static_cast<int>(rng() % 5), static_cast<int>(rng() % 5)};
    Mat<double> q = Mat<double>::Constant(5, 3, 0.02);
    for (int s = 0; s < 3; ++s) q(y[s], s) = 0.92;
    const Mat<double> var = random_mat(4, 5, rng).cwiseAbs();
    const auto r = isda_loss(f, y, q, cls, var, 0.5);
    auto loss = [&] { return isda_loss(f, y, q, cls, var, 0.5).loss; };
    EXPECT_LT(max_grad_error(f, r.d_features, loss), 1e-4);
    EXPECT_LT(max_grad_error(cls.weight, r.grad.weight, loss), 1e-4);
    EXPECT_LT(max_grad_error(cls.bias, r.grad.bias, loss), 1e-4);
  }
  const Mat<double> f0 = Mat<double>::Zero(2, 1), q0 = Mat<double>::Zero(5, 1), v0 = Mat<double>::Zero(2, 5);
  LinearParams<double> c0;
  c0.weight = Mat<double>::Zero(5, 2);
  c0.bias = Mat<double>::Zero(5, 1);
  EXPECT_THROW(isda_loss<double>(f0, {0}, q0, c0, v0, -1.0), Error);
}

TEST(Isda, RunningCovarianceMatchesPooledStatistics) {
  auto rng = make_rng(16);
  IsdaState<double> st(3, 5, 0.5);
  std::vector<Vec<double>> seen0;
  for (int b = 0; b < 6; ++b) {
    const Mat<double> f = random_mat(3, 4, rng);
    std::vector<int> y = {0, 0, 1, static_cast<int>(b % 2)};
    st.update(f, y);
    for (int s = 0; s < 4; ++s)
      if (y[s] == 0) seen0.push_back(f.col(s));
  }
  Vec<double> mean = Vec<double>::Zero(3);
  for (const auto& v : seen0) mean += v / static_cast<double>(seen0.size());
  Vec<double> var = Vec<double>::Zero(3);
  for (const auto& v : seen0) var += (v - mean).cwiseAbs2() / static_cast<double>(seen0.size());
  EXPECT_LT((st.mean.col(0) - mean).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((st.var.col(0) - var).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_DOUBLE_EQ(st.lambda(15, 30), 0.25);
  EXPECT_DOUBLE_EQ(st.lambda(0, 30), 0.0);
}

TEST(Preprocess, FlowPatchMeansAreBlockAverages) {
  Frame f(8, 24);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 24; ++x) f.at(y, x, 1) = static_cast<std::uint8_t>(x + 24 * y);
  const auto v = flow_patch_means(f, 8, 24);
  ASSERT_EQ(v.size(), 576);
  EXPECT_DOUBLE_EQ(v(192 + 5), 5.0);
  EXPECT_DOUBLE_EQ(v(0), 0.0);
  EXPECT_THROW(flow_patch_means(f, 16, 48), Error);

  Frame big(16, 48);
  for (int y = 0; y < 2; ++y)
    for (int x = 0; x < 2; ++x) big.at(y, x, 0) = 40;
  EXPECT_DOUBLE_EQ(flow_patch_means(big, 16, 48)(0), 40.0);
}

TEST(Model, ForwardShapesForEveryScenarioAndHorizon) {
  auto rng = make_rng(17);
  const Clip clip = fixtures::random_clip("m", ManeuverLabel::left_turn, 20, rng);
  for (auto s : {Scenario::inside_only, Scenario::outside_only, Scenario::both}) {
    Model<float> m(small_config(s), rng);
    EXPECT_EQ(m.params().appearance.size() + m.params().flow.size(), active_branches(s).size());
    for (int t : default_horizons()) {
      const auto out = m.forward(m.prepare(truncate_to_horizon(clip, HorizonSpec(t))), false, nullptr);
      EXPECT_EQ(out.logits.size(), 5);
    }
    const auto a = m.forward(m.prepare(clip), false, nullptr);
    const auto b = m.forward(m.prepare(clip), false, nullptr);
    EXPECT_TRUE((a.logits.array() == b.logits.array()).all());
  }
  EXPECT_EQ(active_branches(Scenario::inside_only),
            (std::vector<BranchKind>{BranchKind::inside_appearance, BranchKind::inside_flow}));
  EXPECT_EQ(active_branches(Scenario::outside_only),
            (std::vector<BranchKind>{BranchKind::outside_appearance, BranchKind::outside_flow}));
}

TEST(Model, EndToEndGradientsInTrainingMode) {
  auto rng = make_rng(18);
  const Clip clip = fixtures::random_clip("g", ManeuverLabel::right_turn, 16, rng, 4);
  Model<double> m(small_config(Scenario::both), rng);
  const auto in = m.prepare(clip);
  Vec<double> q = Vec<double>::Zero(5);
  q(4) = 1;
  auto loss = [&] {
    auto r = make_rng(99, "masks");
    return cross_entropy<double>(m.forward(in, true, &r).logits, q);
  };
  ForwardCache<double> cache;
  auto r = make_rng(99, "masks");
  const auto out = m.forward(in, true, &r, &cache);
  auto grads = m.params().zeros_like();
  m.backward_logits(cache, cross_entropy_grad<double>(out.logits, q), grads);
  auto params = m.params().tensors();
  auto g = grads.tensors();
  std::vector<std::string> names;
  m.params().visit([&](const std::string& n, const Mat<double>&) { names.push_back(n); });
  for (std::size_t i = 0; i < params.size(); ++i) {
    // A strided sample of entries keeps the check fast on the larger tensors.
    Mat<double>& p = *params[i];
    double worst = 0;
    for (Eigen::Index k = 0; k < p.size(); k += 1 + p.size() / 12) {
      const double keep = p.data()[k];
      p.data()[k] = keep + 1e-6;
      const double up = loss();
      p.data()[k] = keep - 1e-6;
      const double down = loss();
      p.data()[k] = keep;
      const double num = (up - down) / 2e-6;
      // Mixed tolerance: central differences carry ~1e-9 absolute noise here.
      const double a = g[i]->data()[k];
      worst = std::max(worst, std::abs(num - a) / (1e-4 * std::max(std::abs(num), std::abs(a)) + 1e-8));
    }
    EXPECT_LT(worst, 1.0) << names[i];
  }
}

TEST(Model, ExternalExtractorInterface) {
  auto rng = make_rng(19);
  auto cfg = small_config(Scenario::inside_only);
  cfg.backbone.kind = BackboneKind::densenet121_interface;
  cfg.backbone.external_channels = 7;
  EXPECT_THROW(Model<float>(cfg, rng), Error);
  ExternalExtractor<float> ext = [](const FeatureMap<float>& f) {
    FeatureMap<float> out{Mat<float>::Constant(7, 4, f.data.mean()), 2, 2};
    return out;
  };
  Model<float> m(cfg, rng, ext);
  const Clip clip = fixtures::random_clip("x", ManeuverLabel::go_straight, 16, rng);
  EXPECT_EQ(m.forward(m.prepare(clip), false, nullptr).logits.size(), 5);
  EXPECT_TRUE(m.params().appearance.at(BranchKind::inside_appearance).backbone.stages.empty());
}

TEST(Checkpoint, RoundTripAndMismatch) {
  auto rng = make_rng(20);
  const auto cfg = small_config(Scenario::both);
  Model<float> m(cfg, rng);
  NormStats st;
  for (auto b : kAllBranches) {
    st.mean[b] = {0.1, 0.2, 0.3};
    st.stddev[b] = {1.5, 1.25, 1.0};
  }
  m.set_norm_stats(st);
  const auto dir = fixtures::temp_dir("ckpt");
  save_checkpoint(dir / "m.ckpt", m, {42, 320, 5, 3e-4, "abc"});
  const auto back = load_checkpoint(dir / "m.ckpt", &cfg);
  EXPECT_EQ(back.meta.step, 42);
  EXPECT_EQ(back.meta.epochs, 320);
  EXPECT_EQ(back.meta.batch_size, 5);
  EXPECT_DOUBLE_EQ(back.meta.learning_rate, 3e-4);
  const Clip clip = fixtures::random_clip("p", ManeuverLabel::left_turn, 16, rng);
  const auto a = m.forward(m.prepare(clip), false, nullptr).logits;
  const auto b = back.model.forward(back.model.prepare(clip), false, nullptr).logits;
  EXPECT_TRUE((a.array() == b.array()).all());

  auto other = cfg;
  other.scenario = Scenario::inside_only;
  EXPECT_THROW(load_checkpoint(dir / "m.ckpt", &other), Error);
  other = cfg;
  other.dims.flow_lstm_units = 9;
  EXPECT_THROW(load_checkpoint(dir / "m.ckpt", &other), Error);
  std::ofstream(dir / "junk.ckpt") << "not a checkpoint";
  EXPECT_THROW(load_checkpoint(dir / "junk.ckpt"), Error);
}
