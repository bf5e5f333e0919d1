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

#include <random>
#include <vector>

#include "drivenet/augment/pixel_ops.hpp"

namespace drivenet::augment {

enum class PixelOpKind { autocontrast, equalize, posterize, solarize };

struct PixelOp {
  PixelOpKind kind = PixelOpKind::autocontrast;
  int level = 0;  // bits for posterize, threshold for solarize

  Frame operator()(const Frame& f) const {
    switch (kind) {
      case PixelOpKind::autocontrast: return autocontrast(f);
      case PixelOpKind::equalize: return equalize(f);
      case PixelOpKind::posterize: return posterize(f, level);
      case PixelOpKind::solarize: return solarize(f, level);
    }
    return f;
  }
};

struct AugmixParams {
  int width = 3;
  int max_depth = 3;
  double alpha = 1.0;

  void validate() const {
    if (width < 1) throw Error("augmix width must be >= 1");
    if (max_depth < 1) throw Error("augmix depth must be >= 1");
    if (!(alpha > 0.0)) throw Error("augmix alpha must be > 0");
  }
};

/// The random draws of one AugMix application, separated from applying them.
struct AugmixPlan {
  std::vector<std::vector<PixelOp>> chains;
  std::vector<double> weights;  // Dirichlet(alpha), one per chain
  double mix = 1.0;             // Beta(alpha, alpha) weight of the original
};

inline PixelOp sample_pixel_op(Rng& rng) {
  PixelOp op;
  op.kind = static_cast<PixelOpKind>(uniform_int(rng, 0, 3));
  if (op.kind == PixelOpKind::posterize) op.level = uniform_int(rng, 4, 8);
  if (op.kind == PixelOpKind::solarize) op.level = uniform_int(rng, 128, 256);
  return op;
}

inline AugmixPlan sample_augmix_plan(const AugmixParams& p, Rng& rng) {
  p.validate();
  AugmixPlan plan;
  std::gamma_distribution<double> gamma(p.alpha, 1.0);
  double total = 0.0;
  for (int i = 0; i < p.width; ++i) {
    plan.weights.push_back(gamma(rng));
    total += plan.weights.back();
  }
  for (auto& w : plan.weights) w = total > 0.0 ? w / total : 1.0 / p.width;
  const double a = gamma(rng);
  const double b = gamma(rng);
  plan.mix = (a + b) > 0.0 ? a / (a + b) : 0.5;
  for (int i = 0; i < p.width; ++i) {
    const int depth = uniform_int(rng, 1, p.max_depth);
    std::vector<PixelOp> chain;
    for (int d = 0; d < depth; ++d) chain.push_back(sample_pixel_op(rng));
    plan.chains.push_back(std::move(chain));
  }
  return plan;
}

/// out = mix * frame + (1 - mix) * sum_i weights[i] * chain_i(frame)
inline Frame apply_augmix(const Frame& in, const AugmixPlan& plan) {
  if (plan.chains.size() != plan.weights.size()) throw Error("augmix plan is inconsistent");
  std::vector<double> mixed(in.pixels.size(), 0.0);
  for (std::size_t i = 0; i < plan.chains.size(); ++i) {
    Frame f = in;
    for (const auto& op : plan.chains[i]) f = op(f);
    for (std::size_t k = 0; k < mixed.size(); ++k) mixed[k] += plan.weights[i] * f.pixels[k];
  }
  Frame out = in;
  for (std::size_t k = 0; k < mixed.size(); ++k)
    out.pixels[k] = clamp_u8(plan.mix * in.pixels[k] + (1.0 - plan.mix) * mixed[k]);
  return out;
}

inline Frame augmix(const Frame& in, const AugmixParams& p, Rng& rng) {
  return apply_augmix(in, sample_augmix_plan(p, rng));
}

}  // namespace drivenet::augment
