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

#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "drivenet/augment/augmix.hpp"
#include "drivenet/augment/geometric.hpp"

namespace drivenet::augment {

enum class AugOp { fliplr, translate, cutout, augmix, label_smoothing };

inline constexpr std::string_view to_string(AugOp op) {
  switch (op) {
    case AugOp::fliplr: return "fliplr";
    case AugOp::translate: return "translate";
    case AugOp::cutout: return "cutout";
    case AugOp::augmix: return "augmix";
    case AugOp::label_smoothing: return "label_smoothing";
  }
  return "?";
}

inline AugOp parse_aug_op(std::string_view s) {
  for (auto op : {AugOp::fliplr, AugOp::translate, AugOp::cutout, AugOp::augmix, AugOp::label_smoothing})
    if (to_string(op) == s) return op;
  throw ConfigError("unknown augmentation: " + std::string(s));
}

struct AugPipelineConfig {
  std::set<AugOp> enabled;
  double flip_prob = 0.5;
  int translate_max = kMaxShift;
  CutoutParams cutout;
  AugmixParams augmix;
  /// Target smoothing used when the label_smoothing op is enabled.
  double smoothing = 0.1;

  bool has(AugOp op) const { return enabled.count(op) != 0; }
};

/// Ablation ladder: A = none, B = A + fliplr, C = B + cutout,
/// D = C + augmix, E = D + translate + label smoothing.
inline std::set<AugOp> preset_ops(char letter) {
  switch (letter) {
    case 'A': return {};
    case 'B': return {AugOp::fliplr};
    case 'C': return {AugOp::fliplr, AugOp::cutout};
    case 'D': return {AugOp::fliplr, AugOp::cutout, AugOp::augmix};
    case 'E': return {AugOp::fliplr, AugOp::cutout, AugOp::augmix, AugOp::translate, AugOp::label_smoothing};
    default: throw ConfigError(std::string("unknown augmentation preset: ") + letter);
  }
}

inline char preset_letter(const std::set<AugOp>& ops) {
  for (char c : {'A', 'B', 'C', 'D', 'E'})
    if (preset_ops(c) == ops) return c;
  return '?';
}

inline std::string format_ops(const std::set<AugOp>& ops) {
  std::string out;
  for (auto op : ops) {
    if (!out.empty()) out += ',';
    out += to_string(op);
  }
  return out;
}

inline std::set<AugOp> parse_ops(const std::string& s) {
  std::set<AugOp> ops;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) ops.insert(parse_aug_op(item));
  return ops;
}

/// Applies the configured ops in the order translate, fliplr, cutout, augmix.
/// Flow branches only ever receive translate and fliplr. All randomness
/// comes from the rng passed per call.
class Augmentor {
public:
  explicit Augmentor(AugPipelineConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.translate_max < 0 || cfg_.translate_max > kMaxShift) throw ConfigError("translate_max must be in [0, 4]");
    if (cfg_.flip_prob < 0.0 || cfg_.flip_prob > 1.0) throw ConfigError("flip_prob must be in [0, 1]");
    cfg_.augmix.validate();
  }

  const AugPipelineConfig& config() const { return cfg_; }

  Clip operator()(const Clip& in, Rng& rng) const {
    Clip out = in;
    if (cfg_.has(AugOp::translate)) {
      const TranslateParams t{uniform_int(rng, -cfg_.translate_max, cfg_.translate_max),
                              uniform_int(rng, -cfg_.translate_max, cfg_.translate_max)};
      for (auto& [kind, seq] : out.branches) seq = translate(seq, t);
    }
    if (cfg_.has(AugOp::fliplr) && uniform01(rng) < cfg_.flip_prob) {
      for (auto& [kind, seq] : out.branches) seq = flip_lr(seq, out.label).first;
      out.label = mirror(out.label);
    }
    if (cfg_.has(AugOp::cutout)) {
      for (auto& [kind, seq] : out.branches)
        if (!is_flow(kind)) seq = cutout(seq, cfg_.cutout, rng);
    }
    if (cfg_.has(AugOp::augmix)) {
      for (auto& [kind, seq] : out.branches)
        if (!is_flow(kind))
          for (auto& f : seq) f = augmix(f, cfg_.augmix, rng);
    }
    return out;
  }

private:
  AugPipelineConfig cfg_;
};

inline Augmentor build_pipeline(const AugPipelineConfig& cfg) { return Augmentor(cfg); }

}  // namespace drivenet::augment
