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

#include <algorithm>
#include <array>
#include <functional>

#include "drivenet/augment/otc.hpp"
#include "drivenet/eval/metrics.hpp"
#include "drivenet/net/model.hpp"

namespace drivenet::eval {

using Model = net::Model<float>;

/// Class probabilities of one clip in evaluation mode.
inline net::Vec<double> predict_proba(const Model& model, const Clip& clip) {
  const auto out = model.forward(model.prepare(clip), false, nullptr);
  return net::softmax<double>(out.logits.cast<double>());
}

inline ManeuverLabel predict(const Model& model, const Clip& clip) {
  return label_from_index(static_cast<std::size_t>(net::argmax(predict_proba(model, clip))));
}

/// Majority vote over three predictions. Without a majority the label with
/// the largest summed probability wins, lowest index first on exact ties.
inline ManeuverLabel otc_vote(const std::array<ManeuverLabel, 3>& votes,
                              const std::array<net::Vec<double>, 3>& probs) {
  std::array<int, kNumClasses> count{};
  for (auto v : votes) ++count[index_of(v)];
  for (std::size_t c = 0; c < kNumClasses; ++c)
    if (count[c] >= 2) return label_from_index(c);
  net::Vec<double> sum = net::Vec<double>::Zero(static_cast<Eigen::Index>(kNumClasses));
  for (const auto& p : probs) sum += p;
  std::size_t best = kNumClasses;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    if (count[c] == 0) continue;
    if (best == kNumClasses || sum(static_cast<Eigen::Index>(c)) > sum(static_cast<Eigen::Index>(best))) best = c;
  }
  return label_from_index(best);
}

inline ManeuverLabel otc_predict(const Model& model, const Clip& clip, Rng& rng,
                                 const augment::CutoutParams& cut = {}) {
  const auto variants = augment::otc_variants(clip, rng, cut);
  std::array<ManeuverLabel, 3> votes{};
  std::array<net::Vec<double>, 3> probs;
  for (std::size_t i = 0; i < 3; ++i) {
    probs[i] = predict_proba(model, variants[i]);
    votes[i] = label_from_index(static_cast<std::size_t>(net::argmax(probs[i])));
  }
  return otc_vote(votes, probs);
}

struct EvalOptions {
  std::vector<int> horizons = default_horizons();
  bool otc = false;
  augment::CutoutParams otc_cutout;
  std::uint64_t seed = 7;
  int workers = 1;
};

struct HorizonResult {
  MetricsRow metrics;
  ConfusionMatrix confusion;
};

/// Per-horizon metrics, rows ordered from T = 0 toward earlier horizons.
inline std::vector<HorizonResult> horizon_eval(const Model& model, const std::vector<Clip>& clips,
                                               const EvalOptions& opt) {
  if (clips.empty()) throw Error("evaluation set is empty");
  if (opt.horizons.empty()) throw Error("no horizons requested");
  for (const auto& c : clips)
    for (auto b : net::active_branches(model.config().scenario))
      if (!c.has(b)) throw Error("clip " + c.id + " has no files for branch " + std::string(to_string(b)));
  std::vector<int> hs = opt.horizons;
  std::sort(hs.begin(), hs.end(), std::greater<>());
  hs.erase(std::unique(hs.begin(), hs.end()), hs.end());

  std::vector<HorizonResult> out;
  for (int t : hs) {
    const HorizonSpec spec(t);
    std::vector<ManeuverLabel> preds(clips.size()), truths(clips.size());
    net::parallel_for(clips.size(), opt.workers, [&](std::size_t i) {
      const Clip view = truncate_to_horizon(clips[i], spec);
      truths[i] = clips[i].label;
      if (opt.otc) {
        auto rng = make_rng(opt.seed, "otc", clips[i].id, t);
        preds[i] = otc_predict(model, view, rng, opt.otc_cutout);
      } else {
        preds[i] = predict(model, view);
      }
    });
    HorizonResult r;
    r.confusion = confusion(preds, truths);
    r.metrics = metrics_from_confusion(r.confusion, t);
    out.push_back(r);
  }
  return out;
}

}  // namespace drivenet::eval
