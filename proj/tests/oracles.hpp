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

#include <array>
#include <vector>

#include "drivenet/eval/inference.hpp"

namespace drivenet::fixtures {

/// Metrics recomputed from raw (prediction, truth) pairs without building
/// a confusion matrix first.
struct PairOracle {
  std::array<long, kNumClasses> tp{}, fp{}, fn{}, tn{};
  double accuracy = 0, precision = 0, recall = 0, f1 = 0;
};

inline PairOracle pair_oracle(const std::vector<ManeuverLabel>& preds, const std::vector<ManeuverLabel>& truths) {
  PairOracle o;
  long correct = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto label = label_from_index(c);
    for (std::size_t i = 0; i < preds.size(); ++i) {
      const bool p = preds[i] == label, t = truths[i] == label;
      o.tp[c] += p && t;
      o.fp[c] += p && !t;
      o.fn[c] += !p && t;
      o.tn[c] += !p && !t;
    }
  }
  for (std::size_t i = 0; i < preds.size(); ++i) correct += preds[i] == truths[i];
  double ps = 0, rs = 0, fs = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const double p = o.tp[c] + o.fp[c] == 0 ? 0.0 : static_cast<double>(o.tp[c]) / static_cast<double>(o.tp[c] + o.fp[c]);
    const double r = o.tp[c] + o.fn[c] == 0 ? 0.0 : static_cast<double>(o.tp[c]) / static_cast<double>(o.tp[c] + o.fn[c]);
    const double f = p + r == 0 ? 0.0 : 2.0 * p * r / (p + r);
    ps += p;
    rs += r;
    fs += f;
  }
  o.precision = ps / kNumClasses;
  o.recall = rs / kNumClasses;
  o.f1 = fs / kNumClasses;
  o.accuracy = static_cast<double>(correct) / static_cast<double>(preds.size());
  return o;
}

/// Majority vote with the summed-probability tie-break, written as a
/// direct search over the three votes.
inline ManeuverLabel otc_oracle(const std::array<ManeuverLabel, 3>& v, const std::array<net::Vec<double>, 3>& probs) {
  if (v[0] == v[1] || v[0] == v[2]) return v[0];
  if (v[1] == v[2]) return v[1];
  auto total = [&](ManeuverLabel l) {
    double s = 0;
    for (const auto& p : probs) s += p(static_cast<Eigen::Index>(index_of(l)));
    return s;
  };
  ManeuverLabel best = v[0];
  for (auto l : v) {
    const double a = total(l), b = total(best);
    if (a > b || (a == b && index_of(l) < index_of(best))) best = l;
  }
  return best;
}

}  // namespace drivenet::fixtures
