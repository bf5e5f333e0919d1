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
#include <cmath>
#include <vector>

#include "drivenet/dataio/label.hpp"

namespace drivenet::eval {

/// Rows are true labels, columns predicted labels.
struct ConfusionMatrix {
  std::array<std::array<long, kNumClasses>, kNumClasses> counts{};

  long total() const {
    long n = 0;
    for (const auto& row : counts)
      for (long v : row) n += v;
    return n;
  }
  long trace() const {
    long n = 0;
    for (std::size_t c = 0; c < kNumClasses; ++c) n += counts[c][c];
    return n;
  }
  long& at(ManeuverLabel truth, ManeuverLabel pred) { return counts[index_of(truth)][index_of(pred)]; }
  bool operator==(const ConfusionMatrix&) const = default;
};

inline ConfusionMatrix confusion(const std::vector<ManeuverLabel>& preds, const std::vector<ManeuverLabel>& truths) {
  if (preds.size() != truths.size()) throw Error("confusion: length mismatch");
  if (preds.empty()) throw Error("confusion: empty input");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < preds.size(); ++i) ++cm.at(truths[i], preds[i]);
  return cm;
}

struct ClassMetrics {
  long tp = 0, fp = 0, fn = 0, tn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  /// True when the class appears in neither truths nor predictions.
  bool undefined = false;
};

/// Fractions in [0, 1]; the macro averages weight every class equally.
struct MetricsRow {
  int horizon = 0;
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::array<ClassMetrics, kNumClasses> per_class{};

  std::vector<ManeuverLabel> undefined_classes() const {
    std::vector<ManeuverLabel> out;
    for (std::size_t c = 0; c < kNumClasses; ++c)
      if (per_class[c].undefined) out.push_back(label_from_index(c));
    return out;
  }
};

inline double safe_ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

inline MetricsRow metrics_from_confusion(const ConfusionMatrix& cm, int horizon = 0) {
  const long total = cm.total();
  if (total <= 0) throw Error("metrics: empty confusion matrix");
  MetricsRow row;
  row.horizon = horizon;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    ClassMetrics& m = row.per_class[c];
    m.tp = cm.counts[c][c];
    for (std::size_t o = 0; o < kNumClasses; ++o) {
      if (o == c) continue;
      m.fp += cm.counts[o][c];
      m.fn += cm.counts[c][o];
    }
    m.tn = total - m.tp - m.fp - m.fn;
    m.precision = safe_ratio(m.tp, m.tp + m.fp);
    m.recall = safe_ratio(m.tp, m.tp + m.fn);
    m.f1 = safe_ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
    m.undefined = m.tp + m.fp + m.fn == 0;
    row.precision += m.precision;
    row.recall += m.recall;
    row.f1 += m.f1;
  }
  row.precision /= kNumClasses;
  row.recall /= kNumClasses;
  row.f1 /= kNumClasses;
  row.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
  return row;
}

/// Fraction to a percentage with two decimals, as printed in tables.
inline double percent2(double fraction) { return std::round(fraction * 10000.0) / 100.0; }

inline double round2(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace drivenet::eval
