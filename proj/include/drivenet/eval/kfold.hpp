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

#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "drivenet/eval/inference.hpp"
#include "drivenet/train/trainer.hpp"

namespace drivenet::eval {

inline constexpr const char* kMethodPlain = "Our";
inline constexpr const char* kMethodOtc = "Our + OTC";

struct FoldStats {
  std::vector<double> folds;  // percentages
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation
};

/// Mean and sample standard deviation (n - 1 denominator; 0 for one value).
inline FoldStats fold_stats(std::vector<double> values) {
  if (values.empty()) throw Error("fold_stats: no values");
  FoldStats s;
  s.folds = std::move(values);
  const double n = static_cast<double>(s.folds.size());
  s.mean = std::accumulate(s.folds.begin(), s.folds.end(), 0.0) / n;
  if (s.folds.size() > 1) {
    double ss = 0.0;
    for (double v : s.folds) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

struct KFoldRow {
  int horizon = 0;
  FoldStats accuracy, precision, recall, f1;
};

struct KFoldMethod {
  std::string method;
  std::vector<KFoldRow> rows;
};

/// Accuracy is the column comparable with published fold tables; the other
/// metrics are reported alongside it.
struct KFoldReport {
  int k = 0;
  std::vector<KFoldMethod> methods;
};

using ProgressFn = std::function<void(const std::string&)>;

namespace detail {

inline KFoldMethod summarize(const std::string& method, const std::vector<std::vector<HorizonResult>>& per_fold) {
  KFoldMethod m{method, {}};
  for (std::size_t h = 0; h < per_fold.front().size(); ++h) {
    std::vector<double> acc, prec, rec, f1;
    for (const auto& fold : per_fold) {
      acc.push_back(fold[h].metrics.accuracy * 100.0);
      prec.push_back(fold[h].metrics.precision * 100.0);
      rec.push_back(fold[h].metrics.recall * 100.0);
      f1.push_back(fold[h].metrics.f1 * 100.0);
    }
    m.rows.push_back({per_fold.front()[h].metrics.horizon, fold_stats(acc), fold_stats(prec), fold_stats(rec),
                      fold_stats(f1)});
  }
  return m;
}

}  // namespace detail

/// Stratified k-fold: fold i tests on its own clips and trains on the rest,
/// with a training seed derived from the base seed and the fold index.
/// `clips` must hold the manifest's records in manifest order.
inline KFoldReport kfold_run(const DatasetManifest& manifest, const std::vector<Clip>& clips, int k,
                             const train::TrainConfig& cfg, const EvalOptions& opt, bool with_otc,
                             const ProgressFn& progress = {}) {
  if (clips.size() != manifest.size()) throw Error("kfold: clip list does not match manifest");
  const FoldPlan plan = stratified_kfold(manifest, k, cfg.seed);
  std::vector<std::vector<HorizonResult>> plain, otc;
  for (int f = 0; f < k; ++f) {
    std::vector<Clip> fit, test;
    for (const auto& c : clips) (plan.assignment.at(c.id) == f ? test : fit).push_back(c);
    train::TrainConfig fold_cfg = cfg;
    fold_cfg.seed = make_rng(cfg.seed, "fold", f)();
    train::Trainer trainer(fold_cfg, std::move(fit));
    auto result = trainer.run([&](const train::EpochRecord& r) {
      if (progress)
        progress("fold " + std::to_string(f + 1) + " epoch " + std::to_string(r.epoch) + " loss " +
                 std::to_string(r.loss));
    });
    EvalOptions eo = opt;
    eo.otc = false;
    plain.push_back(horizon_eval(result.final_model, test, eo));
    if (with_otc) {
      eo.otc = true;
      otc.push_back(horizon_eval(result.final_model, test, eo));
    }
  }
  KFoldReport report;
  report.k = k;
  report.methods.push_back(detail::summarize(kMethodPlain, plain));
  if (with_otc) report.methods.push_back(detail::summarize(kMethodOtc, otc));
  return report;
}

}  // namespace drivenet::eval
