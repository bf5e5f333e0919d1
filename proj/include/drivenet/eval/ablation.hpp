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

#include "drivenet/eval/kfold.hpp"
#include "drivenet/eval/plot.hpp"

namespace drivenet::eval {

struct AblationEntry {
  char preset = 'A';
  std::vector<HorizonResult> rows;
};

struct AblationReport {
  std::vector<AblationEntry> presets;
};

/// Trains one model per augmentation preset with the shared seed and
/// evaluates each over the requested horizons.
inline AblationReport ablation_run(const std::vector<Clip>& train_clips, const std::vector<Clip>& test_clips,
                                   const std::string& presets, const train::TrainConfig& cfg, const EvalOptions& opt,
                                   const ProgressFn& progress = {}) {
  if (presets.empty()) throw Error("ablation: no presets requested");
  AblationReport report;
  for (char p : presets) {
    train::TrainConfig pc = cfg;
    pc.augment.enabled = augment::preset_ops(p);
    train::Trainer trainer(pc, train_clips);
    auto result = trainer.run([&](const train::EpochRecord& r) {
      if (progress)
        progress(std::string("preset ") + p + " epoch " + std::to_string(r.epoch) + " loss " + std::to_string(r.loss));
    });
    report.presets.push_back({p, horizon_eval(result.final_model, test_clips, opt)});
  }
  return report;
}

inline constexpr std::array<const char*, 4> kMetricNames = {"accuracy", "precision", "recall", "f1"};

inline double metric_value(const MetricsRow& m, std::size_t which) {
  switch (which) {
    case 0: return m.accuracy;
    case 1: return m.precision;
    case 2: return m.recall;
    default: return m.f1;
  }
}

/// Writes ablation.csv (one line per preset and horizon) and one SVG chart
/// per metric with a series per preset.
inline void write_ablation(const AblationReport& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::ostringstream csv;
  csv << "preset,T,accuracy,precision,recall,f1\n";
  for (const auto& e : report.presets)
    for (const auto& r : e.rows) {
      csv << e.preset << ',' << r.metrics.horizon;
      for (std::size_t m = 0; m < kMetricNames.size(); ++m) csv << ',' << detail::fmt(percent2(metric_value(r.metrics, m)));
      csv << '\n';
    }
  detail::write_text(out_dir / "ablation.csv", csv.str());

  if (report.presets.empty()) return;
  std::vector<std::string> xs;
  for (const auto& r : report.presets.front().rows) xs.push_back("T=" + std::to_string(r.metrics.horizon));
  for (std::size_t m = 0; m < kMetricNames.size(); ++m) {
    std::vector<Series> series;
    for (const auto& e : report.presets) {
      Series s{std::string(1, e.preset), {}};
      for (const auto& r : e.rows) s.y.push_back(percent2(metric_value(r.metrics, m)));
      series.push_back(std::move(s));
    }
    detail::write_text(out_dir / ("ablation_" + std::string(kMetricNames[m]) + ".svg"),
                       line_chart_svg(std::string(kMetricNames[m]) + " (%) by horizon", xs, series));
  }
}

}  // namespace drivenet::eval
