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

#include <optional>
#include <set>

#include <nlohmann/json.hpp>

#include "drivenet/eval/ablation.hpp"

namespace drivenet::eval {

inline constexpr int kReportSchemaVersion = 1;

struct Report {
  std::string config_hash;
  std::string scenario;
  std::string method = kMethodPlain;
  std::vector<HorizonResult> horizons;
  std::optional<KFoldReport> kfold;
  std::optional<AblationReport> ablation;
};

enum class ReportFormat { csv, json };

inline ReportFormat parse_report_format(std::string_view s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  throw ConfigError("unknown report format: " + std::string(s));
}

namespace detail {

inline nlohmann::json row_json(const HorizonResult& r) {
  nlohmann::json j;
  j["T"] = r.metrics.horizon;
  j["accuracy"] = percent2(r.metrics.accuracy);
  j["precision"] = percent2(r.metrics.precision);
  j["recall"] = percent2(r.metrics.recall);
  j["f1"] = percent2(r.metrics.f1);
  j["confusion"] = r.confusion.counts;
  nlohmann::json undefined = nlohmann::json::array();
  for (auto l : r.metrics.undefined_classes()) undefined.push_back(std::string(to_string(l)));
  j["undefined_classes"] = undefined;
  return j;
}

inline nlohmann::json stats_json(const FoldStats& s) {
  nlohmann::json folds = nlohmann::json::array();
  for (double v : s.folds) folds.push_back(round2(v));
  return {{"folds", folds}, {"mean", round2(s.mean)}, {"std", round2(s.stddev)}};
}

}  // namespace detail

/// Canonical JSON: object keys sorted, percentages rounded to two decimals.
inline nlohmann::json report_to_json(const Report& r) {
  nlohmann::json j;
  j["schema_version"] = kReportSchemaVersion;
  j["config_hash"] = r.config_hash;
  j["scenario"] = r.scenario;
  j["method"] = r.method;
  j["horizons"] = nlohmann::json::array();
  for (const auto& h : r.horizons) j["horizons"].push_back(detail::row_json(h));
  if (r.kfold) {
    nlohmann::json k;
    k["k"] = r.kfold->k;
    k["paper_comparable"] = "accuracy";
    k["methods"] = nlohmann::json::array();
    for (const auto& m : r.kfold->methods) {
      nlohmann::json mj;
      mj["method"] = m.method;
      mj["rows"] = nlohmann::json::array();
      for (const auto& row : m.rows)
        mj["rows"].push_back({{"T", row.horizon},
                              {"accuracy", detail::stats_json(row.accuracy)},
                              {"precision", detail::stats_json(row.precision)},
                              {"recall", detail::stats_json(row.recall)},
                              {"f1", detail::stats_json(row.f1)}});
      k["methods"].push_back(mj);
    }
    j["kfold"] = k;
  }
  if (r.ablation) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& e : r.ablation->presets) {
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& h : e.rows) rows.push_back(detail::row_json(h));
      a.push_back({{"preset", std::string(1, e.preset)}, {"horizons", rows}});
    }
    j["ablation"] = {{"presets", a}};
  }
  return j;
}

inline std::string canonical_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

/// One line per horizon with the four metrics; numbers use the JSON
/// report's formatting so both files carry identical values.
inline std::string report_to_csv(const Report& r) {
  std::ostringstream s;
  s << "method,T,accuracy,precision,recall,f1\n";
  for (const auto& h : r.horizons) {
    s << r.method << ',' << h.metrics.horizon;
    for (double v : {h.metrics.accuracy, h.metrics.precision, h.metrics.recall, h.metrics.f1})
      s << ',' << nlohmann::json(percent2(v)).dump();
    s << '\n';
  }
  return s.str();
}

inline std::string kfold_to_csv(const KFoldReport& k) {
  std::ostringstream s;
  s << "T,method";
  for (int f = 1; f <= k.k; ++f) s << ",fold" << f;
  s << ",mean,std\n";
  for (const auto& m : k.methods)
    for (const auto& row : m.rows) {
      s << row.horizon << ',' << m.method;
      for (double v : row.accuracy.folds) s << ',' << nlohmann::json(round2(v)).dump();
      s << ',' << nlohmann::json(round2(row.accuracy.mean)).dump() << ','
        << nlohmann::json(round2(row.accuracy.stddev)).dump() << '\n';
    }
  return s.str();
}

inline std::string horizon_tag(int t) { return t < 0 ? "Tm" + std::to_string(-t) : "T" + std::to_string(t); }

/// Writes report.json and/or report.csv plus one confusion heatmap per
/// horizon; k-fold and ablation sections get their own CSV files.
inline std::vector<std::filesystem::path> emit_report(const Report& r, const std::filesystem::path& out_dir,
                                                      const std::set<ReportFormat>& formats = {ReportFormat::csv,
                                                                                               ReportFormat::json}) {
  if (r.horizons.empty() && !r.kfold && !r.ablation) throw Error("report has no rows");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) throw Error("cannot create report directory " + out_dir.string());
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& name, const std::string& text) {
    detail::write_text(out_dir / name, text);
    written.push_back(out_dir / name);
  };
  if (formats.count(ReportFormat::json)) put("report.json", canonical_json(report_to_json(r)));
  if (formats.count(ReportFormat::csv)) {
    if (!r.horizons.empty()) put("report.csv", report_to_csv(r));
    if (r.kfold) put("kfold.csv", kfold_to_csv(*r.kfold));
  }
  for (const auto& h : r.horizons)
    put("confusion_" + horizon_tag(h.metrics.horizon) + ".svg",
        confusion_svg(h.confusion, r.method + ", T = " + std::to_string(h.metrics.horizon) + " s"));
  if (r.ablation) {
    write_ablation(*r.ablation, out_dir);
    written.push_back(out_dir / "ablation.csv");
  }
  return written;
}

}  // namespace drivenet::eval
