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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "drivenet/eval/metrics.hpp"

namespace drivenet::eval {

struct Series {
  std::string name;
  std::vector<double> y;
};

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

inline constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                           "#8c564b", "#e377c2", "#7f7f7f"};

}  // namespace detail

/// Static SVG line chart; every series shares the x labels.
inline std::string line_chart_svg(const std::string& title, const std::vector<std::string>& x_labels,
                                  const std::vector<Series>& series, double y_min = 0.0, double y_max = 100.0) {
  const double W = 560, H = 360, L = 60, R = 130, T = 40, B = 50;
  const double pw = W - L - R, ph = H - T - B;
  const auto n = x_labels.size();
  auto px = [&](std::size_t i) { return L + (n > 1 ? pw * static_cast<double>(i) / static_cast<double>(n - 1) : pw / 2); };
  auto py = [&](double v) { return T + ph * (1.0 - (v - y_min) / (y_max - y_min)); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = y_min + (y_max - y_min) * k / 4.0;
    s << "<line x1=\"" << L << "\" x2=\"" << L + pw << "\" y1=\"" << py(v) << "\" y2=\"" << py(v)
      << "\" stroke=\"#ddd\"/>\n";
    s << "<text x=\"" << L - 6 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">" << detail::fmt(v) << "</text>\n";
  }
  for (std::size_t i = 0; i < n; ++i)
    s << "<text x=\"" << px(i) << "\" y=\"" << T + ph + 20 << "\" text-anchor=\"middle\">" << x_labels[i] << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = detail::kPalette[k % std::size(detail::kPalette)];
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < series[k].y.size() && i < n; ++i) s << px(i) << ',' << py(series[k].y[i]) << ' ';
    s << "\"/>\n";
    for (std::size_t i = 0; i < series[k].y.size() && i < n; ++i)
      s << "<circle cx=\"" << px(i) << "\" cy=\"" << py(series[k].y[i]) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    s << "<text x=\"" << L + pw + 12 << "\" y=\"" << T + 16 + 18 * k << "\" fill=\"" << color << "\">"
      << series[k].name << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

/// Heatmap of a confusion matrix with counts printed in each cell.
inline std::string confusion_svg(const ConfusionMatrix& cm, const std::string& title) {
  const int cell = 56, L = 150, T = 60;
  const int size = cell * static_cast<int>(kNumClasses);
  long peak = 1;
  for (const auto& row : cm.counts)
    for (long v : row) peak = std::max(peak, v);
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << L + size + 20 << "\" height=\"" << T + size + 40
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << L + size / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
  s << "<text x=\"" << L + size / 2 << "\" y=\"" << T + size + 30 << "\" text-anchor=\"middle\">predicted</text>\n";
  for (std::size_t r = 0; r < kNumClasses; ++r) {
    s << "<text x=\"" << L - 6 << "\" y=\"" << T + cell * static_cast<int>(r) + cell / 2 + 4
      << "\" text-anchor=\"end\">" << to_string(label_from_index(r)) << "</text>\n";
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      const long v = cm.counts[r][c];
      const int shade = 255 - static_cast<int>(200.0 * static_cast<double>(v) / static_cast<double>(peak));
      const int x = L + cell * static_cast<int>(c), y = T + cell * static_cast<int>(r);
      s << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\"" << cell << "\" fill=\"rgb("
        << shade << ',' << shade << ",255)\" stroke=\"#999\"/>\n";
      s << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell / 2 + 4 << "\" text-anchor=\"middle\">" << v
        << "</text>\n";
    }
  }
  for (std::size_t c = 0; c < kNumClasses; ++c)
    s << "<text x=\"" << L + cell * static_cast<int>(c) + cell / 2 << "\" y=\"" << T - 8
      << "\" text-anchor=\"middle\" font-size=\"9\">" << to_string(label_from_index(c)) << "</text>\n";
  s << "</svg>\n";
  return s.str();
}

}  // namespace drivenet::eval
