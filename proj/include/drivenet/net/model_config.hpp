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

#include <string>
#include <vector>

#include "drivenet/dataio/clip.hpp"
#include "drivenet/net/dropblock.hpp"

namespace drivenet::net {

enum class Scenario { inside_only, outside_only, both };

inline std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::inside_only: return "inside_only";
    case Scenario::outside_only: return "outside_only";
    case Scenario::both: return "both";
  }
  return "?";
}

inline Scenario parse_scenario(std::string_view s) {
  for (auto v : {Scenario::inside_only, Scenario::outside_only, Scenario::both})
    if (to_string(v) == s) return v;
  throw ConfigError("unknown scenario: " + std::string(s));
}

/// Active branches in fixed order: inside appearance, outside appearance,
/// inside flow, outside flow. A view-restricted scenario drops both of the
/// other view's branches.
inline std::vector<BranchKind> active_branches(Scenario s) {
  switch (s) {
    case Scenario::inside_only: return {BranchKind::inside_appearance, BranchKind::inside_flow};
    case Scenario::outside_only: return {BranchKind::outside_appearance, BranchKind::outside_flow};
    case Scenario::both: return {kAllBranches.begin(), kAllBranches.end()};
  }
  return {};
}

enum class BackboneKind { tiny_conv, densenet121_interface };

inline std::string_view to_string(BackboneKind k) {
  return k == BackboneKind::tiny_conv ? "tiny_conv" : "densenet121_interface";
}

inline BackboneKind parse_backbone(std::string_view s) {
  if (s == "tiny_conv") return BackboneKind::tiny_conv;
  if (s == "densenet121_interface") return BackboneKind::densenet121_interface;
  throw ConfigError("unknown backbone: " + std::string(s));
}

struct BackboneSpec {
  BackboneKind kind = BackboneKind::tiny_conv;
  std::vector<int> channels = {16, 32, 64, 128};
  /// Channel count of an injected extractor's output map.
  int external_channels = 1024;

  int output_channels() const {
    return kind == BackboneKind::tiny_conv ? channels.back() : external_channels;
  }
};

struct BranchDims {
  int appearance_lstm_units = 512;
  int attention_units = 512;
  int flow_lstm_units = 128;
  int flow_input_height = 128;
  int flow_input_width = 384;
  int appearance_input_size = 128;
  int fusion_dense_units = 512;
  double fusion_dropout = 0.45;
  int n_classes = static_cast<int>(kNumClasses);

  static constexpr int kFlowGridRows = 8;
  static constexpr int kFlowGridCols = 24;
  static constexpr int flow_feature_dim() { return kFlowGridRows * kFlowGridCols * 3; }

  void validate() const {
    for (int v : {appearance_lstm_units, attention_units, flow_lstm_units, flow_input_height, flow_input_width,
                  appearance_input_size, fusion_dense_units, n_classes})
      if (v <= 0) throw ConfigError("branch dimensions must be positive");
    if (flow_input_height % kFlowGridRows != 0 || flow_input_width % kFlowGridCols != 0)
      throw ConfigError("flow input must divide into an 8x24 patch grid");
    if (fusion_dropout < 0.0 || fusion_dropout >= 1.0) throw ConfigError("fusion dropout must be in [0, 1)");
  }

  bool operator==(const BranchDims&) const = default;
};

struct ModelConfig {
  Scenario scenario = Scenario::both;
  BranchDims dims;
  BackboneSpec backbone;
  DropBlockParams dropblock;

  /// Width of the concatenated branch features entering the fusion head.
  int fusion_input_dim() const {
    int d = 0;
    for (auto b : active_branches(scenario)) d += is_flow(b) ? dims.flow_lstm_units : dims.appearance_lstm_units;
    return d;
  }
};

}  // namespace drivenet::net
