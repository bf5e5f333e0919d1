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

#include <cstring>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "drivenet/net/model.hpp"

namespace drivenet::net {

inline constexpr char kCheckpointMagic[8] = {'D', 'R', 'V', 'N', 'C', 'K', 'P', 'T'};
inline constexpr int kCheckpointVersion = 1;

/// Training metadata carried alongside the parameters.
struct CheckpointMeta {
  long step = 0;
  int epochs = 0;
  int batch_size = 0;
  double learning_rate = 0.0;
  std::string config_hash;
};

inline nlohmann::json model_config_to_json(const ModelConfig& c) {
  nlohmann::json j;
  j["scenario"] = std::string(to_string(c.scenario));
  j["dims"] = {{"appearance_lstm_units", c.dims.appearance_lstm_units},
               {"attention_units", c.dims.attention_units},
               {"flow_lstm_units", c.dims.flow_lstm_units},
               {"flow_input_height", c.dims.flow_input_height},
               {"flow_input_width", c.dims.flow_input_width},
               {"appearance_input_size", c.dims.appearance_input_size},
               {"fusion_dense_units", c.dims.fusion_dense_units},
               {"fusion_dropout", c.dims.fusion_dropout},
               {"n_classes", c.dims.n_classes}};
  j["backbone"] = {{"kind", std::string(to_string(c.backbone.kind))},
                   {"channels", c.backbone.channels},
                   {"external_channels", c.backbone.external_channels}};
  j["dropblock"] = {{"block_size", c.dropblock.block_size}, {"keep_prob", c.dropblock.keep_prob}};
  return j;
}

inline ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.scenario = parse_scenario(j.at("scenario").get<std::string>());
  const auto& d = j.at("dims");
  c.dims.appearance_lstm_units = d.at("appearance_lstm_units");
  c.dims.attention_units = d.at("attention_units");
  c.dims.flow_lstm_units = d.at("flow_lstm_units");
  c.dims.flow_input_height = d.at("flow_input_height");
  c.dims.flow_input_width = d.at("flow_input_width");
  c.dims.appearance_input_size = d.at("appearance_input_size");
  c.dims.fusion_dense_units = d.at("fusion_dense_units");
  c.dims.fusion_dropout = d.at("fusion_dropout");
  c.dims.n_classes = d.at("n_classes");
  const auto& b = j.at("backbone");
  c.backbone.kind = parse_backbone(b.at("kind").get<std::string>());
  c.backbone.channels = b.at("channels").get<std::vector<int>>();
  c.backbone.external_channels = b.at("external_channels");
  c.dropblock.block_size = j.at("dropblock").at("block_size");
  c.dropblock.keep_prob = j.at("dropblock").at("keep_prob");
  return c;
}

inline nlohmann::json norm_stats_to_json(const NormStats& s) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [b, m] : s.mean) j[std::string(to_string(b))] = {{"mean", m}, {"std", s.std_of(b)}};
  return j;
}

inline NormStats norm_stats_from_json(const nlohmann::json& j) {
  NormStats s;
  for (auto b : kAllBranches) {
    const std::string key(to_string(b));
    if (!j.contains(key)) continue;
    s.mean[b] = j.at(key).at("mean").get<std::array<double, 3>>();
    s.stddev[b] = j.at(key).at("std").get<std::array<double, 3>>();
  }
  return s;
}

/// Layout: 8-byte magic, u64 header length, JSON header, then each tensor's
/// float32 values (column-major) in header order.
inline void save_checkpoint(const std::filesystem::path& path, const Model<float>& model, const CheckpointMeta& meta) {
  nlohmann::json header;
  header["format_version"] = kCheckpointVersion;
  header["model"] = model_config_to_json(model.config());
  header["norm_stats"] = norm_stats_to_json(model.norm_stats());
  header["train"] = {{"step", meta.step},
                     {"epochs", meta.epochs},
                     {"batch_size", meta.batch_size},
                     {"learning_rate", meta.learning_rate},
                     {"config_hash", meta.config_hash}};
  nlohmann::json tensors = nlohmann::json::array();
  model.params().visit([&](const std::string& name, const Mat<float>& m) {
    tensors.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}, {"dtype", "f32"}});
  });
  header["tensors"] = tensors;
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint " + path.string());
  out.write(kCheckpointMagic, sizeof kCheckpointMagic);
  const std::uint64_t len = text.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof len);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  model.params().visit([&](const std::string&, const Mat<float>& m) {
    out.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(float)));
  });
  if (!out) throw Error("failed writing checkpoint " + path.string());
}

struct LoadedCheckpoint {
  Model<float> model;
  CheckpointMeta meta;
};

/// Rebuilds the model described by the header and fills its tensors. When
/// `expected` is given, its scenario and dimensions must match exactly.
inline LoadedCheckpoint load_checkpoint(const std::filesystem::path& path, const ModelConfig* expected = nullptr,
                                        ExternalExtractor<float> extractor = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0)
    throw Error("not a checkpoint file: " + path.string());
  std::uint64_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof len);
  if (!in || len > (1u << 26)) throw Error("corrupt checkpoint header: " + path.string());
  std::string text(len, '\0');
  in.read(text.data(), static_cast<std::streamsize>(len));
  const auto header = nlohmann::json::parse(text);
  if (header.at("format_version").get<int>() != kCheckpointVersion)
    throw Error("unsupported checkpoint version in " + path.string());

  const ModelConfig cfg = model_config_from_json(header.at("model"));
  if (expected) {
    if (expected->scenario != cfg.scenario)
      throw Error("checkpoint scenario " + std::string(to_string(cfg.scenario)) + " does not match configured " +
                  std::string(to_string(expected->scenario)));
    if (!(expected->dims == cfg.dims) || expected->backbone.channels != cfg.backbone.channels ||
        expected->backbone.kind != cfg.backbone.kind)
      throw Error("checkpoint dimensions do not match the configured model");
  }
  Rng dummy(0);
  LoadedCheckpoint out{Model<float>(cfg, dummy, std::move(extractor)), {}};
  out.model.set_norm_stats(norm_stats_from_json(header.at("norm_stats")));
  const auto& tr = header.at("train");
  out.meta.step = tr.at("step");
  out.meta.epochs = tr.at("epochs");
  out.meta.batch_size = tr.at("batch_size");
  out.meta.learning_rate = tr.at("learning_rate");
  out.meta.config_hash = tr.at("config_hash");

  const auto& listed = header.at("tensors");
  std::size_t idx = 0;
  out.model.params().visit(TensorVisitor<float>([&](const std::string& name, Mat<float>& m) {
    if (idx >= listed.size()) throw Error("checkpoint is missing tensor " + name);
    const auto& t = listed[idx++];
    if (t.at("name").get<std::string>() != name || t.at("rows").get<Eigen::Index>() != m.rows() ||
        t.at("cols").get<Eigen::Index>() != m.cols())
      throw Error("checkpoint tensor mismatch at " + name);
    in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(float)));
    if (!in) throw Error("checkpoint truncated at " + name);
  }));
  if (idx != listed.size()) throw Error("checkpoint has unexpected extra tensors");
  return out;
}

}  // namespace drivenet::net
