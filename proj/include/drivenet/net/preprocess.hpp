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
#include <map>

#include "drivenet/dataio/clip.hpp"
#include "drivenet/net/conv.hpp"
#include "drivenet/net/model_config.hpp"

namespace drivenet::net {

/// Bilinear resize with half-pixel centers; exact copy when sizes match.
inline Frame resize_bilinear(const Frame& in, int out_h, int out_w) {
  if (in.height == out_h && in.width == out_w) return in;
  Frame out(out_h, out_w);
  const double sy = static_cast<double>(in.height) / out_h;
  const double sx = static_cast<double>(in.width) / out_w;
  for (int y = 0; y < out_h; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, in.height - 1.0);
    const int y0 = static_cast<int>(fy);
    const int y1 = std::min(y0 + 1, in.height - 1);
    const double wy = fy - y0;
    for (int x = 0; x < out_w; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, in.width - 1.0);
      const int x0 = static_cast<int>(fx);
      const int x1 = std::min(x0 + 1, in.width - 1);
      const double wx = fx - x0;
      for (int c = 0; c < Frame::kChannels; ++c) {
        const double top = in.at(y0, x0, c) * (1 - wx) + in.at(y0, x1, c) * wx;
        const double bot = in.at(y1, x0, c) * (1 - wx) + in.at(y1, x1, c) * wx;
        out.at(y, x, c) = clamp_u8(top * (1 - wy) + bot * wy);
      }
    }
  }
  return out;
}

/// Mean of each patch of an 8x24 grid, per channel, in raw intensity units.
/// Layout: channel-major, then grid row, then grid column (576 values).
inline Vec<double> flow_patch_means(const Frame& f, int expected_h, int expected_w) {
  if (f.height != expected_h || f.width != expected_w)
    throw Error("flow frame must be " + std::to_string(expected_h) + "x" + std::to_string(expected_w) + ", got " +
                std::to_string(f.height) + "x" + std::to_string(f.width));
  constexpr int R = BranchDims::kFlowGridRows;
  constexpr int C = BranchDims::kFlowGridCols;
  if (f.height % R != 0 || f.width % C != 0) throw Error("flow frame does not divide into the patch grid");
  const int ph = f.height / R;
  const int pw = f.width / C;
  Vec<double> out = Vec<double>::Zero(3 * R * C);
  for (int y = 0; y < f.height; ++y)
    for (int x = 0; x < f.width; ++x)
      for (int c = 0; c < 3; ++c) out(c * R * C + (y / ph) * C + (x / pw)) += f.at(y, x, c);
  out /= static_cast<double>(ph * pw);
  return out;
}

/// Per-branch, per-channel standardization statistics on the [0, 1] scale.
struct NormStats {
  std::map<BranchKind, std::array<double, 3>> mean;
  std::map<BranchKind, std::array<double, 3>> stddev;

  std::array<double, 3> mean_of(BranchKind b) const {
    auto it = mean.find(b);
    return it == mean.end() ? std::array<double, 3>{0, 0, 0} : it->second;
  }
  std::array<double, 3> std_of(BranchKind b) const {
    auto it = stddev.find(b);
    return it == stddev.end() ? std::array<double, 3>{1, 1, 1} : it->second;
  }
};

template <typename T>
FeatureMap<T> appearance_tensor(const Frame& raw, int size, const std::array<double, 3>& mean,
                                const std::array<double, 3>& sd) {
  const Frame f = resize_bilinear(raw, size, size);
  FeatureMap<T> m;
  m.height = size;
  m.width = size;
  m.data.resize(3, size * size);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x)
      for (int c = 0; c < 3; ++c)
        m.data(c, y * size + x) = static_cast<T>((f.at(y, x, c) / 255.0 - mean[c]) / sd[c]);
  return m;
}

/// Raw (0..255) patch means of a flow frame after resizing to the flow input shape.
inline Vec<double> flow_features_raw(const Frame& raw, const BranchDims& dims) {
  return flow_patch_means(resize_bilinear(raw, dims.flow_input_height, dims.flow_input_width),
                          dims.flow_input_height, dims.flow_input_width);
}

template <typename T>
Vec<T> flow_vector(const Frame& raw, const BranchDims& dims, const std::array<double, 3>& mean,
                   const std::array<double, 3>& sd) {
  const Vec<double> v = flow_features_raw(raw, dims);
  const Eigen::Index per = v.size() / 3;
  Vec<T> out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const auto c = static_cast<std::size_t>(i / per);
    out(i) = static_cast<T>((v(i) / 255.0 - mean[c]) / sd[c]);
  }
  return out;
}

/// Network-ready input for one clip: per-frame appearance tensors and
/// per-frame flow vectors (one column per frame).
template <typename T>
struct ClipInput {
  std::map<BranchKind, std::vector<FeatureMap<T>>> appearance;
  std::map<BranchKind, Mat<T>> flow;
  int frames = 0;
};

template <typename T>
ClipInput<T> prepare_input(const Clip& clip, const ModelConfig& cfg, const NormStats& stats) {
  ClipInput<T> in;
  in.frames = -1;
  for (auto b : active_branches(cfg.scenario)) {
    const auto& seq = clip.frames(b);
    if (seq.empty()) throw Error("clip " + clip.id + " has an empty branch");
    if (in.frames < 0) in.frames = static_cast<int>(seq.size());
    else if (in.frames != static_cast<int>(seq.size())) throw Error("clip " + clip.id + ": branch lengths differ");
    if (is_flow(b)) {
      Mat<T> m(BranchDims::flow_feature_dim(), static_cast<Eigen::Index>(seq.size()));
      for (std::size_t t = 0; t < seq.size(); ++t)
        m.col(static_cast<Eigen::Index>(t)) = flow_vector<T>(seq[t], cfg.dims, stats.mean_of(b), stats.std_of(b));
      in.flow.emplace(b, std::move(m));
    } else {
      std::vector<FeatureMap<T>> frames;
      frames.reserve(seq.size());
      for (const auto& f : seq)
        frames.push_back(appearance_tensor<T>(f, cfg.dims.appearance_input_size, stats.mean_of(b), stats.std_of(b)));
      in.appearance.emplace(b, std::move(frames));
    }
  }
  return in;
}

/// Per-channel mean and standard deviation of the network inputs over a set
/// of clips (appearance pixels and flow patch means, both on the [0, 1] scale).
inline NormStats estimate_norm_stats(const std::vector<const Clip*>& clips, const ModelConfig& cfg) {
  NormStats stats;
  for (auto b : active_branches(cfg.scenario)) {
    std::array<double, 3> sum{}, sq{};
    double n = 0;
    for (const Clip* clip : clips) {
      for (const auto& f : clip->frames(b)) {
        if (is_flow(b)) {
          const Vec<double> v = flow_features_raw(f, cfg.dims) / 255.0;
          const Eigen::Index per = v.size() / 3;
          for (int c = 0; c < 3; ++c) {
            sum[c] += v.segment(c * per, per).sum();
            sq[c] += v.segment(c * per, per).squaredNorm();
          }
          n += static_cast<double>(per);
        } else {
          const Frame r = resize_bilinear(f, cfg.dims.appearance_input_size, cfg.dims.appearance_input_size);
          for (std::size_t i = 0; i < r.pixels.size(); ++i) {
            const double v = r.pixels[i] / 255.0;
            sum[i % 3] += v;
            sq[i % 3] += v * v;
          }
          n += static_cast<double>(r.pixels.size() / 3);
        }
      }
    }
    std::array<double, 3> mean{0, 0, 0}, sd{1, 1, 1};
    if (n > 0)
      for (int c = 0; c < 3; ++c) {
        mean[c] = sum[c] / n;
        sd[c] = std::sqrt(std::max(sq[c] / n - mean[c] * mean[c], 0.0));
        if (sd[c] < 1e-6) sd[c] = 1.0;
      }
    stats.mean[b] = mean;
    stats.stddev[b] = sd;
  }
  return stats;
}

}  // namespace drivenet::net
