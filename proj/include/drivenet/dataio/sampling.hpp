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
#include <vector>

#include "drivenet/dataio/clip.hpp"

namespace drivenet {

/// Indices round(i * (L-1) / (n-1)) for i in [0, n).
inline std::vector<int> sample_indices(int length, int n = kClipFrames) {
  if (n < 2) throw Error("sample count must be at least 2");
  if (length < n) throw Error("clip too short");
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) {
    // Exact integer rounding of i*(L-1)/(n-1), halves rounded up.
    const long num = static_cast<long>(i) * (length - 1);
    const long den = n - 1;
    idx[i] = static_cast<int>((2 * num + den) / (2 * den));
  }
  return idx;
}

inline FrameSeq sample_frames(const FrameSeq& raw, int n = kClipFrames) {
  const auto idx = sample_indices(static_cast<int>(raw.size()), n);
  FrameSeq out;
  out.reserve(idx.size());
  for (int i : idx) out.push_back(raw[i]);
  return out;
}

/// Prediction horizon in whole seconds before the maneuver.
class HorizonSpec {
public:
  explicit HorizonSpec(int t) : t_(t) {
    if (t < -(kClipSeconds - 1) || t > 0)
      throw Error("horizon must be in [-4, 0], got " + std::to_string(t));
  }
  int seconds() const { return t_; }
  int observed_frames() const { return kFramesPerSecond * (kClipSeconds + t_); }

  bool operator==(const HorizonSpec&) const = default;

private:
  int t_;
};

inline const std::vector<int>& default_horizons() {
  static const std::vector<int> h = {0, -1, -2, -3, -4};
  return h;
}

/// Keeps the first 3*(5+T) frames of every branch.
inline Clip truncate_to_horizon(const Clip& clip, HorizonSpec h) {
  Clip out;
  out.id = clip.id;
  out.label = clip.label;
  out.driver_id = clip.driver_id;
  const auto keep = static_cast<std::size_t>(h.observed_frames());
  for (const auto& [kind, seq] : clip.branches) {
    if (seq.size() < keep) throw Error("clip " + clip.id + " shorter than horizon window");
    out.branches.emplace(kind, FrameSeq(seq.begin(), seq.begin() + static_cast<long>(keep)));
  }
  return out;
}

}  // namespace drivenet
