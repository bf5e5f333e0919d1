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
#include <map>
#include <string>
#include <string_view>

#include "drivenet/dataio/frame.hpp"
#include "drivenet/dataio/label.hpp"

namespace drivenet {

inline constexpr int kClipFrames = 15;
inline constexpr int kFramesPerSecond = 3;
inline constexpr int kClipSeconds = 5;

enum class BranchKind : int {
  inside_appearance = 0,
  outside_appearance = 1,
  inside_flow = 2,
  outside_flow = 3,
};

inline constexpr std::array<BranchKind, 4> kAllBranches = {
    BranchKind::inside_appearance, BranchKind::outside_appearance, BranchKind::inside_flow,
    BranchKind::outside_flow};

inline constexpr std::string_view to_string(BranchKind b) {
  switch (b) {
    case BranchKind::inside_appearance: return "inside";
    case BranchKind::outside_appearance: return "outside";
    case BranchKind::inside_flow: return "inside_flow";
    case BranchKind::outside_flow: return "outside_flow";
  }
  return "?";
}

inline constexpr bool is_flow(BranchKind b) {
  return b == BranchKind::inside_flow || b == BranchKind::outside_flow;
}

struct Clip {
  std::string id;
  ManeuverLabel label = ManeuverLabel::go_straight;
  std::string driver_id;
  std::map<BranchKind, FrameSeq> branches;

  bool has(BranchKind b) const { return branches.count(b) != 0; }
  const FrameSeq& frames(BranchKind b) const {
    auto it = branches.find(b);
    if (it == branches.end())
      throw Error("clip " + id + " is missing branch " + std::string(to_string(b)));
    return it->second;
  }

  /// Number of frames per branch; every present branch must agree.
  int length() const {
    int n = -1;
    for (const auto& [kind, seq] : branches) {
      if (n < 0) n = static_cast<int>(seq.size());
      else if (n != static_cast<int>(seq.size())) throw Error("clip " + id + ": branch lengths differ");
    }
    return n < 0 ? 0 : n;
  }

  bool operator==(const Clip&) const = default;
};

/// Checks the Clip invariants for a clip that may have been truncated to
/// `expected_frames` frames per branch.
inline void validate_clip(const Clip& clip, int expected_frames = kClipFrames) {
  for (const auto& [kind, seq] : clip.branches) {
    if (static_cast<int>(seq.size()) != expected_frames)
      throw Error("clip " + clip.id + ": branch " + std::string(to_string(kind)) + " has " +
                  std::to_string(seq.size()) + " frames, expected " + std::to_string(expected_frames));
    for (const auto& f : seq) {
      if (!f.same_shape(seq.front()))
        throw Error("clip " + clip.id + ": frame dimensions differ within a branch");
      if (f.pixels.size() != static_cast<std::size_t>(f.height) * f.width * Frame::kChannels)
        throw Error("clip " + clip.id + ": malformed frame buffer");
    }
  }
}

}  // namespace drivenet
