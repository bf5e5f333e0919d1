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

#include <algorithm>
#include <utility>

#include "drivenet/dataio/clip.hpp"

namespace drivenet::augment {

inline constexpr int kMaxShift = 4;

struct TranslateParams {
  int dx = 0;
  int dy = 0;

  void validate() const {
    if (std::abs(dx) > kMaxShift || std::abs(dy) > kMaxShift)
      throw Error("translation out of range: (" + std::to_string(dx) + ", " + std::to_string(dy) + ")");
  }
};

/// Shifts content by (dx, dy): a pixel at (row, col) moves to
/// (row + dy, col + dx). Vacated pixels become 0.
inline Frame translate(const Frame& in, TranslateParams p) {
  p.validate();
  Frame out(in.height, in.width, 0);
  for (int y = 0; y < in.height; ++y) {
    const int sy = y - p.dy;
    if (sy < 0 || sy >= in.height) continue;
    for (int x = 0; x < in.width; ++x) {
      const int sx = x - p.dx;
      if (sx < 0 || sx >= in.width) continue;
      for (int c = 0; c < Frame::kChannels; ++c) out.at(y, x, c) = in.at(sy, sx, c);
    }
  }
  return out;
}

inline FrameSeq translate(const FrameSeq& in, TranslateParams p) {
  FrameSeq out;
  out.reserve(in.size());
  for (const auto& f : in) out.push_back(translate(f, p));
  return out;
}

inline Frame mirror_frame(const Frame& in) {
  Frame out(in.height, in.width);
  for (int y = 0; y < in.height; ++y)
    for (int x = 0; x < in.width; ++x)
      for (int c = 0; c < Frame::kChannels; ++c) out.at(y, in.width - 1 - x, c) = in.at(y, x, c);
  return out;
}

/// Mirrors every frame and swaps the left/right meaning of the label.
inline std::pair<FrameSeq, ManeuverLabel> flip_lr(const FrameSeq& in, ManeuverLabel label) {
  FrameSeq out;
  out.reserve(in.size());
  for (const auto& f : in) out.push_back(mirror_frame(f));
  return {std::move(out), mirror(label)};
}

struct CutoutParams {
  int side = 32;
  std::uint8_t fill = 0;

  void validate(int h, int w) const {
    if (side <= 0 || side > std::min(h, w))
      throw Error("cutout side " + std::to_string(side) + " does not fit a " + std::to_string(h) + "x" +
                  std::to_string(w) + " frame");
  }
};

struct CutoutBox {
  int y = 0;
  int x = 0;
  int side = 0;
};

/// Top-left corner of a square that lies fully inside an h x w frame.
inline CutoutBox sample_cutout_box(int h, int w, const CutoutParams& p, Rng& rng) {
  p.validate(h, w);
  return {uniform_int(rng, 0, h - p.side), uniform_int(rng, 0, w - p.side), p.side};
}

inline FrameSeq apply_cutout(const FrameSeq& in, const CutoutBox& box, std::uint8_t fill) {
  FrameSeq out = in;
  for (auto& f : out)
    for (int y = box.y; y < box.y + box.side; ++y)
      for (int x = box.x; x < box.x + box.side; ++x)
        for (int c = 0; c < Frame::kChannels; ++c) f.at(y, x, c) = fill;
  return out;
}

/// One square per call, at the same position in every frame.
inline FrameSeq cutout(const FrameSeq& in, const CutoutParams& p, Rng& rng) {
  if (in.empty()) return in;
  const auto box = sample_cutout_box(in.front().height, in.front().width, p, rng);
  return apply_cutout(in, box, p.fill);
}

}  // namespace drivenet::augment
