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
#include <cstdlib>

#include "drivenet/dataio/frame.hpp"

namespace drivenet {

/// Color-coded temporal difference used in place of a learned optical flow
/// model. For each pixel, d = luma(t) - luma(t-1):
///   red = max(d, 0), blue = max(-d, 0), green = |d|.
/// Frame 0 repeats frame 1's encoding so the output is as long as the input.
inline FrameSeq compute_flow_standin(const FrameSeq& frames) {
  if (frames.size() < 2) throw Error("flow needs at least 2 frames");
  for (const auto& f : frames)
    if (!f.same_shape(frames.front())) throw Error("flow frames must share dimensions");

  const int h = frames.front().height;
  const int w = frames.front().width;
  FrameSeq out(frames.size(), Frame(h, w));
  for (std::size_t t = 1; t < frames.size(); ++t) {
    const auto& prev = frames[t - 1];
    const auto& cur = frames[t];
    auto& dst = out[t];
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        int luma_cur = 0;
        int luma_prev = 0;
        for (int c = 0; c < Frame::kChannels; ++c) {
          luma_cur += cur.at(y, x, c);
          luma_prev += prev.at(y, x, c);
        }
        // Integer luma difference, rounded half away from zero.
        const int diff3 = luma_cur - luma_prev;
        const int d = (diff3 >= 0 ? diff3 + 1 : diff3 - 1) / 3;
        dst.at(y, x, 0) = static_cast<std::uint8_t>(d > 0 ? d : 0);
        dst.at(y, x, 1) = static_cast<std::uint8_t>(std::abs(d));
        dst.at(y, x, 2) = static_cast<std::uint8_t>(d < 0 ? -d : 0);
      }
    }
  }
  out[0] = out[1];
  return out;
}

}  // namespace drivenet
