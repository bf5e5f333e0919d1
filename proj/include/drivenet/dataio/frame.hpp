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

#include <cstdint>
#include <vector>

#include "drivenet/common.hpp"

namespace drivenet {

/// Interleaved H x W x 3 image of 8-bit intensities.
struct Frame {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> pixels;

  static constexpr int kChannels = 3;

  Frame() = default;
  Frame(int h, int w, std::uint8_t fill = 0) : height(h), width(w) {
    if (h < 1 || w < 1) throw Error("frame dimensions must be positive");
    pixels.assign(static_cast<std::size_t>(h) * w * kChannels, fill);
  }

  std::size_t offset(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * width + x) * kChannels + c;
  }
  std::uint8_t& at(int y, int x, int c) { return pixels[offset(y, x, c)]; }
  std::uint8_t at(int y, int x, int c) const { return pixels[offset(y, x, c)]; }

  bool same_shape(const Frame& o) const { return height == o.height && width == o.width; }
  bool operator==(const Frame&) const = default;
};

using FrameSeq = std::vector<Frame>;

inline std::uint8_t clamp_u8(double v) {
  if (v <= 0.0) return 0;
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(v + 0.5);
}

}  // namespace drivenet
