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
#include <cstdint>

#include "drivenet/dataio/frame.hpp"

namespace drivenet::augment {

// Per-channel pixel operations with the usual image-library semantics.

inline Frame autocontrast(const Frame& in) {
  Frame out = in;
  for (int c = 0; c < Frame::kChannels; ++c) {
    int lo = 255, hi = 0;
    for (std::size_t i = static_cast<std::size_t>(c); i < in.pixels.size(); i += Frame::kChannels) {
      lo = std::min<int>(lo, in.pixels[i]);
      hi = std::max<int>(hi, in.pixels[i]);
    }
    if (hi <= lo) continue;
    const double scale = 255.0 / (hi - lo);
    for (std::size_t i = static_cast<std::size_t>(c); i < in.pixels.size(); i += Frame::kChannels)
      out.pixels[i] = clamp_u8((in.pixels[i] - lo) * scale);
  }
  return out;
}

/// Histogram equalization, per channel, with the lookup table built from
/// the cumulative histogram excluding the top occupied bin.
inline Frame equalize(const Frame& in) {
  Frame out = in;
  for (int c = 0; c < Frame::kChannels; ++c) {
    std::array<long, 256> hist{};
    for (std::size_t i = static_cast<std::size_t>(c); i < in.pixels.size(); i += Frame::kChannels)
      ++hist[in.pixels[i]];
    long total = 0;
    int last = 0;
    for (int v = 0; v < 256; ++v) {
      total += hist[v];
      if (hist[v] > 0) last = v;
    }
    const long step = (total - hist[last]) / 255;
    if (step == 0) continue;
    std::array<std::uint8_t, 256> lut{};
    long n = step / 2;
    for (int v = 0; v < 256; ++v) {
      lut[v] = static_cast<std::uint8_t>(std::min<long>(n / step, 255));
      n += hist[v];
    }
    for (std::size_t i = static_cast<std::size_t>(c); i < in.pixels.size(); i += Frame::kChannels)
      out.pixels[i] = lut[in.pixels[i]];
  }
  return out;
}

/// Keeps the top `bits` bits of every value.
inline Frame posterize(const Frame& in, int bits) {
  if (bits < 1 || bits > 8) throw Error("posterize bits must be in [1, 8]");
  const auto mask = static_cast<std::uint8_t>(0xffu << (8 - bits));
  Frame out = in;
  for (auto& p : out.pixels) p = static_cast<std::uint8_t>(p & mask);
  return out;
}

/// Inverts every value at or above `threshold`; 256 leaves the frame as is.
inline Frame solarize(const Frame& in, int threshold) {
  if (threshold < 0 || threshold > 256) throw Error("solarize threshold must be in [0, 256]");
  Frame out = in;
  for (auto& p : out.pixels)
    if (p >= threshold) p = static_cast<std::uint8_t>(255 - p);
  return out;
}

}  // namespace drivenet::augment
