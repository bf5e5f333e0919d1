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

#include "drivenet/net/conv.hpp"

namespace drivenet::net {

struct DropBlockParams {
  int block_size = 5;
  double keep_prob = 0.9;

  void validate(int h, int w) const {
    if (block_size < 1 || block_size % 2 == 0) throw Error("dropblock block size must be odd");
    if (block_size > std::min(h, w)) throw Error("dropblock block size exceeds feature map");
    if (!(keep_prob > 0.0 && keep_prob <= 1.0)) throw Error("dropblock keep_prob must be in (0, 1]");
  }

  /// Seed rate that makes the expected dropped fraction about 1 - keep_prob.
  double gamma(int h, int w) const {
    const double valid = static_cast<double>(h - block_size + 1) * (w - block_size + 1);
    return (1.0 - keep_prob) / (block_size * block_size) * (static_cast<double>(h) * w) / valid;
  }
};

/// Multiplicative mask already scaled by total / kept; identity when the
/// mask is empty.
template <typename T>
struct DropBlockMask {
  Mat<T> scale;  // C x (h*w); empty means identity
  bool identity() const { return scale.size() == 0; }
};

/// Samples seeds over positions where a full block fits, zeros the
/// block_size x block_size square below-right of each seed, and rescales
/// the survivors so the map's total mass is preserved in expectation.
template <typename T>
DropBlockMask<T> sample_dropblock_mask(Eigen::Index channels, int h, int w, const DropBlockParams& p, Rng& rng) {
  p.validate(h, w);
  DropBlockMask<T> mask;
  if (p.keep_prob >= 1.0) return mask;
  const double gamma = p.gamma(h, w);
  Mat<T> keep = Mat<T>::Ones(channels, h * w);
  const int seed_h = h - p.block_size + 1;
  const int seed_w = w - p.block_size + 1;
  for (Eigen::Index c = 0; c < channels; ++c)
    for (int y = 0; y < seed_h; ++y)
      for (int x = 0; x < seed_w; ++x)
        if (uniform01(rng) < gamma)
          for (int i = 0; i < p.block_size; ++i)
            for (int j = 0; j < p.block_size; ++j) keep(c, (y + i) * w + (x + j)) = T(0);
  const T kept = keep.sum();
  if (kept > T(0)) keep *= static_cast<T>(keep.size()) / kept;
  mask.scale = std::move(keep);
  return mask;
}

template <typename T>
FeatureMap<T> apply_dropblock(const FeatureMap<T>& in, const DropBlockMask<T>& mask) {
  if (mask.identity()) return in;
  FeatureMap<T> out = in;
  out.data = in.data.cwiseProduct(mask.scale);
  return out;
}

/// Training mode samples a fresh mask; evaluation mode returns the input.
template <typename T>
FeatureMap<T> dropblock(const FeatureMap<T>& in, const DropBlockParams& p, bool training, Rng& rng,
                        DropBlockMask<T>* mask_out = nullptr) {
  p.validate(in.height, in.width);
  DropBlockMask<T> mask;
  if (training) mask = sample_dropblock_mask<T>(in.channels(), in.height, in.width, p, rng);
  auto out = apply_dropblock(in, mask);
  if (mask_out) *mask_out = std::move(mask);
  return out;
}

}  // namespace drivenet::net
