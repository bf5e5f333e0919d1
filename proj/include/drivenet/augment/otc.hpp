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

#include "drivenet/augment/geometric.hpp"

namespace drivenet::augment {

inline constexpr TranslateParams kOtcShift{4, 4};

/// Test-time variants: original, translated by a fixed (4, 4) shift, and a
/// cutout of the appearance branches. Labels are never changed.
inline std::array<Clip, 3> otc_variants(const Clip& clip, Rng& rng, const CutoutParams& cut = {}) {
  std::array<Clip, 3> v{clip, clip, clip};
  for (auto& [kind, seq] : v[1].branches) seq = translate(seq, kOtcShift);
  for (auto& [kind, seq] : v[2].branches)
    if (!is_flow(kind)) seq = cutout(seq, cut, rng);
  return v;
}

}  // namespace drivenet::augment
