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

#include <filesystem>
#include <random>
#include <string>

#include "drivenet/dataio/clip.hpp"

namespace drivenet::fixtures {

inline Frame random_frame(int h, int w, Rng& rng) {
  Frame f(h, w);
  for (auto& p : f.pixels) p = static_cast<std::uint8_t>(rng() & 0xff);
  return f;
}

inline FrameSeq random_seq(int n, int h, int w, Rng& rng) {
  FrameSeq s;
  for (int i = 0; i < n; ++i) s.push_back(random_frame(h, w, rng));
  return s;
}

/// Clip with all four branches filled with noise.
inline Clip random_clip(const std::string& id, ManeuverLabel label, int size, Rng& rng, int frames = kClipFrames) {
  Clip c;
  c.id = id;
  c.label = label;
  c.driver_id = "d0";
  for (auto b : kAllBranches) c.branches[b] = random_seq(frames, size, size, rng);
  return c;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("drivenet_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace drivenet::fixtures
