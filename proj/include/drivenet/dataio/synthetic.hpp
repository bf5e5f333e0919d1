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
#include <filesystem>
#include <random>
#include <string>

#include "drivenet/dataio/flow.hpp"
#include "drivenet/dataio/manifest.hpp"

namespace drivenet {

/// Desk-scale stand-in for recorded driving clips.
///
/// The inside view shows a bright gaze marker that drifts toward the side of
/// the upcoming maneuver (partial drift for lane changes, full drift for
/// turns, none for straight); the outside view shows a vertical lane line
/// moving the opposite way. Most of the drift happens in the last two
/// seconds, so truncated clips carry little signal.
struct SyntheticConfig {
  int n_clips = 500;
  std::uint64_t seed = 7;
  int frame_size = 64;
  double noise_sigma = 4.0;
  int n_drivers = 10;
};

namespace synth {

inline constexpr double kLaneChangeDrift = 0.16;  // fraction of frame width
inline constexpr double kTurnDrift = 0.36;
inline constexpr double kEarlyShare = 0.15;  // drift accumulated before the last 2 s
inline constexpr int kLateStart = kClipFrames - 1 - 2 * kFramesPerSecond;  // frame 8

/// Fraction of the final drift reached at frame t; 15% over the first
/// three seconds, the remaining 85% over the last two.
inline double drift_ramp(int t) {
  if (t <= kLateStart) return kEarlyShare * t / kLateStart;
  return kEarlyShare + (1.0 - kEarlyShare) * (t - kLateStart) / (kClipFrames - 1 - kLateStart);
}

inline double drift_fraction(ManeuverLabel l) {
  if (l == ManeuverLabel::go_straight) return 0.0;
  return lateral_sign(l) * (is_turn(l) ? kTurnDrift : kLaneChangeDrift);
}

struct ClipGeometry {
  double marker_x0;
  double marker_y;
  double line_x0;
  double drift_px;  // signed final displacement of the gaze marker
};

inline ClipGeometry sample_geometry(ManeuverLabel label, int size, Rng& rng) {
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  std::uniform_real_distribution<double> speed(0.85, 1.15);
  ClipGeometry g;
  g.marker_x0 = size * (0.5 + jitter(rng));
  g.marker_y = size * (0.4 + 0.6 * jitter(rng));
  g.line_x0 = size * (0.5 + jitter(rng));
  g.drift_px = size * drift_fraction(label) * speed(rng);
  return g;
}

inline void add_noise(Frame& f, double sigma, Rng& rng) {
  std::normal_distribution<double> noise(0.0, sigma);
  for (auto& p : f.pixels) p = clamp_u8(p + noise(rng));
}

inline Frame render_inside(const ClipGeometry& g, int t, int size, double sigma, Rng& rng) {
  const double mx = g.marker_x0 + g.drift_px * drift_ramp(t);
  const double s = 0.04 * size;
  Frame f(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double bg = 35.0 + 30.0 * x / size;
      const double dx = x - mx;
      const double dy = y - g.marker_y;
      const double blob = 190.0 * std::exp(-(dx * dx + dy * dy) / (2 * s * s));
      f.at(y, x, 0) = clamp_u8(bg + blob);
      f.at(y, x, 1) = clamp_u8(bg + 0.9 * blob);
      f.at(y, x, 2) = clamp_u8(bg + 0.6 * blob);
    }
  }
  add_noise(f, sigma, rng);
  return f;
}

inline Frame render_outside(const ClipGeometry& g, int t, int size, double sigma, Rng& rng) {
  const double lx = g.line_x0 - g.drift_px * drift_ramp(t);
  const double s = 0.025 * size;
  const int horizon = static_cast<int>(0.35 * size);
  Frame f(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double dx = x - lx;
      const double line = 170.0 * std::exp(-(dx * dx) / (2 * s * s));
      if (y < horizon) {
        f.at(y, x, 0) = clamp_u8(90 + line);
        f.at(y, x, 1) = clamp_u8(110 + line);
        f.at(y, x, 2) = clamp_u8(150 + line);
      } else {
        for (int c = 0; c < 3; ++c) f.at(y, x, c) = clamp_u8(60 + line);
      }
    }
  }
  add_noise(f, sigma, rng);
  return f;
}

inline std::string clip_name(int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "clip_%04d", i);
  return buf;
}

/// All four branches of clip `i`, without touching the filesystem.
inline Clip make_clip(const SyntheticConfig& cfg, int i) {
  Clip clip;
  clip.id = clip_name(i);
  clip.label = kAllLabels[static_cast<std::size_t>(i) % kNumClasses];
  char drv[32];
  std::snprintf(drv, sizeof drv, "driver_%02d", (i / static_cast<int>(kNumClasses)) % cfg.n_drivers);
  clip.driver_id = drv;

  auto rng = make_rng(cfg.seed, "synthetic", i);
  const auto geom = sample_geometry(clip.label, cfg.frame_size, rng);
  FrameSeq inside, outside;
  for (int t = 0; t < kClipFrames; ++t) {
    inside.push_back(render_inside(geom, t, cfg.frame_size, cfg.noise_sigma, rng));
    outside.push_back(render_outside(geom, t, cfg.frame_size, cfg.noise_sigma, rng));
  }
  clip.branches[BranchKind::inside_flow] = compute_flow_standin(inside);
  clip.branches[BranchKind::outside_flow] = compute_flow_standin(outside);
  clip.branches[BranchKind::inside_appearance] = std::move(inside);
  clip.branches[BranchKind::outside_appearance] = std::move(outside);
  return clip;
}

}  // namespace synth

/// Writes `cfg.n_clips` balanced clips under `out_dir` plus `manifest.csv`.
inline DatasetManifest generate_synthetic(const SyntheticConfig& cfg, const fs::path& out_dir) {
  if (cfg.n_clips < static_cast<int>(kNumClasses) || cfg.n_clips % static_cast<int>(kNumClasses) != 0)
    throw Error("n_clips must be a positive multiple of 5");
  if (cfg.frame_size < 16) throw Error("synthetic frame size must be at least 16");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw Error("cannot create output directory " + out_dir.string());

  DatasetManifest m;
  m.root = out_dir;
  for (int i = 0; i < cfg.n_clips; ++i) {
    const Clip clip = synth::make_clip(cfg, i);
    ManifestRecord r;
    r.clip_id = clip.id;
    r.label = clip.label;
    r.driver_id = clip.driver_id;
    for (auto b : kAllBranches) {
      const std::string rel = clip.id + "/" + std::string(to_string(b));
      const fs::path dir = out_dir / rel;
      fs::create_directories(dir, ec);
      if (ec) throw Error("cannot create directory " + dir.string());
      const auto& seq = clip.frames(b);
      for (std::size_t t = 0; t < seq.size(); ++t) write_png(dir / frame_filename(static_cast<int>(t)), seq[t]);
      r.branch_dirs[static_cast<int>(b)] = rel;
    }
    m.records.push_back(std::move(r));
  }
  write_manifest(out_dir / "manifest.csv", m);
  return m;
}

}  // namespace drivenet
