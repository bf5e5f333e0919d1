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
#include <array>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "drivenet/dataio/clip.hpp"
#include "drivenet/dataio/image_io.hpp"
#include "drivenet/dataio/sampling.hpp"

namespace drivenet {

namespace fs = std::filesystem;

inline constexpr const char* kManifestHeader =
    "clip_id,label,driver_id,inside_dir,outside_dir,inside_flow_dir,outside_flow_dir";

struct ManifestRecord {
  std::string clip_id;
  ManeuverLabel label = ManeuverLabel::go_straight;
  std::string driver_id;
  /// Branch directories relative to the manifest's root; empty when absent.
  std::array<std::string, 4> branch_dirs;

  const std::string& dir(BranchKind b) const { return branch_dirs[static_cast<int>(b)]; }
  bool has(BranchKind b) const { return !dir(b).empty(); }
  bool operator==(const ManifestRecord&) const = default;
};

struct DatasetManifest {
  fs::path root;
  std::vector<ManifestRecord> records;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  std::array<std::size_t, kNumClasses> class_counts() const {
    std::array<std::size_t, kNumClasses> counts{};
    for (const auto& r : records) ++counts[index_of(r.label)];
    return counts;
  }

  /// Records restricted to `ids`, keeping manifest order.
  DatasetManifest subset(const std::set<std::string>& ids) const {
    DatasetManifest out{root, {}};
    for (const auto& r : records)
      if (ids.count(r.clip_id)) out.records.push_back(r);
    return out;
  }

  void validate() const {
    std::set<std::string> seen;
    for (const auto& r : records)
      if (!seen.insert(r.clip_id).second) throw Error("duplicate clip id in manifest: " + r.clip_id);
  }

  void require_branches(const std::vector<BranchKind>& needed) const {
    for (const auto& r : records)
      for (auto b : needed)
        if (!r.has(b))
          throw Error("clip " + r.clip_id + " has no files for branch " + std::string(to_string(b)));
  }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace detail

inline DatasetManifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path.string());
  DatasetManifest m;
  m.root = path.parent_path();
  std::string line;
  if (!std::getline(in, line)) throw Error("empty manifest " + path.string());
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kManifestHeader) throw Error("manifest " + path.string() + ": unexpected header");
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (cells.size() != 7)
      throw Error("manifest " + path.string() + ":" + std::to_string(lineno) + ": expected 7 fields");
    ManifestRecord r;
    r.clip_id = cells[0];
    try {
      r.label = parse_label(cells[1]);
    } catch (const Error& e) {
      throw Error("manifest " + path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    r.driver_id = cells[2];
    for (int b = 0; b < 4; ++b) r.branch_dirs[b] = cells[3 + b];
    m.records.push_back(std::move(r));
  }
  m.validate();
  return m;
}

inline void write_manifest(const fs::path& path, const DatasetManifest& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write manifest " + path.string());
  out << kManifestHeader << '\n';
  for (const auto& r : m.records) {
    out << r.clip_id << ',' << to_string(r.label) << ',' << r.driver_id;
    for (const auto& d : r.branch_dirs) out << ',' << d;
    out << '\n';
  }
  if (!out) throw Error("failed writing manifest " + path.string());
}

inline std::string frame_filename(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "f%03d.png", index);
  return buf;
}

/// Reads every image in a branch directory in name order and samples the
/// sequence down to `n` frames.
inline FrameSeq load_branch_frames(const fs::path& dir, int n = kClipFrames) {
  if (!fs::is_directory(dir)) throw Error("missing branch directory " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".png") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (static_cast<int>(files.size()) < n) throw Error("clip too short: " + dir.string());
  FrameSeq raw;
  raw.reserve(files.size());
  for (const auto& f : files) raw.push_back(read_png(f));
  for (const auto& f : raw)
    if (!f.same_shape(raw.front())) throw Error("frame dimensions differ in " + dir.string());
  return static_cast<int>(raw.size()) == n ? raw : sample_frames(raw, n);
}

inline Clip load_clip(const DatasetManifest& m, const ManifestRecord& r,
                      const std::vector<BranchKind>& branches) {
  Clip clip;
  clip.id = r.clip_id;
  clip.label = r.label;
  clip.driver_id = r.driver_id;
  for (auto b : branches) {
    if (!r.has(b)) throw Error("clip " + r.clip_id + " has no files for branch " + std::string(to_string(b)));
    clip.branches.emplace(b, load_branch_frames(m.root / r.dir(b)));
  }
  validate_clip(clip);
  return clip;
}

}  // namespace drivenet
