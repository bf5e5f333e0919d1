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
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "drivenet/dataio/manifest.hpp"

namespace drivenet {

namespace detail {

template <typename T>
void seeded_shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(i) - 1));
    std::swap(v[i - 1], v[j]);
  }
}

/// Clip ids per class, sorted by id then shuffled with a stream keyed by the
/// class so that one class's order never depends on another's size.
inline std::array<std::vector<std::string>, kNumClasses> shuffled_ids_by_class(
    const DatasetManifest& m, std::uint64_t seed, const char* purpose) {
  std::array<std::vector<std::string>, kNumClasses> by_class;
  for (const auto& r : m.records) by_class[index_of(r.label)].push_back(r.clip_id);
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    std::sort(by_class[c].begin(), by_class[c].end());
    auto rng = make_rng(seed, purpose, c);
    seeded_shuffle(by_class[c], rng);
  }
  return by_class;
}

}  // namespace detail

struct HoldoutSplit {
  DatasetManifest train;
  DatasetManifest test;
};

/// Stratified train/test split; `train_ratio` is the training fraction.
/// Per-class training counts are apportioned by largest remainder so the
/// total matches round(ratio * N).
inline HoldoutSplit holdout_split(const DatasetManifest& m, double train_ratio, std::uint64_t seed) {
  if (!(train_ratio > 0.0 && train_ratio < 1.0)) throw Error("split ratio must be in (0, 1)");
  m.validate();
  auto by_class = detail::shuffled_ids_by_class(m, seed, "holdout");

  std::array<std::size_t, kNumClasses> n_train{};
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto n = by_class[c].size();
    if (n == 0) continue;
    if (n < 2) throw Error("class too small to stratify: " + std::string(to_string(label_from_index(c))));
    const double exact = train_ratio * static_cast<double>(n);
    n_train[c] = static_cast<std::size_t>(std::floor(exact));
    remainders.emplace_back(exact - std::floor(exact), c);
    assigned += n_train[c];
  }
  const auto target = static_cast<std::size_t>(std::llround(train_ratio * static_cast<double>(m.size())));
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (const auto& [rem, c] : remainders) {
    if (assigned >= target) break;
    ++n_train[c];
    ++assigned;
  }
  std::set<std::string> train_ids;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto n = by_class[c].size();
    if (n == 0) continue;
    n_train[c] = std::max<std::size_t>(n_train[c], 1);
    train_ids.insert(by_class[c].begin(), by_class[c].begin() + static_cast<long>(n_train[c]));
  }
  HoldoutSplit out{m.subset(train_ids), DatasetManifest{m.root, {}}};
  for (const auto& r : m.records)
    if (!train_ids.count(r.clip_id)) out.test.records.push_back(r);
  return out;
}

struct FoldPlan {
  int k = 0;
  std::map<std::string, int> assignment;

  std::set<std::string> test_ids(int fold) const {
    std::set<std::string> ids;
    for (const auto& [id, f] : assignment)
      if (f == fold) ids.insert(id);
    return ids;
  }
  std::set<std::string> train_ids(int fold) const {
    std::set<std::string> ids;
    for (const auto& [id, f] : assignment)
      if (f != fold) ids.insert(id);
    return ids;
  }
  std::vector<std::size_t> fold_sizes() const {
    std::vector<std::size_t> sizes(static_cast<std::size_t>(k), 0);
    for (const auto& [id, f] : assignment) ++sizes[static_cast<std::size_t>(f)];
    return sizes;
  }
};

/// Round-robin assignment within each shuffled class; each class starts on
/// the fold after the previous class ended so fold sizes stay within one.
inline FoldPlan stratified_kfold(const DatasetManifest& m, int k, std::uint64_t seed) {
  if (k < 2) throw Error("k must be at least 2");
  m.validate();
  auto by_class = detail::shuffled_ids_by_class(m, seed, "kfold");
  FoldPlan plan;
  plan.k = k;
  std::size_t cursor = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const auto& ids = by_class[c];
    if (ids.empty()) continue;
    if (static_cast<int>(ids.size()) < k)
      throw Error("insufficient clips for stratification: " + std::string(to_string(label_from_index(c))));
    for (const auto& id : ids) plan.assignment[id] = static_cast<int>(cursor++ % static_cast<std::size_t>(k));
  }
  return plan;
}

}  // namespace drivenet
