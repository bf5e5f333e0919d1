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
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace drivenet {

/// Every recoverable failure in the library is reported as an Error whose
/// message is a short, stable, machine-greppable phrase.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised for malformed configuration; carries the offending key or line.
class ConfigError : public Error {
public:
  using Error::Error;
};

using Rng = std::mt19937_64;

namespace detail {

inline void append_seed_words(std::vector<std::uint32_t>& words, std::uint64_t v) {
  words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
  words.push_back(static_cast<std::uint32_t>(v >> 32));
}

inline void append_seed_words(std::vector<std::uint32_t>& words, std::string_view s) {
  words.push_back(static_cast<std::uint32_t>(s.size()));
  for (unsigned char c : s) words.push_back(c);
}

inline void append_seed_words(std::vector<std::uint32_t>& words, const std::string& s) {
  append_seed_words(words, std::string_view(s));
}

inline void append_seed_words(std::vector<std::uint32_t>& words, const char* s) {
  append_seed_words(words, std::string_view(s));
}

template <typename I>
  requires std::is_integral_v<I>
void append_seed_words(std::vector<std::uint32_t>& words, I v) {
  append_seed_words(words, static_cast<std::uint64_t>(static_cast<std::int64_t>(v)));
}

}  // namespace detail

/// Independent rng stream keyed by a seed plus any mix of integers and
/// strings, e.g. make_rng(seed, "augment", clip_id, epoch).
template <typename... Keys>
Rng make_rng(std::uint64_t seed, const Keys&... keys) {
  std::vector<std::uint32_t> words;
  detail::append_seed_words(words, seed);
  (detail::append_seed_words(words, keys), ...);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

/// Uniform integer in [lo, hi], independent of the standard library's
/// distribution implementation.
inline int uniform_int(Rng& rng, int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(rng() % span);
}

/// Uniform double in [0, 1).
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace drivenet
