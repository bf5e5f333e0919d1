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
#include <cstddef>
#include <string>
#include <string_view>

#include "drivenet/common.hpp"

namespace drivenet {

enum class ManeuverLabel : int {
  go_straight = 0,
  left_lane_change = 1,
  left_turn = 2,
  right_lane_change = 3,
  right_turn = 4,
};

inline constexpr std::size_t kNumClasses = 5;

inline constexpr std::array<ManeuverLabel, kNumClasses> kAllLabels = {
    ManeuverLabel::go_straight, ManeuverLabel::left_lane_change, ManeuverLabel::left_turn,
    ManeuverLabel::right_lane_change, ManeuverLabel::right_turn};

inline constexpr std::size_t index_of(ManeuverLabel l) { return static_cast<std::size_t>(l); }

inline ManeuverLabel label_from_index(std::size_t i) {
  if (i >= kNumClasses) throw Error("label index out of range: " + std::to_string(i));
  return kAllLabels[i];
}

inline constexpr std::string_view to_string(ManeuverLabel l) {
  switch (l) {
    case ManeuverLabel::go_straight: return "go_straight";
    case ManeuverLabel::left_lane_change: return "left_lane_change";
    case ManeuverLabel::left_turn: return "left_turn";
    case ManeuverLabel::right_lane_change: return "right_lane_change";
    case ManeuverLabel::right_turn: return "right_turn";
  }
  return "?";
}

inline ManeuverLabel parse_label(std::string_view s) {
  for (auto l : kAllLabels)
    if (to_string(l) == s) return l;
  throw Error("unknown maneuver label: " + std::string(s));
}

/// Label seen after a horizontal flip: left and right swap, straight is fixed.
inline constexpr ManeuverLabel mirror(ManeuverLabel l) {
  switch (l) {
    case ManeuverLabel::left_lane_change: return ManeuverLabel::right_lane_change;
    case ManeuverLabel::right_lane_change: return ManeuverLabel::left_lane_change;
    case ManeuverLabel::left_turn: return ManeuverLabel::right_turn;
    case ManeuverLabel::right_turn: return ManeuverLabel::left_turn;
    case ManeuverLabel::go_straight: return ManeuverLabel::go_straight;
  }
  return l;
}

/// -1 for left maneuvers, +1 for right, 0 for straight.
inline constexpr int lateral_sign(ManeuverLabel l) {
  switch (l) {
    case ManeuverLabel::left_lane_change:
    case ManeuverLabel::left_turn: return -1;
    case ManeuverLabel::right_lane_change:
    case ManeuverLabel::right_turn: return 1;
    default: return 0;
  }
}

inline constexpr bool is_turn(ManeuverLabel l) {
  return l == ManeuverLabel::left_turn || l == ManeuverLabel::right_turn;
}

}  // namespace drivenet
