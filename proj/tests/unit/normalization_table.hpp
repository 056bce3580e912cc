// SPDX-License-Identifier: Apache-2.0
// Hand-written mention variants and the segment each must map to.
#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "segalign/corpus/motion_segment.hpp"

namespace segalign::oracle {

struct MentionCase {
  std::string_view text;
  std::optional<MotionSegment> expect;
};

inline std::vector<MentionCase> mention_cases() {
  using S = MotionSegment;
  return {
      {"L2-L3", S::L2L3},     {"l2-l3", S::L2L3},       {"L23", S::L2L3},
      {"L2L3", S::L2L3},      {"L@L3", S::L2L3},        {"L2_L3", S::L2L3},
      {"L2/L3", S::L2L3},     {"L2 - L3", S::L2L3},     {"L2 -L3", S::L2L3},
      {"L2@L3", S::L2L3},     {"L2~L3", S::L2L3},       {"L2-3", S::L2L3},
      {"L 2-3", S::L2L3},     {"C2-3", S::C2C3},        {"C2-C3", S::C2C3},
      {"C23", S::C2C3},       {"C7-T1", S::C7T1},       {"C7T1", S::C7T1},
      {"c7t1", S::C7T1},      {"C7 - T1", S::C7T1},     {"C7/T1", S::C7T1},
      {"L5-S1", S::L5S1},     {"L5S1", S::L5S1},        {"L5/S1", S::L5S1},
      {"L5_S1", S::L5S1},     {"l5-s1", S::L5S1},       {"L5 @ S1", S::L5S1},
      {"C6-7", S::C6C7},      {"L4\xE2\x80\x93L5", S::L4L5},
      {"L4-L5:", S::L4L5},    {"(L3-L4)", S::L3L4},     {"L1-2", S::L1L2},
      {"L12", S::L1L2},       {"C3C4", S::C3C4},        {"C4_C5", S::C4C5},
      {"C5@C6", S::C5C6},     {"c6/c7", S::C6C7},       {"C@C4", S::C3C4},
      {"L @ L5", S::L4L5},    {"L45", S::L4L5},         {"L3.L4", S::L3L4},
      {"L24", std::nullopt},  {"T1-T2", std::nullopt},  {"L5-L6", std::nullopt},
      {"C1-C2", std::nullopt}, {"C7-C8", std::nullopt}, {"L0-L1", std::nullopt},
      {"L2", std::nullopt},   {"", std::nullopt},       {"disc", std::nullopt},
      {"L2-L3-L4", std::nullopt}, {"S1-S2", std::nullopt}, {"C7-1", std::nullopt},
      {"L5-1", std::nullopt}, {"L2--L3", std::nullopt}, {"T12-L1", std::nullopt},
      {"L3-L2", std::nullopt}, {"LL3", std::nullopt},   {"L2-C3", std::nullopt},
      {"C2-L3", std::nullopt}, {"L56", std::nullopt},   {"L@L1", std::nullopt},
      {"T2", std::nullopt},   {"L1 level", std::nullopt},
  };
}

}  // namespace segalign::oracle
