// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "segalign/model/config.hpp"

namespace segalign {

enum class BodyPart { Cervical, Lumbar };

std::string_view to_string(BodyPart b) noexcept;
BodyPart body_part_from_string(std::string_view s);

/// Task schema of a body part: cervical [3,3,2,2], lumbar [3,3,2].
MultiTaskSchema schema_for(BodyPart b);

enum class MotionSegment : std::uint8_t {
  C2C3, C3C4, C4C5, C5C6, C6C7, C7T1,
  L1L2, L2L3, L3L4, L4L5, L5S1,
  NoSegment,
};

inline constexpr std::size_t kRealSegmentCount = 11;

/// The 11 real segments in fixed order.
std::span<const MotionSegment> all_segments() noexcept;
std::span<const MotionSegment> segments_for(BodyPart b) noexcept;
BodyPart body_part_of(MotionSegment s);

/// Canonical name, e.g. "L5-S1"; the sentinel is "NoSegment".
std::string_view to_string(MotionSegment s) noexcept;
/// Exact canonical name lookup.
std::optional<MotionSegment> segment_from_string(std::string_view s) noexcept;

struct SegmentLevels {
  char upper_letter;  // 'C', 'T', 'L' or 'S'
  int upper_number;
  char lower_letter;
  int lower_number;
};

SegmentLevels levels(MotionSegment s);
/// Segment whose bounding levels are exactly these; none otherwise.
std::optional<MotionSegment> segment_from_levels(SegmentLevels l) noexcept;

}  // namespace segalign
