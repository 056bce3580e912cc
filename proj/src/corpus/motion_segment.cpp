// SPDX-License-Identifier: Apache-2.0
#include "segalign/corpus/motion_segment.hpp"

#include <cctype>
#include <string>

#include "segalign/numerics/errors.hpp"

namespace segalign {

namespace {

constexpr std::array<MotionSegment, kRealSegmentCount> kSegments = {
    MotionSegment::C2C3, MotionSegment::C3C4, MotionSegment::C4C5, MotionSegment::C5C6,
    MotionSegment::C6C7, MotionSegment::C7T1, MotionSegment::L1L2, MotionSegment::L2L3,
    MotionSegment::L3L4, MotionSegment::L4L5, MotionSegment::L5S1};

constexpr std::array<std::string_view, kRealSegmentCount + 1> kNames = {
    "C2-C3", "C3-C4", "C4-C5", "C5-C6", "C6-C7", "C7-T1",
    "L1-L2", "L2-L3", "L3-L4", "L4-L5", "L5-S1", "NoSegment"};

constexpr std::array<SegmentLevels, kRealSegmentCount> kLevels = {{
    {'C', 2, 'C', 3}, {'C', 3, 'C', 4}, {'C', 4, 'C', 5}, {'C', 5, 'C', 6},
    {'C', 6, 'C', 7}, {'C', 7, 'T', 1}, {'L', 1, 'L', 2}, {'L', 2, 'L', 3},
    {'L', 3, 'L', 4}, {'L', 4, 'L', 5}, {'L', 5, 'S', 1},
}};

}  // namespace

std::string_view to_string(BodyPart b) noexcept {
  return b == BodyPart::Cervical ? "cervical" : "lumbar";
}

BodyPart body_part_from_string(std::string_view s) {
  if (s == "cervical") return BodyPart::Cervical;
  if (s == "lumbar") return BodyPart::Lumbar;
  throw InvalidInput("unknown body part '" + std::string(s) + "' (expected cervical or lumbar)");
}

MultiTaskSchema schema_for(BodyPart b) {
  return b == BodyPart::Cervical ? MultiTaskSchema::cervical() : MultiTaskSchema::lumbar();
}

std::span<const MotionSegment> all_segments() noexcept { return kSegments; }

std::span<const MotionSegment> segments_for(BodyPart b) noexcept {
  std::span<const MotionSegment> all(kSegments);
  return b == BodyPart::Cervical ? all.first(6) : all.subspan(6);
}

BodyPart body_part_of(MotionSegment s) {
  if (s == MotionSegment::NoSegment) throw InvalidInput("the sentinel has no body part");
  return static_cast<int>(s) < 6 ? BodyPart::Cervical : BodyPart::Lumbar;
}

std::string_view to_string(MotionSegment s) noexcept { return kNames[static_cast<std::size_t>(s)]; }

std::optional<MotionSegment> segment_from_string(std::string_view s) noexcept {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == s) return static_cast<MotionSegment>(i);
  }
  return std::nullopt;
}

SegmentLevels levels(MotionSegment s) {
  if (s == MotionSegment::NoSegment) throw InvalidInput("the sentinel has no levels");
  return kLevels[static_cast<std::size_t>(s)];
}

std::optional<MotionSegment> segment_from_levels(SegmentLevels l) noexcept {
  const auto up = [](char c) { return static_cast<char>(std::toupper(static_cast<unsigned char>(c))); };
  for (std::size_t i = 0; i < kLevels.size(); ++i) {
    const SegmentLevels& k = kLevels[i];
    if (k.upper_letter == up(l.upper_letter) && k.upper_number == l.upper_number &&
        k.lower_letter == up(l.lower_letter) && k.lower_number == l.lower_number) {
      return kSegments[i];
    }
  }
  return std::nullopt;
}

}  // namespace segalign
