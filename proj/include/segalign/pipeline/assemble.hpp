// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "segalign/corpus/motion_segment.hpp"
#include "segalign/pipeline/sentences.hpp"

namespace segalign {

struct SegmentedReport {
  std::string report_id;
  /// Concatenated sentence text per segment, document order, space-joined.
  std::map<MotionSegment, std::string> segments;
  std::map<MotionSegment, std::vector<std::size_t>> sentence_ids;
  /// Sentences before the first recognized segment.
  std::vector<std::size_t> unassigned;
  std::string unassigned_text;

  /// The report had no recognizable motion segment at all.
  bool no_segments_found() const noexcept { return segments.empty(); }
};

/// A sentence naming segments joins each of their buckets; a sentence naming
/// none joins the most recently named segment; with no earlier segment it is
/// unassigned. The sentinel in `per_sentence` counts as no segment.
SegmentedReport assemble_segments(std::span<const Sentence> sentences,
                                  std::span<const std::vector<MotionSegment>> per_sentence);

}  // namespace segalign
