// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string_view>

#include "segalign/corpus/motion_segment.hpp"

namespace segalign {

/// Maps a level mention to its motion segment. Accepts, case-insensitively
/// and ignoring whitespace: "L2-L3", "L2-3", "L23", "L2L3", any single
/// separator character ("L2_L3", "L2/L3", "L2@L3"), a lost upper digit
/// ("L@L3"), and cross-boundary forms ("C7T1", "L5-S1"). Leading and trailing
/// punctuation is ignored. Only the 11 adjacent pairs map; anything else
/// yields none.
std::optional<MotionSegment> normalize_segment_mention(std::string_view window);

}  // namespace segalign
