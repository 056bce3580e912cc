// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "segalign/pipeline/sentences.hpp"

namespace segalign::oracle {

// Gaps between sentences are whitespace; copying gaps and sentence texts by
// offset rebuilds the report.
inline bool round_trips(std::string_view text, const std::vector<Sentence>& sentences) {
  std::string rebuilt;
  std::size_t cursor = 0;
  for (const auto& s : sentences) {
    if (s.begin < cursor || s.end > text.size() || text.substr(s.begin, s.end - s.begin) != s.text) return false;
    const std::string_view gap = text.substr(cursor, s.begin - cursor);
    if (gap.find_first_not_of(" \t\r\n") != std::string_view::npos) return false;
    rebuilt += gap;
    rebuilt += s.text;
    cursor = s.end;
  }
  const std::string_view tail = text.substr(cursor);
  if (tail.find_first_not_of(" \t\r\n") != std::string_view::npos) return false;
  rebuilt += tail;
  return rebuilt == text;
}

}  // namespace segalign::oracle
