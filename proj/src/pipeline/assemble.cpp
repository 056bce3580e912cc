// SPDX-License-Identifier: Apache-2.0
#include "segalign/pipeline/assemble.hpp"

#include <algorithm>
#include <optional>

#include "segalign/numerics/errors.hpp"

namespace segalign {

namespace {
void append(std::string& bucket, const std::string& text) {
  if (!bucket.empty()) bucket.push_back(' ');
  bucket += text;
}
}  // namespace

SegmentedReport assemble_segments(std::span<const Sentence> sentences,
                                  std::span<const std::vector<MotionSegment>> per_sentence) {
  if (sentences.size() != per_sentence.size()) {
    throw InvalidInput("assemble_segments: one segment list per sentence is required");
  }
  SegmentedReport out;
  std::optional<MotionSegment> current;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    std::vector<MotionSegment> named;
    for (MotionSegment s : per_sentence[i]) {
      if (s != MotionSegment::NoSegment && std::find(named.begin(), named.end(), s) == named.end()) {
        named.push_back(s);
      }
    }
    if (named.empty() && current) named.push_back(*current);
    if (named.empty()) {
      out.unassigned.push_back(i);
      append(out.unassigned_text, sentences[i].text);
      continue;
    }
    for (MotionSegment s : named) {
      append(out.segments[s], sentences[i].text);
      out.sentence_ids[s].push_back(i);
    }
    current = named.back();
  }
  return out;
}

}  // namespace segalign
