// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "segalign/corpus/motion_segment.hpp"
#include "segalign/corpus/tokenizer.hpp"
#include "segalign/corpus/vocab.hpp"
#include "segalign/model/parameters.hpp"

namespace segalign {

inline constexpr int kOtherTag = 0;
inline constexpr int kLocationTag = 1;

struct LocationWindow {
  std::size_t begin = 0;  // byte offsets into the tagged text
  std::size_t end = 0;
  std::optional<MotionSegment> segment;
};

struct TaggedSentence {
  std::vector<Token> tokens;
  std::vector<int> tags;  // one per token
  std::vector<LocationWindow> windows;
};

/// Contiguous Location runs as windows, each normalized.
std::vector<LocationWindow> location_windows(std::string_view text, std::span<const Token> tokens,
                                             std::span<const int> tags);

/// Eval-mode argmax tags for each text, batched. Tokens past the model's
/// max_seq_len are tagged Other.
std::vector<TaggedSentence> tag_sentences(const ParameterStore& segmenter, const Vocab& vocab,
                                          std::span<const std::string_view> texts);

TaggedSentence tag_sentence_locations(const ParameterStore& segmenter, const Vocab& vocab,
                                      std::string_view sentence);

}  // namespace segalign
