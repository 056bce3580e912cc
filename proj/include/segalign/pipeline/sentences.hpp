// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace segalign {

struct Sentence {
  std::size_t begin = 0;  // byte offsets into the report, whitespace-trimmed
  std::size_t end = 0;
  std::string text;
  friend bool operator==(const Sentence&, const Sentence&) = default;
};

/// Rule splitter: breaks after '.', '!' or '?' when followed by whitespace or
/// the end of text, and at every newline. A terminator does not split after a
/// guarded abbreviation (dr, vs, approx, e.g., ...) or after a list number at
/// the start of a line. Only whitespace lies between sentences.
std::vector<Sentence> split_sentences(std::string_view text);

}  // namespace segalign
