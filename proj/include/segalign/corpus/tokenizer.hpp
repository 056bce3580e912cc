// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace segalign {

struct Token {
  std::string text;  // lowercased
  std::size_t begin = 0;
  std::size_t end = 0;  // byte offsets into the source
};

/// Word-level tokenizer: runs of ASCII letters/digits form one token, every
/// other non-space ASCII byte is its own token, runs of non-ASCII bytes stay
/// together. Output is lowercased.
std::vector<Token> tokenize(std::string_view text);

}  // namespace segalign
