// SPDX-License-Identifier: Apache-2.0
#include "segalign/corpus/tokenizer.hpp"

#include <cctype>

namespace segalign {

namespace {

enum class CharClass { Space, Word, NonAscii, Symbol };

CharClass classify(unsigned char c) {
  if (c >= 0x80) return CharClass::NonAscii;
  if (std::isspace(c)) return CharClass::Space;
  if (std::isalnum(c)) return CharClass::Word;
  return CharClass::Symbol;
}

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const CharClass cls = classify(static_cast<unsigned char>(text[i]));
    if (cls == CharClass::Space) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    if (cls != CharClass::Symbol) {
      while (j < text.size() && classify(static_cast<unsigned char>(text[j])) == cls) ++j;
    }
    Token t;
    t.begin = i;
    t.end = j;
    t.text.reserve(j - i);
    for (std::size_t k = i; k < j; ++k) {
      t.text.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[k]))));
    }
    out.push_back(std::move(t));
    i = j;
  }
  return out;
}

}  // namespace segalign
