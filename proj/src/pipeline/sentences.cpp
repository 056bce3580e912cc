// SPDX-License-Identifier: Apache-2.0
#include "segalign/pipeline/sentences.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace segalign {

namespace {

constexpr std::array<std::string_view, 13> kAbbreviations = {
    "dr", "mr", "mrs", "ms", "vs", "approx", "e.g", "i.e", "fig", "no", "st", "cf", "al"};

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

// Word immediately before position `dot`, including inner dots ("e.g").
std::string_view word_before(std::string_view text, std::size_t dot) {
  std::size_t b = dot;
  while (b > 0) {
    const char c = text[b - 1];
    if (std::isalnum(static_cast<unsigned char>(c)) || (c == '.' && b >= 2 && std::isalnum(static_cast<unsigned char>(text[b - 2])))) {
      --b;
    } else {
      break;
    }
  }
  return text.substr(b, dot - b);
}

bool guarded(std::string_view text, std::size_t dot) {
  const std::string_view word = word_before(text, dot);
  if (word.empty()) return false;
  std::string lower(word);
  for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (std::find(kAbbreviations.begin(), kAbbreviations.end(), lower) != kAbbreviations.end()) {
    return true;
  }
  // "3. L3-L4: ..." list numbers at the start of a line.
  if (std::all_of(word.begin(), word.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    std::size_t b = dot - word.size();
    while (b > 0 && text[b - 1] != '\n' && is_space(text[b - 1])) --b;
    return b == 0 || text[b - 1] == '\n';
  }
  return false;
}

}  // namespace

std::vector<Sentence> split_sentences(std::string_view text) {
  std::vector<Sentence> out;
  std::size_t start = std::string_view::npos;  // first non-space of the open sentence
  const auto close = [&](std::size_t end) {
    if (start == std::string_view::npos) return;
    while (end > start && is_space(text[end - 1])) --end;
    if (end > start) out.push_back({start, end, std::string(text.substr(start, end - start))});
    start = std::string_view::npos;
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      close(i);
      continue;
    }
    if (start == std::string_view::npos) {
      if (is_space(c)) continue;
      start = i;
    }
    if (c == '.' || c == '!' || c == '?') {
      std::size_t j = i + 1;
      while (j < text.size() && (text[j] == ')' || text[j] == '"' || text[j] == '\'')) ++j;
      const bool boundary = j == text.size() || is_space(text[j]);
      if (boundary && !(c == '.' && guarded(text, i))) {
        close(j);
        i = j - 1;
      }
    }
  }
  close(text.size());
  return out;
}

}  // namespace segalign
