// SPDX-License-Identifier: Apache-2.0
#include "segalign/pipeline/normalize.hpp"

#include <cctype>
#include <string>

namespace segalign {

namespace {

bool is_level_letter(char c) { return c == 'c' || c == 't' || c == 'l' || c == 's'; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }
bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string canonical_chars(std::string_view w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto c = static_cast<unsigned char>(w[i]);
    // En and em dashes (UTF-8 E2 80 93 / E2 80 94).
    if (c == 0xE2 && i + 2 < w.size() && static_cast<unsigned char>(w[i + 1]) == 0x80 &&
        (static_cast<unsigned char>(w[i + 2]) == 0x93 || static_cast<unsigned char>(w[i + 2]) == 0x94)) {
      s.push_back('-');
      i += 2;
      continue;
    }
    if (std::isspace(c)) continue;
    s.push_back(static_cast<char>(std::tolower(c)));
  }
  std::size_t b = 0, e = s.size();
  while (b < e && !is_alnum(s[b])) ++b;
  while (e > b && !is_alnum(s[e - 1])) --e;
  return s.substr(b, e - b);
}

}  // namespace

std::optional<MotionSegment> normalize_segment_mention(std::string_view window) {
  const std::string s = canonical_chars(window);
  if (s.size() < 3 || !is_level_letter(s[0])) return std::nullopt;
  const char upper = s[0];

  // "l@l3": the upper digit was lost; adjacency fixes it.
  if (s.size() == 4 && !is_alnum(s[1]) && s[2] == upper && is_digit(s[3])) {
    const int lower = s[3] - '0';
    return segment_from_levels({upper, lower - 1, upper, lower});
  }

  std::size_t i = 1;
  if (!is_digit(s[i])) return std::nullopt;
  const int n1 = s[i++] - '0';

  // Collapsed "l23".
  if (i + 1 == s.size() && is_digit(s[i])) {
    return segment_from_levels({upper, n1, upper, s[i] - '0'});
  }
  if (i < s.size() && !is_alnum(s[i])) ++i;  // one separator of any kind
  char lower_letter = upper;
  bool explicit_letter = false;
  if (i < s.size() && is_level_letter(s[i])) {
    lower_letter = s[i++];
    explicit_letter = true;
  }
  if (i + 1 != s.size() || !is_digit(s[i])) return std::nullopt;
  const int n2 = s[i] - '0';
  if (!explicit_letter && n2 <= n1) return std::nullopt;
  return segment_from_levels({upper, n1, lower_letter, n2});
}

}  // namespace segalign
