// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace segalign {

/// Token → id map. Ids are dense; PAD, UNK, CLS, SEP occupy 0..3.
class Vocab {
 public:
  Vocab();
  /// Specials followed by `tokens` in the given order (duplicates rejected).
  explicit Vocab(std::vector<std::string> tokens);

  std::size_t size() const noexcept { return tokens_.size(); }
  /// Unknown tokens map to UNK.
  int id(std::string_view token) const;
  const std::string& token(int id) const;
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  friend bool operator==(const Vocab& a, const Vocab& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

/// Tokens seen at least `min_count` times, sorted bytewise after the specials.
Vocab build_vocab(std::span<const std::string> texts, std::size_t min_count);

struct EncodedText {
  std::vector<int> ids;   // length max_len
  std::vector<int> mask;  // 1 for CLS and real tokens, 0 for PAD
};

/// [CLS] + token ids, truncated to max_len total, PAD-filled to max_len.
EncodedText encode_segment_text(std::string_view text, const Vocab& vocab, std::size_t max_len);
/// Same ids without padding.
std::vector<int> encode_tokens(std::string_view text, const Vocab& vocab, std::size_t max_len);

void to_json(nlohmann::json& j, const Vocab& v);
void from_json(const nlohmann::json& j, Vocab& v);
void save_vocab(const std::filesystem::path& path, const Vocab& v);
Vocab load_vocab(const std::filesystem::path& path);

}  // namespace segalign
