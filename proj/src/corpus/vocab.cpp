// SPDX-License-Identifier: Apache-2.0
#include "segalign/corpus/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "segalign/corpus/tokenizer.hpp"
#include "segalign/model/config.hpp"
#include "segalign/numerics/errors.hpp"

namespace segalign {

namespace {
const std::vector<std::string> kSpecials = {"[PAD]", "[UNK]", "[CLS]", "[SEP]"};
}

Vocab::Vocab() : Vocab(std::vector<std::string>{}) {}

Vocab::Vocab(std::vector<std::string> tokens) {
  tokens_ = kSpecials;
  tokens_.insert(tokens_.end(), std::make_move_iterator(tokens.begin()),
                 std::make_move_iterator(tokens.end()));
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<int>(i)).second) {
      throw InvalidInput("vocab: duplicate token '" + tokens_[i] + "'");
    }
  }
}

int Vocab::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? special_tokens::kUnk : it->second;
}

const std::string& Vocab::token(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= tokens_.size()) {
    throw InvalidInput("vocab: id " + std::to_string(id) + " out of range");
  }
  return tokens_[static_cast<std::size_t>(id)];
}

Vocab build_vocab(std::span<const std::string> texts, std::size_t min_count) {
  std::map<std::string, std::size_t> counts;
  for (const auto& text : texts) {
    for (auto& t : tokenize(text)) ++counts[std::move(t.text)];
  }
  std::vector<std::string> kept;
  for (auto& [tok, n] : counts) {
    if (n >= min_count && std::find(kSpecials.begin(), kSpecials.end(), tok) == kSpecials.end()) {
      kept.push_back(tok);
    }
  }
  return Vocab(std::move(kept));
}

std::vector<int> encode_tokens(std::string_view text, const Vocab& vocab, std::size_t max_len) {
  if (max_len < 2) throw InvalidInput("encode: max_len must be at least 2");
  std::vector<int> ids{special_tokens::kCls};
  for (const auto& t : tokenize(text)) {
    if (ids.size() >= max_len) break;
    ids.push_back(vocab.id(t.text));
  }
  return ids;
}

EncodedText encode_segment_text(std::string_view text, const Vocab& vocab, std::size_t max_len) {
  EncodedText out;
  out.ids = encode_tokens(text, vocab, max_len);
  out.mask.assign(out.ids.size(), 1);
  out.ids.resize(max_len, special_tokens::kPad);
  out.mask.resize(max_len, 0);
  return out;
}

void to_json(nlohmann::json& j, const Vocab& v) {
  j = {{"format", "segalign-vocab/1"}, {"tokens", v.tokens()}};
}

void from_json(const nlohmann::json& j, Vocab& v) {
  auto tokens = j.at("tokens").get<std::vector<std::string>>();
  if (tokens.size() < kSpecials.size() ||
      !std::equal(kSpecials.begin(), kSpecials.end(), tokens.begin())) {
    throw InvalidInput("vocab: special tokens missing or out of order");
  }
  tokens.erase(tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(kSpecials.size()));
  v = Vocab(std::move(tokens));
}

void save_vocab(const std::filesystem::path& path, const Vocab& v) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << nlohmann::json(v).dump() << '\n';
}

Vocab load_vocab(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return nlohmann::json::parse(in).get<Vocab>();
}

}  // namespace segalign
