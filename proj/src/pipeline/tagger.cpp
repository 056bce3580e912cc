// SPDX-License-Identifier: Apache-2.0
#include "segalign/pipeline/tagger.hpp"

#include "segalign/model/encoder.hpp"
#include "segalign/numerics/errors.hpp"
#include "segalign/pipeline/normalize.hpp"

namespace segalign {

std::vector<LocationWindow> location_windows(std::string_view text, std::span<const Token> tokens,
                                             std::span<const int> tags) {
  std::vector<LocationWindow> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    if (tags[i] != kLocationTag) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < tokens.size() && tags[j + 1] == kLocationTag) ++j;
    LocationWindow w;
    w.begin = tokens[i].begin;
    w.end = tokens[j].end;
    w.segment = normalize_segment_mention(text.substr(w.begin, w.end - w.begin));
    out.push_back(w);
    i = j + 1;
  }
  return out;
}

std::vector<TaggedSentence> tag_sentences(const ParameterStore& segmenter, const Vocab& vocab,
                                          std::span<const std::string_view> texts) {
  const ModelConfig& cfg = segmenter.config;
  if (cfg.head_mode != HeadMode::TokenClassifier) {
    throw InvalidInput("tagger: segmenter must be a token classifier");
  }
  if (cfg.vocab_size != vocab.size()) throw InvalidInput("tagger: vocab size does not match the segmenter");

  std::vector<TaggedSentence> out(texts.size());
  std::vector<std::vector<int>> rows;
  for (std::size_t s = 0; s < texts.size(); ++s) {
    out[s].tokens = tokenize(texts[s]);
    std::vector<int> ids{special_tokens::kCls};
    for (const auto& t : out[s].tokens) {
      if (ids.size() >= cfg.max_seq_len) break;
      ids.push_back(vocab.id(t.text));
    }
    rows.push_back(std::move(ids));
  }
  if (!rows.empty()) {
    const Batch batch = Batch::from_sequences(rows, cfg.max_seq_len);
    const auto classes = predict(segmenter, batch);
    for (std::size_t s = 0; s < texts.size(); ++s) {
      auto& ts = out[s];
      ts.tags.assign(ts.tokens.size(), kOtherTag);
      for (std::size_t k = 0; k + 1 < rows[s].size(); ++k) {
        ts.tags[k] = static_cast<int>(classes[0][s * batch.seq_len + k + 1]);
      }
      ts.windows = location_windows(texts[s], ts.tokens, ts.tags);
    }
  }
  return out;
}

TaggedSentence tag_sentence_locations(const ParameterStore& segmenter, const Vocab& vocab,
                                      std::string_view sentence) {
  const std::string_view texts[] = {sentence};
  return std::move(tag_sentences(segmenter, vocab, texts)[0]);
}

}  // namespace segalign
