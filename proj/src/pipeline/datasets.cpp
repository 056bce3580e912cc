// SPDX-License-Identifier: Apache-2.0
#include "segalign/pipeline/datasets.hpp"

#include "segalign/corpus/tokenizer.hpp"
#include "segalign/model/config.hpp"
#include "segalign/pipeline/tagger.hpp"

namespace segalign {

std::vector<std::vector<MotionSegment>> gold_sentence_segments(const AnnotatedReport& report,
                                                               std::span<const Sentence> sentences) {
  std::vector<std::vector<MotionSegment>> out(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    for (const auto& span : report.spans) {
      if (span.begin >= sentences[i].begin && span.end <= sentences[i].end) {
        out[i].push_back(span.segment);
      }
    }
  }
  return out;
}

std::vector<int> gold_token_tags(const AnnotatedReport& report, const Sentence& sentence) {
  const auto tokens = tokenize(sentence.text);
  std::vector<int> tags(tokens.size(), kOtherTag);
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    const std::size_t b = sentence.begin + tokens[k].begin;
    const std::size_t e = sentence.begin + tokens[k].end;
    for (const auto& span : report.spans) {
      if (b < span.end && span.begin < e) {
        tags[k] = kLocationTag;
        break;
      }
    }
  }
  return tags;
}

SegmentedReport gold_segmented_report(const AnnotatedReport& report) {
  const auto sentences = split_sentences(report.text);
  SegmentedReport out = assemble_segments(sentences, gold_sentence_segments(report, sentences));
  out.report_id = report.id;
  return out;
}

std::vector<Example> segmenter_examples(std::span<const AnnotatedReport> reports,
                                        const Vocab& vocab, std::size_t max_len) {
  std::vector<Example> out;
  for (const auto& r : reports) {
    for (const auto& s : split_sentences(r.text)) {
      const auto tokens = tokenize(s.text);
      const auto tags = gold_token_tags(r, s);
      Example ex;
      ex.tokens.push_back(special_tokens::kCls);
      ex.token_tags.push_back(-1);
      for (std::size_t k = 0; k < tokens.size() && ex.tokens.size() < max_len; ++k) {
        ex.tokens.push_back(vocab.id(tokens[k].text));
        ex.token_tags.push_back(tags[k]);
      }
      out.push_back(std::move(ex));
    }
  }
  return out;
}

std::vector<SegmentSample> segment_samples(std::span<const AnnotatedReport> reports) {
  std::vector<SegmentSample> out;
  for (const auto& r : reports) {
    const SegmentedReport seg = gold_segmented_report(r);
    for (const auto& [segment, labels] : r.labels) {
      auto it = seg.segments.find(segment);
      if (it == seg.segments.end() || it->second.empty()) continue;
      out.push_back({r.id, segment, it->second, labels});
    }
  }
  return out;
}

LabeledDataset classifier_dataset(std::span<const SegmentSample> samples, BodyPart body_part,
                                  const Vocab& vocab, std::size_t max_len) {
  LabeledDataset d;
  d.schema = schema_for(body_part);
  for (const auto& s : samples) {
    d.examples.push_back({encode_tokens(s.text, vocab, max_len), s.labels, {}});
  }
  return d;
}

Vocab corpus_vocab(std::span<const AnnotatedReport> reports, std::size_t min_count) {
  std::vector<std::string> texts;
  texts.reserve(reports.size());
  for (const auto& r : reports) texts.push_back(r.text);
  return build_vocab(texts, min_count);
}

}  // namespace segalign
