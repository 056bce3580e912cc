// SPDX-License-Identifier: Apache-2.0
#include "segalign/pipeline/pipeline.hpp"

#include <nlohmann/json.hpp>

#include "segalign/model/encoder.hpp"
#include "segalign/numerics/errors.hpp"
#include "segalign/pipeline/sentences.hpp"
#include "segalign/pipeline/tagger.hpp"

namespace segalign {

std::vector<SegmentPrediction> classify_segments(const ParameterStore& classifier,
                                                 const Vocab& vocab,
                                                 const SegmentedReport& report) {
  const ModelConfig& cfg = classifier.config;
  if (cfg.head_mode != HeadMode::SequenceClassifier) {
    throw InvalidInput("pipeline: classifier must be a sequence classifier");
  }
  if (cfg.vocab_size != vocab.size()) throw InvalidInput("pipeline: vocab size does not match the classifier");
  std::vector<SegmentPrediction> out;
  if (report.segments.empty()) return out;

  std::vector<std::vector<int>> rows;
  for (const auto& [seg, text] : report.segments) {
    rows.push_back(encode_tokens(text, vocab, cfg.max_seq_len));
    out.push_back({seg, {}, {}});
  }
  Rng unused(0);
  const ForwardOutput fwd = forward(classifier, Batch::from_sequences(rows, cfg.max_seq_len), false, unused);
  for (std::size_t t = 0; t < fwd.logits.size(); ++t) {
    const Matrix probs = row_softmax(fwd.logits[t]);
    for (std::size_t r = 0; r < out.size(); ++r) {
      out[r].classes.push_back(argmax_lowest(fwd.logits[t].row(r)));
      const auto row = probs.row(r);
      out[r].probabilities.emplace_back(row.begin(), row.end());
    }
  }
  return out;
}

PipelineResult run_pipeline(std::string_view report_text, const ParameterStore& segmenter,
                            const ParameterStore& classifier, const Vocab& vocab) {
  if (segmenter.config.vocab_size != classifier.config.vocab_size) {
    throw InvalidInput("pipeline: segmenter and classifier vocab sizes differ (" +
                       std::to_string(segmenter.config.vocab_size) + " vs " +
                       std::to_string(classifier.config.vocab_size) + ")");
  }
  const std::vector<Sentence> sentences = split_sentences(report_text);
  std::vector<std::string_view> texts;
  for (const auto& s : sentences) texts.push_back(s.text);
  const auto tagged = tag_sentences(segmenter, vocab, texts);
  std::vector<std::vector<MotionSegment>> per_sentence(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    for (const auto& w : tagged[i].windows) {
      if (w.segment) per_sentence[i].push_back(*w.segment);
    }
  }
  PipelineResult out;
  out.report = assemble_segments(sentences, per_sentence);
  out.predictions = classify_segments(classifier, vocab, out.report);
  return out;
}

nlohmann::json prediction_record(std::string_view report_id, const SegmentPrediction& p,
                                 const MultiTaskSchema& schema) {
  nlohmann::json j = {{"report", report_id}, {"segment", to_string(p.segment)}};
  for (std::size_t t = 0; t < schema.size() && t < p.classes.size(); ++t) {
    j[schema[t].name] = {{"class", p.classes[t]}, {"probabilities", p.probabilities[t]}};
  }
  return j;
}

}  // namespace segalign
