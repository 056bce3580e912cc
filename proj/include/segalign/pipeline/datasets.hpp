// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "segalign/corpus/generator.hpp"
#include "segalign/corpus/vocab.hpp"
#include "segalign/pipeline/assemble.hpp"
#include "segalign/pipeline/sentences.hpp"
#include "segalign/train/trainer.hpp"

namespace segalign {

/// Segments named by gold spans inside each sentence.
std::vector<std::vector<MotionSegment>> gold_sentence_segments(const AnnotatedReport& report,
                                                               std::span<const Sentence> sentences);

/// Gold Location/Other tag per token of `sentence` (tokens overlapping a span).
std::vector<int> gold_token_tags(const AnnotatedReport& report, const Sentence& sentence);

/// Report assembled from gold mentions (the classifier's training view).
SegmentedReport gold_segmented_report(const AnnotatedReport& report);

/// One token-tagging example per sentence; CLS carries an ignored tag.
std::vector<Example> segmenter_examples(std::span<const AnnotatedReport> reports,
                                        const Vocab& vocab, std::size_t max_len);

struct SegmentSample {
  std::string report_id;
  MotionSegment segment = MotionSegment::NoSegment;
  std::string text;
  std::vector<int> labels;  // schema order
};

/// Gold-labeled segment texts. Segments whose bucket is empty are skipped.
std::vector<SegmentSample> segment_samples(std::span<const AnnotatedReport> reports);

LabeledDataset classifier_dataset(std::span<const SegmentSample> samples, BodyPart body_part,
                                  const Vocab& vocab, std::size_t max_len);

/// Vocabulary over report texts.
Vocab corpus_vocab(std::span<const AnnotatedReport> reports, std::size_t min_count);

}  // namespace segalign
