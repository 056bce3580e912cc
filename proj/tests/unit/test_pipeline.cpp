// SPDX-License-Identifier: Apache-2.0
#include <set>

#include "doctest.h"
#include "normalization_table.hpp"
#include "sentence_oracle.hpp"
#include "segalign/corpus/generator.hpp"
#include "segalign/numerics/errors.hpp"
#include "segalign/model/encoder.hpp"
#include "segalign/pipeline/assemble.hpp"
#include "segalign/pipeline/datasets.hpp"
#include "segalign/pipeline/normalize.hpp"
#include "segalign/pipeline/pipeline.hpp"
#include "segalign/pipeline/sentences.hpp"
#include "segalign/pipeline/tagger.hpp"

using namespace segalign;

namespace {

std::vector<std::string> texts(const std::vector<Sentence>& s) {
  std::vector<std::string> out;
  for (const auto& x : s) out.push_back(x.text);
  return out;
}

}  // namespace

TEST_CASE("split_sentences examples") {
  CHECK(texts(split_sentences("A. B.")) == std::vector<std::string>{"A.", "B."});
  CHECK(split_sentences("L1-L2: There is no disc herniation. No spinal canal or foraminal narrowing").size() == 2);
  CHECK(split_sentences("").empty());
  CHECK(split_sentences(" \n\n ").empty());
  CHECK(texts(split_sentences("Referred by Dr. Patel. Pain approx. 6 months.")) ==
        std::vector<std::string>{"Referred by Dr. Patel.", "Pain approx. 6 months."});
  CHECK(texts(split_sentences("FINDINGS:\n1. L1-L2: Mild bulge. Canal is patent.\n2. L2-3: Normal.")) ==
        std::vector<std::string>{"FINDINGS:", "1. L1-L2: Mild bulge.", "Canal is patent.", "2. L2-3: Normal."});
  CHECK(texts(split_sentences("Measures 3.5 mm. Stable")) == std::vector<std::string>{"Measures 3.5 mm.", "Stable"});
  CHECK(texts(split_sentences("Is it? Yes! Done")) == std::vector<std::string>{"Is it?", "Yes!", "Done"});
  CHECK(texts(split_sentences("e.g. this one. Next")) == std::vector<std::string>{"e.g. this one.", "Next"});

  const std::string t = "  One.  Two\r\n\nThree.  ";
  auto s = split_sentences(t);
  CHECK(texts(s) == std::vector<std::string>{"One.", "Two", "Three."});
  CHECK(oracle::round_trips(t, s));
}

TEST_CASE("sentence offsets round trip on generated reports") {
  for (BodyPart part : {BodyPart::Lumbar, BodyPart::Cervical}) {
    GeneratorConfig cfg = GeneratorConfig::defaults(part);
    cfg.n_reports = 300;
    for (const auto& r : generate_corpus(cfg)) CHECK(oracle::round_trips(r.text, split_sentences(r.text)));
  }
}

TEST_CASE("normalize_segment_mention variant table") {
  const auto cases = oracle::mention_cases();
  CHECK(cases.size() >= 40);
  for (const auto& c : cases) {
    CAPTURE(c.text);
    CHECK(normalize_segment_mention(c.text) == c.expect);
  }
}

TEST_CASE("normalize_segment_mention is total and adjacent-only") {
  Rng rng(17);
  const std::string alphabet = "cltsCLTS0123456789-_/@ .:";
  std::set<MotionSegment> seen;
  for (int i = 0; i < 20000; ++i) {
    std::string w;
    const std::size_t len = rng.below(8);
    for (std::size_t k = 0; k < len; ++k) w.push_back(alphabet[rng.below(alphabet.size())]);
    auto s = normalize_segment_mention(w);
    if (s) {
      CHECK(*s != MotionSegment::NoSegment);
      seen.insert(*s);
    }
  }
  CHECK(seen.size() >= 5);
}

TEST_CASE("every generated mention normalizes to its gold segment") {
  for (BodyPart part : {BodyPart::Lumbar, BodyPart::Cervical}) {
    GeneratorConfig cfg = GeneratorConfig::defaults(part);
    cfg.n_reports = 500;
    cfg.ocr_noise_rate = 0.5;
    for (const auto& r : generate_corpus(cfg)) {
      for (const auto& span : r.spans) {
        const std::string_view m = std::string_view(r.text).substr(span.begin, span.end - span.begin);
        CAPTURE(m);
        CHECK(normalize_segment_mention(m) == span.segment);
      }
    }
  }
}

TEST_CASE("assemble_segments rules") {
  using S = MotionSegment;
  const auto sentences = split_sentences("L1-L2: no herniation. Mild facet arthropathy.");
  const std::vector<std::vector<S>> segs = {{S::L1L2}, {}};
  SegmentedReport r = assemble_segments(sentences, segs);
  CHECK(r.segments.at(S::L1L2) == "L1-L2: no herniation. Mild facet arthropathy.");
  CHECK(r.unassigned.empty());
  CHECK_FALSE(r.no_segments_found());

  const auto plain = split_sentences("Alignment is normal. No fracture.");
  const std::vector<std::vector<S>> none(2);
  SegmentedReport empty = assemble_segments(plain, none);
  CHECK(empty.no_segments_found());
  CHECK(empty.unassigned == std::vector<std::size_t>{0, 1});

  const auto four = split_sentences("Header. L3-L4 and L4-L5 are degenerated. Bulge. L5-S1: Normal.");
  const std::vector<std::vector<S>> tags = {{}, {S::L3L4, S::L4L5}, {}, {S::L5S1, S::NoSegment}};
  SegmentedReport multi = assemble_segments(four, tags);
  CHECK(multi.unassigned == std::vector<std::size_t>{0});
  CHECK(multi.sentence_ids.at(S::L3L4) == std::vector<std::size_t>{1});
  CHECK(multi.sentence_ids.at(S::L4L5) == std::vector<std::size_t>{1, 2});
  CHECK(multi.sentence_ids.at(S::L5S1) == std::vector<std::size_t>{3});
  CHECK(multi.segments.at(S::L4L5) == "L3-L4 and L4-L5 are degenerated. Bulge.");

  CHECK_THROWS_AS(assemble_segments(four, none), InvalidInput);
}

TEST_CASE("gold assembly partitions every sentence") {
  GeneratorConfig cfg = GeneratorConfig::defaults(BodyPart::Cervical);
  cfg.n_reports = 200;
  for (const auto& r : generate_corpus(cfg)) {
    const auto sentences = split_sentences(r.text);
    const auto per = gold_sentence_segments(r, sentences);
    SegmentedReport seg = assemble_segments(sentences, per);
    std::size_t placed = seg.unassigned.size();
    std::size_t expected = 0;
    for (const auto& [s, ids] : seg.sentence_ids) placed += ids.size();
    for (const auto& p : per) {
      std::set<MotionSegment> distinct(p.begin(), p.end());
      expected += std::max<std::size_t>(1, distinct.size());
    }
    CHECK(placed == expected);
    CHECK(seg.no_segments_found() == r.labels.empty());
    for (const auto& [s, text] : seg.segments) CHECK(r.labels.count(s) == 1);
  }
}

TEST_CASE("location windows from gold tags recover the mentions") {
  GeneratorConfig cfg = GeneratorConfig::defaults(BodyPart::Lumbar);
  cfg.n_reports = 200;
  cfg.ocr_noise_rate = 0.5;
  for (const auto& r : generate_corpus(cfg)) {
    for (const auto& s : split_sentences(r.text)) {
      const auto tokens = tokenize(s.text);
      const auto tags = gold_token_tags(r, s);
      std::vector<MotionSegment> got;
      for (const auto& w : location_windows(s.text, tokens, tags)) {
        REQUIRE(w.segment.has_value());
        got.push_back(*w.segment);
      }
      std::vector<MotionSegment> want;
      for (const auto& span : r.spans) {
        if (span.begin >= s.begin && span.end <= s.end) want.push_back(span.segment);
      }
      CHECK(got == want);
    }
  }
}

TEST_CASE("pipeline contract with small trained models") {
  GeneratorConfig cfg = GeneratorConfig::defaults(BodyPart::Lumbar);
  cfg.n_reports = 150;
  cfg.seed = 5;
  const auto reports = generate_corpus(cfg);
  const Vocab vocab = corpus_vocab(reports, 1);

  ModelConfig seg_model;
  seg_model.vocab_size = vocab.size();
  seg_model.max_seq_len = 24;
  seg_model.d_model = 16;
  seg_model.n_layers = 1;
  seg_model.n_heads = 2;
  seg_model.d_ff = 32;
  seg_model.dropout_p = 0.1;
  TrainConfig tc = TrainConfig::single_task();
  tc.epochs = 3;
  tc.lr_peak = 3e-3;
  tc.val_fraction = 0.0;
  LabeledDataset seg_data{location_tag_schema(), segmenter_examples(reports, vocab, 24)};
  const ParameterStore segmenter = train_token_tagger(seg_data, seg_model, tc).params;
  CHECK(evaluate_location_f1(segmenter, seg_data.examples) > 0.9);

  TaggedSentence tagged = tag_sentence_locations(segmenter, vocab, "L4-L5: Disc bulge.");
  REQUIRE(tagged.windows.size() == 1);
  CHECK(tagged.windows[0].segment == MotionSegment::L4L5);
  TaggedSentence none = tag_sentence_locations(segmenter, vocab, "Alignment is normal.");
  CHECK(std::all_of(none.tags.begin(), none.tags.end(), [](int t) { return t == kOtherTag; }));
  CHECK(tag_sentence_locations(segmenter, vocab, "L4-L5: Disc bulge.").tags == tagged.tags);

  ModelConfig cls_model = seg_model;
  cls_model.max_seq_len = 48;
  cls_model.head_mode = HeadMode::SequenceClassifier;
  cls_model.schema = MultiTaskSchema::lumbar();
  const ParameterStore classifier = init_model(cls_model, Rng(2));

  const std::string report = "FINDINGS:\nL1-L2: There is no disc herniation. No spinal canal or foraminal narrowing.\n";
  PipelineResult out = run_pipeline(report, segmenter, classifier, vocab);
  REQUIRE(out.predictions.size() == 1);
  CHECK(out.predictions[0].segment == MotionSegment::L1L2);
  CHECK(out.predictions[0].classes.size() == 3);
  for (std::size_t t = 0; t < 3; ++t) {
    const auto& p = out.predictions[0].probabilities[t];
    CHECK(p.size() == cls_model.schema[t].n_classes);
    double sum = 0.0;
    for (double v : p) sum += v;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(out.predictions[0].classes[t] < p.size());
  }
  PipelineResult again = run_pipeline(report, segmenter, classifier, vocab);
  CHECK(again.predictions[0].probabilities == out.predictions[0].probabilities);

  PipelineResult empty = run_pipeline("Alignment is normal. No fracture.", segmenter, classifier, vocab);
  CHECK(empty.no_segments_found());
  CHECK(empty.predictions.empty());

  ModelConfig other = cls_model;
  other.vocab_size = vocab.size() + 1;
  CHECK_THROWS_AS(run_pipeline(report, segmenter, init_model(other, Rng(0)), vocab), InvalidInput);
}
