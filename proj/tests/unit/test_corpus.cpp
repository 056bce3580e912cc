// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "segalign/corpus/generator.hpp"
#include "segalign/corpus/tokenizer.hpp"
#include "segalign/corpus/vocab.hpp"
#include "segalign/numerics/errors.hpp"

using namespace segalign;

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

// Severity read off the sentence wording alone.
int keyword_severity(const std::string& sentence, std::size_t n_classes) {
  std::vector<std::string> words;
  for (const auto& t : tokenize(sentence)) words.push_back(t.text);
  const auto has_prefix = [&](std::string_view p) {
    return std::any_of(words.begin(), words.end(), [&](const std::string& w) { return w.rfind(p, 0) == 0; });
  };
  if (n_classes == 3) {
    if (has_prefix("severe")) return 2;
    if (has_prefix("moderate")) return 1;
    return 0;
  }
  static const std::set<std::string> kNormal = {"no",        "without",   "normal", "patent",
                                                "unremarkable", "preserved", "intact", "clear",
                                                "free"};
  for (const auto& w : words) {
    if (kNormal.count(w)) return 0;
  }
  return 1;
}

}  // namespace

TEST_CASE("tokenize") {
  auto t = tokenize("L2-L3: No disc.");
  std::vector<std::string> words;
  for (const auto& x : t) words.push_back(x.text);
  CHECK(words == std::vector<std::string>{"l2", "-", "l3", ":", "no", "disc", "."});
  CHECK(t[4].begin == 7);
  CHECK(t[4].end == 9);
  CHECK(tokenize("").empty());
  CHECK(tokenize("  \n\t ").empty());
  auto dash = tokenize("L4\xE2\x80\x93L5");
  CHECK(dash.size() == 3);
  CHECK(tokenize("Broad-based")[1].text == "-");
}

TEST_CASE("vocab") {
  const std::vector<std::string> texts = {"disc bulge disc", "Disc herniation", "rare"};
  Vocab v = build_vocab(texts, 2);
  CHECK(v.size() == 5);
  CHECK(v.id("[PAD]") == special_tokens::kPad);
  CHECK(v.id("[UNK]") == special_tokens::kUnk);
  CHECK(v.id("[CLS]") == special_tokens::kCls);
  CHECK(v.id("[SEP]") == special_tokens::kSep);
  CHECK(v.id("disc") == 4);
  CHECK(v.id("rare") == special_tokens::kUnk);
  CHECK(v.id("never-seen") == special_tokens::kUnk);
  CHECK(build_vocab(texts, 2) == v);
  CHECK(Vocab().size() == 4);

  Vocab all = build_vocab(texts, 1);
  nlohmann::json j = all;
  CHECK(j.get<Vocab>() == all);
  CHECK_THROWS_AS(Vocab(std::vector<std::string>{"a", "a"}), InvalidInput);
}

TEST_CASE("encode_segment_text") {
  const std::vector<std::string> texts = {"no disc herniation"};
  Vocab v = build_vocab(texts, 1);
  EncodedText empty = encode_segment_text("", v, 5);
  CHECK(empty.ids == std::vector<int>{special_tokens::kCls, 0, 0, 0, 0});
  CHECK(empty.mask == std::vector<int>{1, 0, 0, 0, 0});

  EncodedText cut = encode_segment_text("no disc herniation no disc", v, 4);
  CHECK(cut.ids.size() == 4);
  CHECK(cut.mask == std::vector<int>{1, 1, 1, 1});

  EncodedText full = encode_segment_text("No disc herniation", v, 8);
  std::vector<std::string> back;
  for (std::size_t i = 1; i < full.ids.size() && full.mask[i]; ++i) back.push_back(v.token(full.ids[i]));
  CHECK(back == std::vector<std::string>{"no", "disc", "herniation"});
  CHECK_THROWS_AS(encode_segment_text("x", v, 1), InvalidInput);
}

TEST_CASE("generator determinism and shape") {
  GeneratorConfig cfg = GeneratorConfig::defaults(BodyPart::Cervical);
  cfg.n_reports = 200;
  cfg.seed = 11;
  auto a = generate_corpus(cfg);
  auto b = generate_corpus(cfg);
  CHECK(a == b);
  std::ostringstream sa, sb;
  write_corpus(sa, a);
  write_corpus(sb, b);
  CHECK(sa.str() == sb.str());
  cfg.seed = 12;
  CHECK_FALSE(generate_corpus(cfg) == a);

  std::size_t with_segments = 0;
  for (const auto& r : a) {
    CHECK(r.labels.size() <= 6);
    for (const auto& [seg, labels] : r.labels) {
      CHECK(body_part_of(seg) == BodyPart::Cervical);
      CHECK(labels.size() == 4);
    }
    for (const auto& span : r.spans) {
      CHECK(span.end <= r.text.size());
      CHECK(r.labels.count(span.segment) == 1);
    }
    with_segments += !r.labels.empty();
  }
  CHECK(with_segments > 180);
}

TEST_CASE("class frequencies follow the priors") {
  for (BodyPart part : {BodyPart::Lumbar, BodyPart::Cervical}) {
    GeneratorConfig cfg = GeneratorConfig::defaults(part);
    cfg.n_reports = 5000;
    cfg.seed = 3;
    const MultiTaskSchema schema = schema_for(part);
    std::vector<std::vector<double>> counts(schema.size());
    for (std::size_t t = 0; t < schema.size(); ++t) counts[t].assign(schema[t].n_classes, 0.0);
    double n = 0.0;
    for (const auto& r : generate_corpus(cfg)) {
      for (const auto& [seg, labels] : r.labels) {
        for (std::size_t t = 0; t < labels.size(); ++t) counts[t][static_cast<std::size_t>(labels[t])] += 1.0;
        n += 1.0;
      }
    }
    for (std::size_t t = 0; t < schema.size(); ++t) {
      const auto& prior = cfg.class_priors.at(schema[t].name);
      double chi2 = 0.0;
      for (std::size_t k = 0; k < prior.size(); ++k) {
        CHECK(std::abs(counts[t][k] / n - prior[k]) <= 0.02);
        const double expect = prior[k] * n;
        chi2 += (counts[t][k] - expect) * (counts[t][k] - expect) / expect;
      }
      // 99.9% quantiles: 13.8 (2 dof), 10.8 (1 dof).
      CHECK(chi2 < (prior.size() == 3 ? 13.8 : 10.8));
    }
  }
}

TEST_CASE("gold labels match the template wording") {
  for (BodyPart part : {BodyPart::Lumbar, BodyPart::Cervical}) {
    GeneratorConfig cfg = GeneratorConfig::defaults(part);
    cfg.n_reports = 300;
    cfg.ocr_noise_rate = 0.5;
    const MultiTaskSchema schema = schema_for(part);
    for (const auto& r : generate_corpus(cfg)) {
      const std::string text = lower(r.text);
      for (const auto& [seg, labels] : r.labels) {
        for (std::size_t t = 0; t < schema.size(); ++t) {
          const auto& sentence = template_bank(schema[t].name, labels[t]).at(
              static_cast<std::size_t>(r.templates.at(seg)[t]));
          CHECK(keyword_severity(sentence, schema[t].n_classes) == labels[t]);
          // Label-bearing text survives OCR noise verbatim (apart from the
          // lowered first letter of some layouts).
          CHECK(text.find(lower(sentence).substr(1)) != std::string::npos);
        }
      }
    }
  }
}

TEST_CASE("every template bank obeys the keyword rule") {
  for (const auto& task : {MultiTaskSchema::lumbar(), MultiTaskSchema::cervical()}) {
    for (const auto& spec : task.tasks()) {
      for (int c = 0; c < static_cast<int>(spec.n_classes); ++c) {
        const auto& bank = template_bank(spec.name, c);
        CHECK(bank.size() >= 8);
        for (const auto& s : bank) CHECK(keyword_severity(s, spec.n_classes) == c);
      }
    }
  }
}

TEST_CASE("OCR noise and correlation knobs") {
  GeneratorConfig cfg = GeneratorConfig::defaults(BodyPart::Lumbar);
  cfg.n_reports = 400;
  cfg.ocr_noise_rate = 0.0;
  for (const auto& r : generate_corpus(cfg)) CHECK_FALSE(r.ocr);
  cfg.ocr_noise_rate = 1.0;
  for (const auto& r : generate_corpus(cfg)) CHECK(r.ocr);

  // Shared latent: stenosis and disc severities correlate, and stop
  // correlating when the knob is off.
  const auto corr = [](const GeneratorConfig& c) {
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0, n = 0;
    for (const auto& r : generate_corpus(c)) {
      for (const auto& [seg, l] : r.labels) {
        const double x = l[0], y = l[1];
        sx += x; sy += y; sxx += x * x; syy += y * y; sxy += x * y; n += 1;
      }
    }
    const double cov = sxy / n - sx / n * sy / n;
    return cov / std::sqrt((sxx / n - sx * sx / n / n) * (syy / n - sy * sy / n / n));
  };
  cfg.n_reports = 2000;
  cfg.task_correlation = 0.8;
  CHECK(corr(cfg) > 0.3);
  cfg.task_correlation = 0.0;
  CHECK(std::abs(corr(cfg)) < 0.05);
}

TEST_CASE("generator config validation") {
  GeneratorConfig cfg = GeneratorConfig::defaults(BodyPart::Lumbar);
  CHECK_NOTHROW(cfg.validate());
  GeneratorConfig bad = cfg;
  bad.class_priors["disc"] = {0.5, 0.5, 0.5};
  try {
    bad.validate();
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("class_priors.disc") != std::string::npos);
  }
  bad = cfg;
  bad.class_priors["nerve"] = {1.0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.class_priors["cord"] = {0.5, 0.5};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.ocr_noise_rate = 1.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  nlohmann::json j = {{"body_part", "cervical"}, {"n_reports", 10}};
  GeneratorConfig parsed = j.get<GeneratorConfig>();
  CHECK(parsed.body_part == BodyPart::Cervical);
  CHECK(parsed.n_reports == 10);
  CHECK(parsed.class_priors.size() == 4);
  nlohmann::json typo = {{"n_report", 10}};
  CHECK_THROWS_AS(typo.get<GeneratorConfig>(), ConfigError);
  nlohmann::json round = cfg;
  CHECK(round.get<GeneratorConfig>() == cfg);
}

TEST_CASE("corpus JSONL round trip") {
  GeneratorConfig cfg = GeneratorConfig::defaults(BodyPart::Lumbar);
  cfg.n_reports = 50;
  auto reports = generate_corpus(cfg);
  std::stringstream io;
  write_corpus(io, reports);
  CHECK(read_corpus(io) == reports);

  std::stringstream broken("{\"id\": 1}\n");
  try {
    read_corpus(broken);
    FAIL("expected an error");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
  }
}
