// SPDX-License-Identifier: Apache-2.0
#include "segalign/corpus/generator.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "segalign/numerics/errors.hpp"
#include "segalign/numerics/rng.hpp"

namespace segalign {

namespace {

constexpr double kOcrDropRate = 0.03;
constexpr double kOcrMentionRate = 0.5;
constexpr double kSegmentPresence = 0.9;

std::vector<double> normalized(std::initializer_list<double> counts) {
  const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
  std::vector<double> p;
  for (double c : counts) p.push_back(c / total);
  return p;
}

enum class MentionForm { Canonical, Short, Collapsed, Doubled, Spaced, Slash, kCount };
enum class Layout { Colon, AtLevel, Numbered, LevelLine, kCount };

struct PracticeStyle {
  MentionForm form;
  Layout layout;
  bool upper;
  std::size_t header;
  std::size_t history;
  bool technique;
  bool comparison;
  bool findings_header;
  bool impression;
  std::size_t paraphrase_base;
  std::vector<std::size_t> task_order;
};

PracticeStyle practice_style(const GeneratorConfig& cfg, std::size_t practice) {
  Rng rng = Rng(cfg.seed).split("practice").split(practice);
  PracticeStyle s;
  s.form = static_cast<MentionForm>(rng.below(static_cast<std::uint64_t>(MentionForm::kCount)));
  s.layout = static_cast<Layout>(rng.below(static_cast<std::uint64_t>(Layout::kCount)));
  s.upper = rng.bernoulli(0.2);
  s.header = rng.below(4);
  s.history = rng.below(4);
  s.technique = rng.bernoulli(0.6);
  s.comparison = rng.bernoulli(0.5);
  s.findings_header = rng.bernoulli(0.85);
  s.impression = rng.bernoulli(0.8);
  s.paraphrase_base = rng.below(8);
  s.task_order.resize(schema_for(cfg.body_part).size());
  std::iota(s.task_order.begin(), s.task_order.end(), 0);
  rng.shuffle(std::span<std::size_t>(s.task_order));
  return s;
}

std::string mention_text(MotionSegment seg, MentionForm form) {
  const SegmentLevels l = levels(seg);
  const std::string a = std::string(1, l.upper_letter) + std::to_string(l.upper_number);
  const std::string b = std::string(1, l.lower_letter) + std::to_string(l.lower_number);
  const bool same = l.upper_letter == l.lower_letter;
  switch (form) {
    case MentionForm::Canonical: return a + "-" + b;
    case MentionForm::Short: return same ? a + "-" + std::to_string(l.lower_number) : a + "-" + b;
    case MentionForm::Collapsed: return same ? a + std::to_string(l.lower_number) : a + b;
    case MentionForm::Doubled: return a + b;
    case MentionForm::Spaced: return a + " - " + b;
    case MentionForm::Slash: return a + "/" + b;
    case MentionForm::kCount: break;
  }
  return a + "-" + b;
}

// OCR damage to a level mention: a swapped separator, or a lost upper digit
// ("L@L3"). The result still names the same segment.
std::string corrupt_mention(MotionSegment seg, std::string m, Rng& rng) {
  static constexpr char kSwaps[] = {'@', '_', '/', '~'};
  const SegmentLevels l = levels(seg);
  for (char& c : m) {
    if (c == '-' || c == '/') {
      c = kSwaps[rng.below(4)];
      return m;
    }
  }
  if (l.upper_letter == l.lower_letter && rng.bernoulli(0.5)) {
    return std::string(1, l.upper_letter) + "@" + l.lower_letter + std::to_string(l.lower_number);
  }
  return m;
}

class Builder {
 public:
  Builder(bool upper, bool ocr, Rng& rng) : upper_(upper), ocr_(ocr), rng_(rng) {}

  // Boilerplate: OCR may drop interior letters.
  void plain(std::string_view s) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto alpha = [&](std::size_t k) {
        return k < s.size() && std::isalpha(static_cast<unsigned char>(s[k]));
      };
      if (ocr_ && i > 0 && alpha(i - 1) && alpha(i) && alpha(i + 1) && rng_.bernoulli(kOcrDropRate)) {
        continue;
      }
      put(s[i]);
    }
  }

  // Label-bearing or structural text: never corrupted.
  void keyword(std::string_view s) {
    for (char c : s) put(c);
  }

  void mention(MotionSegment seg, MentionForm form) {
    std::string m = mention_text(seg, form);
    if (ocr_ && rng_.bernoulli(kOcrMentionRate)) m = corrupt_mention(seg, std::move(m), rng_);
    const std::size_t begin = text_.size();
    keyword(m);
    spans_.push_back({begin, text_.size(), seg});
  }

  void newline() { text_.push_back('\n'); }

  std::string take_text() { return std::move(text_); }
  std::vector<LabelSpan> take_spans() { return std::move(spans_); }

 private:
  void put(char c) {
    text_.push_back(upper_ ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c);
  }

  bool upper_;
  bool ocr_;
  Rng& rng_;
  std::string text_;
  std::vector<LabelSpan> spans_;
};

std::string lower_first(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return s;
}

void write_header(Builder& b, const PracticeStyle& st, BodyPart part) {
  const bool cervical = part == BodyPart::Cervical;
  const std::string region = cervical ? "cervical" : "lumbar";
  switch (st.header) {
    case 0: b.plain("EXAMINATION: MRI of the " + region + " spine without contrast."); break;
    case 1: b.plain(std::string("EXAM: MRI ") + (cervical ? "C" : "L") + "-spine wo contrast."); break;
    case 2: b.plain(cervical ? "MRI CERVICAL SPINE WITHOUT CONTRAST" : "MRI LUMBAR SPINE WITHOUT CONTRAST"); break;
    default: b.plain("Study: Magnetic resonance imaging of the " + region + " spine."); break;
  }
  b.newline();
  switch (st.history) {
    case 0: b.plain(cervical ? "CLINICAL HISTORY: Neck pain." : "CLINICAL HISTORY: Low back pain."); break;
    case 1: b.plain("HISTORY: Pain radiating to the extremity, approx. 6 months."); break;
    case 2: b.plain("INDICATION: Radiculopathy. Referred by Dr. Patel."); break;
    default: b.plain("History: Chronic pain vs. radiculopathy."); break;
  }
  b.newline();
  if (st.technique) {
    b.plain("TECHNIQUE: Sagittal and axial T1 and T2 weighted images were obtained.");
    b.newline();
  }
  if (st.comparison) {
    b.plain("COMPARISON: None.");
    b.newline();
  }
}

void write_general(Builder& b, BodyPart part, Rng& rng) {
  static const std::vector<std::string> kLumbar = {
      "Vertebral body heights are maintained.", "The conus medullaris terminates at the L1 level.",
      "Alignment is normal.", "Marrow signal is within normal limits."};
  static const std::vector<std::string> kCervical = {
      "Vertebral body heights are maintained from C2 through T1.",
      "The craniocervical junction is unremarkable.", "Alignment is normal.",
      "Marrow signal is within normal limits."};
  const auto& bank = part == BodyPart::Cervical ? kCervical : kLumbar;
  const std::size_t first = rng.below(bank.size());
  b.plain(bank[first]);
  if (rng.bernoulli(0.5)) {
    b.keyword(" ");
    b.plain(bank[(first + 1 + rng.below(bank.size() - 1)) % bank.size()]);
  }
  b.newline();
}

double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

int sample_class(double u, const std::vector<double>& prior) {
  const double p = standard_normal_cdf(u);
  double cum = 0.0;
  for (std::size_t k = 0; k + 1 < prior.size(); ++k) {
    cum += prior[k];
    if (p < cum) return static_cast<int>(k);
  }
  return static_cast<int>(prior.size()) - 1;
}

[[noreturn]] void config_fail(const std::string& field, const std::string& why) {
  throw ConfigError("generator." + field + ": " + why);
}

}  // namespace

GeneratorConfig GeneratorConfig::defaults(BodyPart b) {
  GeneratorConfig c;
  c.body_part = b;
  if (b == BodyPart::Lumbar) {
    c.class_priors = {{"stenosis", normalized({3787, 350, 202})},
                      {"disc", normalized({1885, 1998, 456})},
                      {"nerve", normalized({3790, 549})}};
  } else {
    c.class_priors = {{"stenosis", normalized({5488, 561, 178})},
                      {"disc", normalized({2731, 2699, 797})},
                      {"cord", normalized({5702, 525})},
                      {"foraminal", normalized({5262, 965})}};
  }
  return c;
}

void GeneratorConfig::validate() const {
  const MultiTaskSchema schema = schema_for(body_part);
  for (const auto& [name, prior] : class_priors) {
    if (!schema.find(name)) config_fail("class_priors." + name, "not a task of this body part");
  }
  for (const auto& task : schema.tasks()) {
    auto it = class_priors.find(task.name);
    if (it == class_priors.end()) config_fail("class_priors." + task.name, "missing");
    const auto& p = it->second;
    if (p.size() != task.n_classes) {
      config_fail("class_priors." + task.name,
                  "expected " + std::to_string(task.n_classes) + " probabilities, got " +
                      std::to_string(p.size()));
    }
    double sum = 0.0;
    for (double v : p) {
      if (!(v >= 0.0 && v <= 1.0)) config_fail("class_priors." + task.name, "entries must lie in [0,1]");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      config_fail("class_priors." + task.name, "probabilities sum to " + std::to_string(sum));
    }
  }
  if (practice_styles == 0) config_fail("practice_styles", "must be positive");
  if (!(ocr_noise_rate >= 0.0 && ocr_noise_rate <= 1.0)) config_fail("ocr_noise_rate", "must lie in [0,1]");
  if (!(task_correlation >= 0.0 && task_correlation <= 1.0)) {
    config_fail("task_correlation", "must lie in [0,1]");
  }
  if (!(no_segment_rate >= 0.0 && no_segment_rate <= 1.0)) config_fail("no_segment_rate", "must lie in [0,1]");
}

void to_json(nlohmann::json& j, const GeneratorConfig& c) {
  j = {{"body_part", to_string(c.body_part)},
       {"n_reports", c.n_reports},
       {"practice_styles", c.practice_styles},
       {"class_priors", c.class_priors},
       {"ocr_noise_rate", c.ocr_noise_rate},
       {"task_correlation", c.task_correlation},
       {"no_segment_rate", c.no_segment_rate},
       {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, GeneratorConfig& c) {
  if (!j.is_object()) throw ConfigError("generator: expected an object");
  BodyPart part = c.body_part;
  if (j.contains("body_part")) {
    try {
      part = body_part_from_string(j.at("body_part").get<std::string>());
    } catch (const std::exception& e) {
      config_fail("body_part", e.what());
    }
  }
  GeneratorConfig out = c;
  if (part != c.body_part || c.class_priors.empty()) {
    out.body_part = part;
    out.class_priors = GeneratorConfig::defaults(part).class_priors;
  }
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "body_part") continue;
      if (key == "n_reports") out.n_reports = value.get<std::size_t>();
      else if (key == "practice_styles") out.practice_styles = value.get<std::size_t>();
      else if (key == "class_priors") {
        for (const auto& [task, p] : value.items()) out.class_priors[task] = p.get<std::vector<double>>();
      } else if (key == "ocr_noise_rate") out.ocr_noise_rate = value.get<double>();
      else if (key == "task_correlation") out.task_correlation = value.get<double>();
      else if (key == "no_segment_rate") out.no_segment_rate = value.get<double>();
      else if (key == "seed") out.seed = value.get<std::uint64_t>();
      else config_fail(key, "unknown key");
    } catch (const nlohmann::json::exception& e) {
      config_fail(key, e.what());
    }
  }
  c = std::move(out);
}

AnnotatedReport generate_report(const GeneratorConfig& cfg, std::size_t index) {
  const MultiTaskSchema schema = schema_for(cfg.body_part);
  Rng rng = Rng(cfg.seed).split("report").split(index);

  AnnotatedReport r;
  std::ostringstream id;
  id << to_string(cfg.body_part) << '-' << std::setw(6) << std::setfill('0') << index;
  r.id = id.str();
  r.body_part = cfg.body_part;
  r.practice = rng.below(cfg.practice_styles);
  r.ocr = rng.bernoulli(cfg.ocr_noise_rate);
  const PracticeStyle st = practice_style(cfg, r.practice);

  // Severities: Gaussian copula over a shared latent, exact marginals.
  std::vector<MotionSegment> present;
  if (!rng.bernoulli(cfg.no_segment_rate)) {
    for (MotionSegment s : segments_for(cfg.body_part)) {
      if (rng.bernoulli(kSegmentPresence)) present.push_back(s);
    }
    if (present.empty()) {
      auto segs = segments_for(cfg.body_part);
      present.push_back(segs[rng.below(segs.size())]);
    }
  }
  const double rho = cfg.task_correlation;
  const double noise = std::sqrt(1.0 - rho * rho);
  for (MotionSegment s : present) {
    const double z = rng.normal();
    std::vector<int> labels, tmpl;
    for (const auto& task : schema.tasks()) {
      const int cls = sample_class(rho * z + noise * rng.normal(), cfg.class_priors.at(task.name));
      const std::size_t bank = template_bank(task.name, cls).size();
      const std::size_t k = rng.bernoulli(0.7) ? (st.paraphrase_base + rng.below(3)) % bank
                                                : rng.below(bank);
      labels.push_back(cls);
      tmpl.push_back(static_cast<int>(k));
    }
    r.labels[s] = std::move(labels);
    r.templates[s] = std::move(tmpl);
  }

  Builder b(st.upper, r.ocr, rng);
  write_header(b, st, cfg.body_part);
  if (st.findings_header) {
    b.keyword(st.upper || st.header % 2 == 0 ? "FINDINGS:" : "Findings:");
    b.newline();
  }
  write_general(b, cfg.body_part, rng);

  std::size_t item = 1;
  for (MotionSegment s : present) {
    std::vector<std::string> sentences;
    for (std::size_t t : st.task_order) {
      const auto& bank = template_bank(schema[t].name, r.labels[s][t]);
      sentences.push_back(bank[static_cast<std::size_t>(r.templates[s][t])]);
    }
    switch (st.layout) {
      case Layout::Colon:
        b.mention(s, st.form);
        b.keyword(": ");
        break;
      case Layout::AtLevel:
        b.keyword("At ");
        b.mention(s, st.form);
        b.keyword(", ");
        sentences[0] = lower_first(sentences[0]);
        break;
      case Layout::Numbered:
        b.keyword(std::to_string(item++) + ". ");
        b.mention(s, st.form);
        b.keyword(": ");
        break;
      case Layout::LevelLine:
      case Layout::kCount:
        b.mention(s, st.form);
        b.keyword(":");
        b.newline();
        break;
    }
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      if (i > 0) b.keyword(" ");
      b.keyword(sentences[i]);
    }
    b.newline();
  }

  if (st.impression || present.empty()) {
    b.keyword(st.upper || st.header % 2 == 0 ? "IMPRESSION:" : "Impression:");
    b.newline();
    std::vector<MotionSegment> notable;
    for (MotionSegment s : present) {
      const auto& l = r.labels[s];
      if (*std::max_element(l.begin(), l.end()) > 0 && notable.size() < 2) notable.push_back(s);
    }
    if (notable.empty()) {
      b.plain("No significant degenerative change.");
    } else {
      b.plain("Degenerative changes at ");
      b.mention(notable[0], st.form);
      if (notable.size() > 1) {
        b.plain(" and ");
        b.mention(notable[1], st.form);
      }
      b.keyword(". ");
      b.plain("No acute osseous abnormality.");
    }
    b.newline();
  }
  r.text = b.take_text();
  r.spans = b.take_spans();
  return r;
}

std::vector<AnnotatedReport> generate_corpus(const GeneratorConfig& cfg) {
  cfg.validate();
  std::vector<AnnotatedReport> out(cfg.n_reports);
  const auto n = static_cast<std::ptrdiff_t>(cfg.n_reports);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = generate_report(cfg, static_cast<std::size_t>(i));
  }
  return out;
}

void to_json(nlohmann::json& j, const AnnotatedReport& r) {
  const MultiTaskSchema schema = schema_for(r.body_part);
  nlohmann::json segments = nlohmann::json::object();
  nlohmann::json templates = nlohmann::json::object();
  for (const auto& [seg, labels] : r.labels) {
    nlohmann::json l = nlohmann::json::object(), t = nlohmann::json::object();
    for (std::size_t k = 0; k < schema.size(); ++k) {
      l[schema[k].name] = labels.at(k);
      t[schema[k].name] = r.templates.at(seg).at(k);
    }
    segments[std::string(to_string(seg))] = l;
    templates[std::string(to_string(seg))] = t;
  }
  nlohmann::json spans = nlohmann::json::array();
  for (const auto& s : r.spans) {
    spans.push_back({{"begin", s.begin}, {"end", s.end}, {"segment", to_string(s.segment)}});
  }
  j = {{"id", r.id},
       {"practice", r.practice},
       {"body_part", to_string(r.body_part)},
       {"text", r.text},
       {"ocr", r.ocr},
       {"segments", segments},
       {"templates", templates},
       {"spans", spans}};
}

void from_json(const nlohmann::json& j, AnnotatedReport& r) {
  const auto parse_segment = [](const std::string& name) {
    auto s = segment_from_string(name);
    if (!s || *s == MotionSegment::NoSegment) throw InvalidInput("unknown segment '" + name + "'");
    return *s;
  };
  r.id = j.at("id").get<std::string>();
  r.practice = j.at("practice").get<std::size_t>();
  r.body_part = body_part_from_string(j.at("body_part").get<std::string>());
  r.text = j.at("text").get<std::string>();
  r.ocr = j.value("ocr", false);
  const MultiTaskSchema schema = schema_for(r.body_part);
  r.labels.clear();
  r.templates.clear();
  for (const auto& [name, tasks] : j.at("segments").items()) {
    const MotionSegment seg = parse_segment(name);
    std::vector<int> labels;
    for (const auto& task : schema.tasks()) {
      if (!tasks.contains(task.name)) {
        throw InvalidInput("segment " + name + " has no label for task '" + task.name + "'");
      }
      const int cls = tasks.at(task.name).get<int>();
      if (cls < 0 || static_cast<std::size_t>(cls) >= task.n_classes) {
        throw InvalidInput("segment " + name + ": class out of range for '" + task.name + "'");
      }
      labels.push_back(cls);
    }
    r.labels[seg] = std::move(labels);
  }
  if (j.contains("templates")) {
    for (const auto& [name, tasks] : j.at("templates").items()) {
      std::vector<int> t;
      for (const auto& task : schema.tasks()) t.push_back(tasks.at(task.name).get<int>());
      r.templates[parse_segment(name)] = std::move(t);
    }
  }
  r.spans.clear();
  for (const auto& s : j.at("spans")) {
    LabelSpan span{s.at("begin").get<std::size_t>(), s.at("end").get<std::size_t>(),
                   parse_segment(s.at("segment").get<std::string>())};
    if (span.begin > span.end || span.end > r.text.size()) throw InvalidInput("span out of range");
    r.spans.push_back(span);
  }
}

void write_corpus(std::ostream& out, const std::vector<AnnotatedReport>& reports) {
  for (const auto& r : reports) out << nlohmann::json(r).dump() << '\n';
}

std::vector<AnnotatedReport> read_corpus(std::istream& in) {
  std::vector<AnnotatedReport> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(nlohmann::json::parse(line).get<AnnotatedReport>());
    } catch (const std::exception& e) {
      throw InvalidInput("corpus line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void save_corpus(const std::filesystem::path& path, const std::vector<AnnotatedReport>& reports) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_corpus(out, reports);
}

std::vector<AnnotatedReport> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return read_corpus(in);
}

}  // namespace segalign
