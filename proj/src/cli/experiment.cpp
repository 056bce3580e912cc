// SPDX-License-Identifier: Apache-2.0
#include "segalign/cli/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "segalign/analysis/alignment.hpp"
#include "segalign/model/encoder.hpp"
#include "segalign/numerics/errors.hpp"
#include "segalign/numerics/rng.hpp"
#include "segalign/train/split.hpp"

namespace segalign {

namespace {

std::vector<std::string> read_ids(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::vector<std::string> ids;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) ids.push_back(line);
  }
  return ids;
}

void write_ids(const std::filesystem::path& path, const PreparedCorpus& c,
               const std::vector<std::size_t>& which) {
  std::ofstream out(path, std::ios::binary);
  for (std::size_t i : which) out << c.reports[i].id << '\n';
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

// Keeps only the label column of `task`.
std::vector<Example> project(const std::vector<Example>& examples, std::size_t task) {
  std::vector<Example> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) out.push_back({ex.tokens, {ex.labels.at(task)}, {}});
  return out;
}

std::string topology(const ModelConfig& c) {
  std::ostringstream s;
  s << "{d_model " << c.d_model << ", n_layers " << c.n_layers << ", n_heads " << c.n_heads
    << ", d_ff " << c.d_ff << ", vocab " << c.vocab_size << ", max_seq_len " << c.max_seq_len
    << "}";
  return s.str();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

std::vector<AnnotatedReport> PreparedCorpus::subset(bool test_side) const {
  std::vector<AnnotatedReport> out;
  for (std::size_t i : test_side ? test : train) out.push_back(reports[i]);
  return out;
}

std::vector<int> report_strata(const std::vector<AnnotatedReport>& reports) {
  std::vector<int> strata;
  strata.reserve(reports.size());
  for (const auto& r : reports) {
    const int none = static_cast<int>(schema_for(r.body_part)[0].n_classes);
    int s = r.labels.empty() ? none : 0;
    for (const auto& [seg, labels] : r.labels) s = std::max(s, labels.at(0));
    strata.push_back(s);
  }
  std::map<int, std::size_t> counts;
  for (int s : strata) ++counts[s];
  for (int& s : strata) {
    if (counts[s] < 2) s = 0;
  }
  return strata;
}

PreparedCorpus prepare_corpus(const GeneratorConfig& generator, double test_fraction,
                              std::size_t vocab_min_count, std::uint64_t split_seed) {
  PreparedCorpus c;
  c.body_part = generator.body_part;
  c.reports = generate_corpus(generator);
  if (c.reports.size() < 2) throw InvalidInput("prepare_corpus: need at least two reports");
  const std::vector<int> strata = report_strata(c.reports);
  SplitIndices split = stratified_split(strata, test_fraction, split_seed);
  c.train = std::move(split.train);
  c.test = std::move(split.validation);
  c.vocab = corpus_vocab(c.subset(false), vocab_min_count);
  return c;
}

std::vector<std::string> save_prepared(const std::filesystem::path& dir, const PreparedCorpus& c) {
  std::filesystem::create_directories(dir);
  save_corpus(dir / "corpus.jsonl", c.reports);
  write_ids(dir / "train_ids.txt", c, c.train);
  write_ids(dir / "test_ids.txt", c, c.test);
  save_vocab(dir / "vocab.json", c.vocab);
  return {"corpus.jsonl", "train_ids.txt", "test_ids.txt", "vocab.json"};
}

PreparedCorpus load_prepared(const std::filesystem::path& dir) {
  PreparedCorpus c;
  c.reports = load_corpus(dir / "corpus.jsonl");
  if (c.reports.empty()) throw InvalidInput("corpus " + dir.string() + " is empty");
  c.body_part = c.reports.front().body_part;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < c.reports.size(); ++i) index.emplace(c.reports[i].id, i);
  const auto resolve = [&](const std::string& file) {
    std::vector<std::size_t> out;
    for (const auto& id : read_ids(dir / file)) {
      auto it = index.find(id);
      if (it == index.end()) throw InvalidInput(file + ": unknown report id " + id);
      out.push_back(it->second);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  c.train = resolve("train_ids.txt");
  c.test = resolve("test_ids.txt");
  c.vocab = load_vocab(dir / "vocab.json");
  return c;
}

TrainMode TrainMode::parse(std::string_view text, const MultiTaskSchema& schema) {
  TrainMode m;
  if (text == "multi") {
    m.kind = TrainKind::Multi;
  } else if (text == "segmenter") {
    m.kind = TrainKind::Segmenter;
  } else if (text.substr(0, 7) == "single:") {
    m.kind = TrainKind::Single;
    m.task = std::string(text.substr(7));
    if (!schema.find(m.task)) {
      std::string valid;
      for (const auto& t : schema.tasks()) valid += (valid.empty() ? "" : ", ") + t.name;
      throw ConfigError("mode: unknown task \"" + m.task + "\"; valid tasks: " + valid);
    }
  } else {
    throw ConfigError("mode: expected single:<task>, multi or segmenter, got \"" +
                      std::string(text) + "\"");
  }
  return m;
}

std::string TrainMode::name() const {
  switch (kind) {
    case TrainKind::Single: return "single-" + task;
    case TrainKind::Multi: return "multi";
    case TrainKind::Segmenter: return "segmenter";
  }
  return "";
}

std::uint64_t trial_seed(std::uint64_t run_seed, std::size_t trial) {
  return Rng(run_seed).split("trial").split(trial).next_u64();
}

std::uint64_t split_seed(std::uint64_t run_seed) {
  return Rng(run_seed).split("test-split").next_u64();
}

ModelConfig classifier_model(const RunConfig& cfg, const PreparedCorpus& corpus,
                             const TrainMode& mode) {
  MultiTaskSchema schema = schema_for(corpus.body_part);
  if (mode.kind == TrainKind::Single) schema = schema.subset(mode.task);
  return cfg.classifier.resolve(corpus.vocab.size(), HeadMode::SequenceClassifier, schema);
}

ModelConfig segmenter_model(const RunConfig& cfg, const PreparedCorpus& corpus) {
  return cfg.segmenter.resolve(corpus.vocab.size(), HeadMode::TokenClassifier, {});
}

LabeledDataset classifier_data(const PreparedCorpus& corpus, bool test_side, std::size_t max_len) {
  const auto reports = corpus.subset(test_side);
  const auto samples = segment_samples(reports);
  return classifier_dataset(samples, corpus.body_part, corpus.vocab, max_len);
}

LabeledDataset segmenter_data(const PreparedCorpus& corpus, bool test_side, std::size_t max_len) {
  const auto reports = corpus.subset(test_side);
  return {location_tag_schema(), segmenter_examples(reports, corpus.vocab, max_len)};
}

TrialOutcome run_trial(const RunConfig& cfg, const PreparedCorpus& corpus, const TrainMode& mode,
                       std::uint64_t seed, const EpochObserver& observer) {
  TrialOutcome out;
  if (mode.kind == TrainKind::Segmenter) {
    TrainConfig tc = cfg.segmenter_train;
    tc.seed = seed;
    const std::size_t len = cfg.segmenter.max_seq_len;
    out.train = train_token_tagger(segmenter_data(corpus, false, len), segmenter_model(cfg, corpus),
                                   tc, observer);
    out.test_f1["location"] =
        evaluate_location_f1(out.train.params, segmenter_data(corpus, true, len).examples);
    return out;
  }

  const std::size_t len = cfg.classifier.max_seq_len;
  const LabeledDataset train = classifier_data(corpus, false, len);
  const LabeledDataset test = classifier_data(corpus, true, len);
  const ModelConfig model = classifier_model(cfg, corpus, mode);
  if (mode.kind == TrainKind::Single) {
    TrainConfig tc = cfg.single;
    tc.seed = seed;
    out.train = train_single_task(train, mode.task, model, tc, observer);
    out.test_f1 = evaluate_macro_f1(out.train.params,
                                    project(test.examples, *test.schema.find(mode.task)));
  } else {
    TrainConfig tc = cfg.multi;
    tc.seed = seed;
    out.train = train_multi_task(train, model, tc, observer);
    out.test_f1 = evaluate_macro_f1(out.train.params, test.examples);
  }
  return out;
}

std::map<std::string, TaskSummary> summarize_trials(
    const std::vector<std::map<std::string, double>>& per_trial) {
  std::map<std::string, TaskSummary> out;
  for (const auto& trial : per_trial) {
    for (const auto& [task, f1] : trial) out[task].values.push_back(f1);
  }
  for (auto& [task, s] : out) {
    const double n = static_cast<double>(s.values.size());
    double sum = 0.0;
    for (double v : s.values) sum += v;
    s.mean = sum / n;
    if (s.values.size() > 1) {
      double ss = 0.0;
      for (double v : s.values) ss += (v - s.mean) * (v - s.mean);
      s.sd = std::sqrt(ss / (n - 1.0));
    }
  }
  return out;
}

std::vector<EpochAlignment> alignment_series(const std::vector<EpochGradientSnapshot>& a,
                                             const std::vector<EpochGradientSnapshot>& b) {
  std::vector<EpochAlignment> out;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t e = 0; e < n; ++e) {
    if (a[e].epoch != b[e].epoch) throw InvalidInput("alignment_series: epoch numbering differs");
    out.push_back({a[e].epoch, alignment_report(a[e].gradients, b[e].gradients)});
  }
  return out;
}

std::vector<std::vector<int>> probe_sequences(const PreparedCorpus& corpus, std::size_t n,
                                              std::size_t max_len) {
  const LabeledDataset test = classifier_data(corpus, true, max_len);
  std::vector<std::vector<int>> out;
  for (std::size_t i = 0; i < test.examples.size() && out.size() < n; ++i) {
    out.push_back(test.examples[i].tokens);
  }
  return out;
}

CkaReport model_cka(const ParameterStore& a, const ParameterStore& b,
                    const std::vector<std::vector<int>>& probe, CkaNumerator numerator) {
  const ModelConfig& ca = a.config;
  const ModelConfig& cb = b.config;
  if (ca.d_model != cb.d_model || ca.n_layers != cb.n_layers || ca.n_heads != cb.n_heads ||
      ca.d_ff != cb.d_ff || ca.vocab_size != cb.vocab_size || ca.max_seq_len != cb.max_seq_len) {
    throw InvalidInput("model_cka: topology mismatch: a = " + topology(ca) + ", b = " + topology(cb));
  }
  const Batch batch = Batch::from_sequences(probe, ca.max_seq_len);
  Rng unused(0);
  const ActivationStack sa = *forward(a, batch, false, unused, true).activations;
  const ActivationStack sb = *forward(b, batch, false, unused, true).activations;
  if (numerator == CkaNumerator::Squared) return layerwise_cka(sa, sb);

  CkaReport report = layerwise_cka(sa, sb);
  for (std::size_t l = 0; l < report.layers.size(); ++l) {
    auto& layer = report.layers[l];
    for (std::size_t p = 0; p < layer.values.size(); ++p) {
      layer.values[p] = linear_cka(sa.layers[l][p].activations, sb.layers[l][p].activations,
                                   CkaNumerator::Unsquared);
    }
    layer.stats = box_stats(layer.values);
  }
  return report;
}

LatencyComparison compare_latency(const ParameterStore& multi,
                                  const std::vector<const ParameterStore*>& singles,
                                  const std::vector<std::vector<int>>& batch_rows,
                                  std::size_t repeats) {
  using clock = std::chrono::steady_clock;
  const Batch batch = Batch::from_sequences(batch_rows, multi.config.max_seq_len);
  Rng unused(0);
  // One untimed pass of each model warms caches and the allocator.
  forward(multi, batch, false, unused);
  for (const auto* s : singles) forward(*s, batch, false, unused);

  std::vector<double> multi_ms, single_ms;
  for (std::size_t r = 0; r < repeats; ++r) {
    auto t0 = clock::now();
    forward(multi, batch, false, unused);
    multi_ms.push_back(std::chrono::duration<double, std::milli>(clock::now() - t0).count());
    t0 = clock::now();
    for (const auto* s : singles) forward(*s, batch, false, unused);
    single_ms.push_back(std::chrono::duration<double, std::milli>(clock::now() - t0).count());
  }
  LatencyComparison out;
  out.batch_size = batch_rows.size();
  out.repeats = repeats;
  out.multi_ms = median(multi_ms);
  out.single_ms = median(single_ms);
  out.speedup = out.multi_ms > 0.0 ? out.single_ms / out.multi_ms : 0.0;
  return out;
}

}  // namespace segalign
