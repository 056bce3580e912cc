// SPDX-License-Identifier: Apache-2.0
#pragma once
// Building blocks shared by the commands and the acceptance runs: corpus
// preparation with a report-level test split, trial training, evaluation,
// trial summaries, gradient-alignment series, model-to-model CKA and
// inference latency.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "segalign/analysis/cka.hpp"
#include "segalign/analysis/export.hpp"
#include "segalign/cli/run_config.hpp"
#include "segalign/corpus/generator.hpp"
#include "segalign/corpus/vocab.hpp"
#include "segalign/pipeline/datasets.hpp"
#include "segalign/train/trainer.hpp"

namespace segalign {

struct PreparedCorpus {
  BodyPart body_part = BodyPart::Lumbar;
  std::vector<AnnotatedReport> reports;
  std::vector<std::size_t> train;  // report indices, ascending
  std::vector<std::size_t> test;
  Vocab vocab;  // built from the training reports only

  std::vector<AnnotatedReport> subset(bool test_side) const;
};

/// Split stratum of each report: the largest first-task class over its
/// segments, or one extra stratum for reports without segments. Strata
/// with a single member are folded into stratum 0.
std::vector<int> report_strata(const std::vector<AnnotatedReport>& reports);

PreparedCorpus prepare_corpus(const GeneratorConfig& generator, double test_fraction,
                              std::size_t vocab_min_count, std::uint64_t split_seed);

/// corpus.jsonl, train_ids.txt, test_ids.txt and vocab.json under `dir`.
/// Returns the written file names.
std::vector<std::string> save_prepared(const std::filesystem::path& dir, const PreparedCorpus& c);
PreparedCorpus load_prepared(const std::filesystem::path& dir);

enum class TrainKind { Single, Multi, Segmenter };

struct TrainMode {
  TrainKind kind = TrainKind::Multi;
  std::string task;  // Single only

  /// "single:<task>", "multi" or "segmenter". Task names are checked against
  /// `schema`; a bad name raises ConfigError listing the valid ones.
  static TrainMode parse(std::string_view text, const MultiTaskSchema& schema);
  std::string name() const;
};

/// Seed of trial k (1-based) under a run seed.
std::uint64_t trial_seed(std::uint64_t run_seed, std::size_t trial);
/// Seed of the report-level test split under a run seed.
std::uint64_t split_seed(std::uint64_t run_seed);

struct TrialOutcome {
  TrainResult train;
  std::map<std::string, double> test_f1;  // macro F1 per task, or "location"
};

ModelConfig classifier_model(const RunConfig& cfg, const PreparedCorpus& corpus,
                             const TrainMode& mode);
ModelConfig segmenter_model(const RunConfig& cfg, const PreparedCorpus& corpus);

LabeledDataset classifier_data(const PreparedCorpus& corpus, bool test_side, std::size_t max_len);
LabeledDataset segmenter_data(const PreparedCorpus& corpus, bool test_side, std::size_t max_len);

TrialOutcome run_trial(const RunConfig& cfg, const PreparedCorpus& corpus, const TrainMode& mode,
                       std::uint64_t seed, const EpochObserver& observer = {});

struct TaskSummary {
  std::vector<double> values;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation, 0 for a single trial
};

std::map<std::string, TaskSummary> summarize_trials(
    const std::vector<std::map<std::string, double>>& per_trial);

/// APAG, layer proportions and cosine for each epoch both runs reached.
std::vector<EpochAlignment> alignment_series(const std::vector<EpochGradientSnapshot>& a,
                                             const std::vector<EpochGradientSnapshot>& b);

/// Token sequences of the first `n` test-side segment samples.
std::vector<std::vector<int>> probe_sequences(const PreparedCorpus& corpus, std::size_t n,
                                              std::size_t max_len);

/// Layerwise CKA of two encoders on one probe batch. Throws InvalidInput
/// with both configurations when the encoder topologies differ.
CkaReport model_cka(const ParameterStore& a, const ParameterStore& b,
                    const std::vector<std::vector<int>>& probe,
                    CkaNumerator numerator = CkaNumerator::Squared);

struct LatencyComparison {
  std::size_t batch_size = 0;
  std::size_t repeats = 0;
  double multi_ms = 0.0;   // median of one multi-task forward
  double single_ms = 0.0;  // median of the sequential single-task forwards
  double speedup = 0.0;
};

/// Wall-clock medians over `repeats` evaluation-mode forwards of one batch.
LatencyComparison compare_latency(const ParameterStore& multi,
                                  const std::vector<const ParameterStore*>& singles,
                                  const std::vector<std::vector<int>>& batch,
                                  std::size_t repeats);

}  // namespace segalign
