// SPDX-License-Identifier: Apache-2.0
#pragma once
// Command bodies behind the segalign executable. Each throws ConfigError for
// configuration problems (exit code 2) and other exceptions for runtime
// failures (exit code 1).

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace segalign {

struct CommonOptions {
  std::string config;  // empty: defaults only
  std::optional<std::uint64_t> seed;
  bool force = false;
};

struct GenerateOptions {
  CommonOptions common;
  std::string out;
  std::optional<std::string> body_part;
  std::optional<std::size_t> n_reports;
};
void cmd_generate(const GenerateOptions& o, std::ostream& log);

struct TrainOptions {
  CommonOptions common;
  std::string corpus;
  std::string out;
  std::string mode = "multi";
  std::optional<std::size_t> trials;
  std::size_t jobs = 1;
  /// Internal: run only this trial into <out>/trial-<k> and exit.
  std::optional<std::size_t> worker_trial;
};
void cmd_train(const TrainOptions& o, std::ostream& log);

struct AnalyzeOptions {
  CommonOptions common;
  std::string kind;  // "cka" or "grads"
  std::string a, b;
  std::string probe;  // corpus directory (cka)
  std::string out;
};
void cmd_analyze(const AnalyzeOptions& o, std::ostream& log);

struct PipelineOptions {
  CommonOptions common;
  std::string segmenter;
  std::string classifier;
  std::string vocab;
  std::string input;  // plain-text report or corpus JSONL
  std::string out;
  std::string format = "jsonl";
  std::vector<std::string> singles;  // single-task models for the latency comparison
  std::size_t latency_batch = 64;
  std::size_t latency_repeats = 20;
};
void cmd_pipeline(const PipelineOptions& o, std::ostream& log);

struct ReportOptions {
  CommonOptions common;
  std::string out;
};
void cmd_report(const ReportOptions& o, std::ostream& log);

}  // namespace segalign
