// SPDX-License-Identifier: Apache-2.0
#pragma once
// Run configuration shared by every command. The JSON document has the
// sections generator / model / train / analysis / paths; every field is
// optional and falls back to the desk-scale defaults below. Unknown keys
// and mistyped values raise ConfigError naming the dotted field path.
//
// The seed is not part of the document: it comes from --seed, then the
// SEGALIGN_SEED environment variable, then 0.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "segalign/analysis/cka.hpp"
#include "segalign/corpus/generator.hpp"
#include "segalign/model/config.hpp"
#include "segalign/train/train_config.hpp"

namespace segalign {

/// Encoder hyperparameters without the corpus-dependent vocabulary and schema.
struct ModelShape {
  std::size_t max_seq_len = 64;
  std::size_t d_model = 32;
  std::size_t n_layers = 2;
  std::size_t n_heads = 2;
  std::size_t d_ff = 64;
  double dropout_p = 0.5;

  ModelConfig resolve(std::size_t vocab_size, HeadMode mode, MultiTaskSchema schema) const;
  friend bool operator==(const ModelShape&, const ModelShape&) = default;
};

struct AnalysisConfig {
  std::size_t probe_size = 256;
  CkaNumerator cka_numerator = CkaNumerator::Squared;
  /// Task correlation of the negative-control corpus.
  double control_correlation = 0.0;
  friend bool operator==(const AnalysisConfig&, const AnalysisConfig&) = default;
};

struct RunConfig {
  GeneratorConfig generator;  // seed is overwritten by the run seed
  double test_fraction = 0.4;

  std::size_t vocab_min_count = 2;
  ModelShape classifier;
  ModelShape segmenter;

  std::size_t trials = 5;
  TrainConfig single;
  TrainConfig multi;
  TrainConfig segmenter_train;

  AnalysisConfig analysis;

  std::string corpus_path;  // paths.corpus
  std::string out_path;     // paths.out

  static RunConfig defaults(BodyPart body_part = BodyPart::Lumbar);
  void validate() const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

nlohmann::json run_config_json(const RunConfig& c);
/// Overlays `doc` on the defaults for its generator.body_part.
RunConfig resolve_run_config(const nlohmann::json& doc);
RunConfig load_run_config(const std::filesystem::path& path);

/// --seed when given, else SEGALIGN_SEED, else 0.
std::uint64_t resolve_seed(std::optional<std::uint64_t> flag);

}  // namespace segalign
