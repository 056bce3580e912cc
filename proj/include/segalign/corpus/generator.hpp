// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "segalign/corpus/motion_segment.hpp"

namespace segalign {

struct GeneratorConfig {
  BodyPart body_part = BodyPart::Lumbar;
  std::size_t n_reports = 2000;
  std::size_t practice_styles = 24;
  /// Task name → class probabilities, one entry per schema task. Empty until
  /// filled by defaults().
  std::map<std::string, std::vector<double>> class_priors;
  double ocr_noise_rate = 0.25;
  /// Weight of the shared per-segment latent severity. 0 gives independent
  /// tasks.
  double task_correlation = 0.8;
  /// Fraction of reports written without any level mention.
  double no_segment_rate = 0.03;
  std::uint64_t seed = 0;

  /// Default priors per body part; see generator.cpp for the values.
  static GeneratorConfig defaults(BodyPart b);

  /// Throws ConfigError naming the offending field.
  void validate() const;
  friend bool operator==(const GeneratorConfig&, const GeneratorConfig&) = default;
};

void to_json(nlohmann::json& j, const GeneratorConfig& c);
/// Missing keys keep the body part's defaults; unknown keys are rejected.
void from_json(const nlohmann::json& j, GeneratorConfig& c);

struct LabelSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  MotionSegment segment = MotionSegment::NoSegment;
  friend bool operator==(const LabelSpan&, const LabelSpan&) = default;
};

struct AnnotatedReport {
  std::string id;
  std::size_t practice = 0;
  BodyPart body_part = BodyPart::Lumbar;
  std::string text;
  bool ocr = false;
  /// Gold severity per task (schema order) for each described segment.
  std::map<MotionSegment, std::vector<int>> labels;
  /// Template bank index used for each label.
  std::map<MotionSegment, std::vector<int>> templates;
  /// Every level mention in `text`.
  std::vector<LabelSpan> spans;
  friend bool operator==(const AnnotatedReport&, const AnnotatedReport&) = default;
};

void to_json(nlohmann::json& j, const AnnotatedReport& r);
void from_json(const nlohmann::json& j, AnnotatedReport& r);

std::vector<AnnotatedReport> generate_corpus(const GeneratorConfig& cfg);
/// Report `index` of the corpus (depends only on cfg and index).
AnnotatedReport generate_report(const GeneratorConfig& cfg, std::size_t index);

/// Finding sentences for task `task` at severity `cls`.
const std::vector<std::string>& template_bank(std::string_view task, int cls);

void write_corpus(std::ostream& out, const std::vector<AnnotatedReport>& reports);
std::vector<AnnotatedReport> read_corpus(std::istream& in);
void save_corpus(const std::filesystem::path& path, const std::vector<AnnotatedReport>& reports);
std::vector<AnnotatedReport> load_corpus(const std::filesystem::path& path);

}  // namespace segalign
