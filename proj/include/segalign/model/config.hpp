// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace segalign {

/// Token ids reserved at the front of every vocabulary.
namespace special_tokens {
inline constexpr int kPad = 0;
inline constexpr int kUnk = 1;
inline constexpr int kCls = 2;
inline constexpr int kSep = 3;
inline constexpr int kCount = 4;
}  // namespace special_tokens

struct TaskSpec {
  std::string name;
  std::size_t n_classes = 2;
  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

/// Ordered task list; the stacked classifier emits one logit block per task
/// in this order.
class MultiTaskSchema {
 public:
  MultiTaskSchema() = default;
  explicit MultiTaskSchema(std::vector<TaskSpec> tasks);

  /// stenosis, disc, cord, foraminal: widths [3,3,2,2].
  static MultiTaskSchema cervical();
  /// stenosis, disc, nerve: widths [3,3,2].
  static MultiTaskSchema lumbar();
  static MultiTaskSchema single(std::string name, std::size_t n_classes);

  const std::vector<TaskSpec>& tasks() const noexcept { return tasks_; }
  std::size_t size() const noexcept { return tasks_.size(); }
  const TaskSpec& operator[](std::size_t i) const { return tasks_.at(i); }

  std::vector<std::size_t> widths() const;
  std::size_t total_width() const noexcept;
  std::optional<std::size_t> find(std::string_view name) const noexcept;
  /// Schema with just the named task; throws InvalidInput listing valid names.
  MultiTaskSchema subset(std::string_view name) const;

  friend bool operator==(const MultiTaskSchema&, const MultiTaskSchema&) = default;

 private:
  std::vector<TaskSpec> tasks_;
};

enum class HeadMode { TokenClassifier, SequenceClassifier };

std::string_view to_string(HeadMode m) noexcept;
HeadMode head_mode_from_string(std::string_view s);

struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t max_seq_len = 128;
  std::size_t d_model = 64;
  std::size_t n_layers = 4;
  std::size_t n_heads = 4;
  std::size_t d_ff = 128;
  double dropout_p = 0.5;
  double layer_norm_eps = 1e-5;
  HeadMode head_mode = HeadMode::SequenceClassifier;
  /// Sequence mode: one head per task. Token mode uses a fixed binary
  /// Location/Other schema and ignores this field.
  MultiTaskSchema schema;

  std::size_t head_dim() const noexcept { return n_heads == 0 ? 0 : d_model / n_heads; }
  /// Schema actually driving the heads (token mode substitutes the tag schema).
  MultiTaskSchema effective_schema() const;
  /// Throws InvalidInput naming the first violated invariant.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Binary Location/Other tagging schema used in token mode.
MultiTaskSchema location_tag_schema();

void to_json(nlohmann::json& j, const MultiTaskSchema& s);
void from_json(const nlohmann::json& j, MultiTaskSchema& s);
void to_json(nlohmann::json& j, const ModelConfig& c);
void from_json(const nlohmann::json& j, ModelConfig& c);

}  // namespace segalign
