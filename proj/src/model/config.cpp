// SPDX-License-Identifier: Apache-2.0
#include "segalign/model/config.hpp"

#include <numeric>
#include <nlohmann/json.hpp>

#include "segalign/numerics/errors.hpp"

namespace segalign {

MultiTaskSchema::MultiTaskSchema(std::vector<TaskSpec> tasks) : tasks_(std::move(tasks)) {
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    if (tasks_[i].n_classes < 2) {
      throw InvalidInput("task '" + tasks_[i].name + "' needs at least 2 classes");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (tasks_[j].name == tasks_[i].name) {
        throw InvalidInput("duplicate task name '" + tasks_[i].name + "'");
      }
    }
  }
}

MultiTaskSchema MultiTaskSchema::cervical() {
  return MultiTaskSchema({{"stenosis", 3}, {"disc", 3}, {"cord", 2}, {"foraminal", 2}});
}

MultiTaskSchema MultiTaskSchema::lumbar() {
  return MultiTaskSchema({{"stenosis", 3}, {"disc", 3}, {"nerve", 2}});
}

MultiTaskSchema MultiTaskSchema::single(std::string name, std::size_t n_classes) {
  return MultiTaskSchema({{std::move(name), n_classes}});
}

std::vector<std::size_t> MultiTaskSchema::widths() const {
  std::vector<std::size_t> w;
  for (const auto& t : tasks_) w.push_back(t.n_classes);
  return w;
}

std::size_t MultiTaskSchema::total_width() const noexcept {
  std::size_t n = 0;
  for (const auto& t : tasks_) n += t.n_classes;
  return n;
}

std::optional<std::size_t> MultiTaskSchema::find(std::string_view name) const noexcept {
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    if (tasks_[i].name == name) return i;
  }
  return std::nullopt;
}

MultiTaskSchema MultiTaskSchema::subset(std::string_view name) const {
  if (auto i = find(name)) return MultiTaskSchema({tasks_[*i]});
  std::string valid;
  for (const auto& t : tasks_) valid += (valid.empty() ? "" : ", ") + t.name;
  throw InvalidInput("unknown task '" + std::string(name) + "'; valid tasks: " + valid);
}

MultiTaskSchema location_tag_schema() { return MultiTaskSchema::single("location", 2); }

std::string_view to_string(HeadMode m) noexcept {
  return m == HeadMode::TokenClassifier ? "token_classifier" : "sequence_classifier";
}

HeadMode head_mode_from_string(std::string_view s) {
  if (s == "token_classifier") return HeadMode::TokenClassifier;
  if (s == "sequence_classifier") return HeadMode::SequenceClassifier;
  throw InvalidInput("unknown head_mode '" + std::string(s) + "'");
}

MultiTaskSchema ModelConfig::effective_schema() const {
  return head_mode == HeadMode::TokenClassifier ? location_tag_schema() : schema;
}

void ModelConfig::validate() const {
  auto fail = [](const std::string& msg) { throw InvalidInput("model config: " + msg); };
  if (vocab_size <= static_cast<std::size_t>(special_tokens::kCount)) {
    fail("vocab_size must exceed the special-token count");
  }
  if (max_seq_len < 2) fail("max_seq_len must be >= 2");
  if (d_model == 0 || n_heads == 0 || n_layers == 0 || d_ff == 0) {
    fail("d_model, n_heads, n_layers, d_ff must be positive");
  }
  if (d_model % n_heads != 0) {
    fail("d_model " + std::to_string(d_model) + " is not divisible by n_heads " +
         std::to_string(n_heads));
  }
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) fail("dropout_p must be in [0,1)");
  if (!(layer_norm_eps > 0.0)) fail("layer_norm_eps must be positive");
  if (head_mode == HeadMode::SequenceClassifier && schema.size() == 0) {
    fail("sequence classifier needs at least one task");
  }
}

void to_json(nlohmann::json& j, const MultiTaskSchema& s) {
  j = nlohmann::json::array();
  for (const auto& t : s.tasks()) j.push_back({{"name", t.name}, {"n_classes", t.n_classes}});
}

void from_json(const nlohmann::json& j, MultiTaskSchema& s) {
  std::vector<TaskSpec> tasks;
  for (const auto& t : j) {
    tasks.push_back({t.at("name").get<std::string>(), t.at("n_classes").get<std::size_t>()});
  }
  s = MultiTaskSchema(std::move(tasks));
}

void to_json(nlohmann::json& j, const ModelConfig& c) {
  j = {{"vocab_size", c.vocab_size},
       {"max_seq_len", c.max_seq_len},
       {"d_model", c.d_model},
       {"n_layers", c.n_layers},
       {"n_heads", c.n_heads},
       {"d_ff", c.d_ff},
       {"dropout_p", c.dropout_p},
       {"layer_norm_eps", c.layer_norm_eps},
       {"head_mode", std::string(to_string(c.head_mode))},
       {"schema", c.schema}};
}

void from_json(const nlohmann::json& j, ModelConfig& c) {
  c.vocab_size = j.at("vocab_size").get<std::size_t>();
  c.max_seq_len = j.at("max_seq_len").get<std::size_t>();
  c.d_model = j.at("d_model").get<std::size_t>();
  c.n_layers = j.at("n_layers").get<std::size_t>();
  c.n_heads = j.at("n_heads").get<std::size_t>();
  c.d_ff = j.at("d_ff").get<std::size_t>();
  c.dropout_p = j.at("dropout_p").get<double>();
  c.layer_norm_eps = j.value("layer_norm_eps", 1e-5);
  c.head_mode = head_mode_from_string(j.at("head_mode").get<std::string>());
  c.schema = j.at("schema").get<MultiTaskSchema>();
}

}  // namespace segalign
