// SPDX-License-Identifier: Apache-2.0
#include "segalign/cli/run_config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>

#include "segalign/numerics/errors.hpp"

namespace segalign {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& why) {
  throw ConfigError(path + ": " + why);
}

bool same_kind(const json& want, const json& got) {
  if (want.is_number_unsigned()) {
    return got.is_number_unsigned() || (got.is_number_integer() && got.get<std::int64_t>() >= 0);
  }
  if (want.is_number()) return got.is_number();
  if (want.is_string()) return got.is_string();
  if (want.is_boolean()) return got.is_boolean();
  if (want.is_array()) return got.is_array();
  return want.type() == got.type();
}

// Copies `user` over `base` key by key; `base` defines the allowed keys.
void overlay(json& base, const json& user, const std::string& path) {
  if (!user.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : user.items()) {
    const std::string where = path.empty() ? key : path + "." + key;
    if (!base.contains(key)) fail(where, "unknown key");
    json& slot = base[key];
    if (slot.is_object()) {
      overlay(slot, value, where);
    } else {
      if (!same_kind(slot, value)) {
        fail(where, slot.is_number_unsigned() ? std::string("expected a non-negative integer")
                                              : "expected " + std::string(slot.type_name()));
      }
      slot = value;
    }
  }
}

json shape_json(const ModelShape& s) {
  return {{"max_seq_len", s.max_seq_len}, {"d_model", s.d_model}, {"n_layers", s.n_layers},
          {"n_heads", s.n_heads},         {"d_ff", s.d_ff},       {"dropout_p", s.dropout_p}};
}

ModelShape shape_from(const json& j) {
  ModelShape s;
  s.max_seq_len = j.at("max_seq_len").get<std::size_t>();
  s.d_model = j.at("d_model").get<std::size_t>();
  s.n_layers = j.at("n_layers").get<std::size_t>();
  s.n_heads = j.at("n_heads").get<std::size_t>();
  s.d_ff = j.at("d_ff").get<std::size_t>();
  s.dropout_p = j.at("dropout_p").get<double>();
  return s;
}

json train_json(const TrainConfig& c) {
  json j = c;
  j.erase("seed");
  j.erase("keep_batch_gradients");
  return j;
}

TrainConfig train_from(json j) {
  j["seed"] = 0;
  return j.get<TrainConfig>();
}

std::string numerator_name(CkaNumerator n) {
  return n == CkaNumerator::Squared ? "squared" : "unsquared";
}

}  // namespace

ModelConfig ModelShape::resolve(std::size_t vocab_size, HeadMode mode,
                                MultiTaskSchema schema) const {
  ModelConfig c;
  c.vocab_size = vocab_size;
  c.max_seq_len = max_seq_len;
  c.d_model = d_model;
  c.n_layers = n_layers;
  c.n_heads = n_heads;
  c.d_ff = d_ff;
  c.dropout_p = dropout_p;
  c.head_mode = mode;
  c.schema = mode == HeadMode::SequenceClassifier ? std::move(schema) : MultiTaskSchema{};
  return c;
}

RunConfig RunConfig::defaults(BodyPart body_part) {
  RunConfig c;
  c.generator = GeneratorConfig::defaults(body_part);

  c.segmenter.max_seq_len = 32;
  c.segmenter.dropout_p = 0.1;

  c.single = TrainConfig::single_task();
  c.single.lr_peak = 1e-3;
  c.multi = TrainConfig::multi_task();
  c.multi.lr_peak = 1.5e-3;
  c.segmenter_train = TrainConfig::single_task();
  c.segmenter_train.epochs = 5;
  c.segmenter_train.lr_peak = 1e-3;
  c.segmenter_train.weight_decay = 1e-3;
  return c;
}

void RunConfig::validate() const {
  generator.validate();
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) fail("generator.test_fraction", "must lie in (0, 1)");
  if (vocab_min_count == 0) fail("model.vocab_min_count", "must be at least 1");
  const auto check_shape = [](const ModelShape& s, const std::string& where) {
    ModelConfig probe = s.resolve(special_tokens::kCount + 1, HeadMode::SequenceClassifier,
                                  MultiTaskSchema::single("probe", 2));
    try {
      probe.validate();
    } catch (const InvalidInput& e) {
      fail(where, e.what());
    }
  };
  check_shape(classifier, "model.classifier");
  check_shape(segmenter, "model.segmenter");
  if (segmenter.max_seq_len < 2) fail("model.segmenter.max_seq_len", "must be at least 2");
  if (trials == 0) fail("train.trials", "must be at least 1");
  const auto check_train = [](const TrainConfig& t, const std::string& where) {
    try {
      t.validate();
    } catch (const std::exception& e) {
      fail(where, e.what());
    }
  };
  check_train(single, "train.single");
  check_train(multi, "train.multi");
  check_train(segmenter_train, "train.segmenter");
  if (analysis.probe_size < 2) fail("analysis.probe_size", "must be at least 2");
  if (!(analysis.control_correlation >= 0.0 && analysis.control_correlation <= 1.0)) {
    fail("analysis.control_correlation", "must lie in [0, 1]");
  }
}

nlohmann::json run_config_json(const RunConfig& c) {
  json gen = c.generator;
  gen.erase("seed");
  gen["test_fraction"] = c.test_fraction;
  return {
      {"generator", gen},
      {"model",
       {{"vocab_min_count", c.vocab_min_count},
        {"classifier", shape_json(c.classifier)},
        {"segmenter", shape_json(c.segmenter)}}},
      {"train",
       {{"trials", c.trials},
        {"single", train_json(c.single)},
        {"multi", train_json(c.multi)},
        {"segmenter", train_json(c.segmenter_train)}}},
      {"analysis",
       {{"probe_size", c.analysis.probe_size},
        {"cka_numerator", numerator_name(c.analysis.cka_numerator)},
        {"control_correlation", c.analysis.control_correlation}}},
      {"paths", {{"corpus", c.corpus_path}, {"out", c.out_path}}},
  };
}

RunConfig resolve_run_config(const nlohmann::json& doc) {
  if (!doc.is_object()) fail("config", "expected a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key != "generator" && key != "model" && key != "train" && key != "analysis" &&
        key != "paths") {
      fail(key, "unknown section");
    }
  }

  BodyPart part = BodyPart::Lumbar;
  json gen_doc = doc.value("generator", json::object());
  if (!gen_doc.is_object()) fail("generator", "expected an object");
  if (gen_doc.contains("body_part")) {
    try {
      part = body_part_from_string(gen_doc.at("body_part").get<std::string>());
    } catch (const std::exception& e) {
      fail("generator.body_part", e.what());
    }
  }

  const RunConfig defaults = RunConfig::defaults(part);
  json merged = run_config_json(defaults);
  // Generator priors are a map keyed by task; the generator parser owns that
  // section, including its unknown-key check.
  json generator_user = gen_doc;
  generator_user.erase("test_fraction");
  json rest = doc;
  if (gen_doc.contains("test_fraction")) {
    rest["generator"] = json{{"test_fraction", gen_doc["test_fraction"]}};
  } else {
    rest.erase("generator");
  }
  if (generator_user.contains("seed")) fail("generator.seed", "set the seed with --seed or SEGALIGN_SEED");
  const json gen_defaults = merged["generator"];
  merged["generator"] = json{{"test_fraction", gen_defaults["test_fraction"]}};
  overlay(merged, rest, "");

  RunConfig c;
  c.generator = defaults.generator;
  from_json(generator_user, c.generator);
  c.test_fraction = merged["generator"]["test_fraction"].get<double>();

  const json& model = merged["model"];
  c.vocab_min_count = model["vocab_min_count"].get<std::size_t>();
  c.classifier = shape_from(model["classifier"]);
  c.segmenter = shape_from(model["segmenter"]);

  const json& train = merged["train"];
  c.trials = train["trials"].get<std::size_t>();
  c.single = train_from(train["single"]);
  c.multi = train_from(train["multi"]);
  c.segmenter_train = train_from(train["segmenter"]);

  const json& analysis = merged["analysis"];
  c.analysis.probe_size = analysis["probe_size"].get<std::size_t>();
  const std::string numerator = analysis["cka_numerator"].get<std::string>();
  if (numerator == "squared") {
    c.analysis.cka_numerator = CkaNumerator::Squared;
  } else if (numerator == "unsquared") {
    c.analysis.cka_numerator = CkaNumerator::Unsquared;
  } else {
    fail("analysis.cka_numerator", "expected \"squared\" or \"unsquared\"");
  }
  c.analysis.control_correlation = analysis["control_correlation"].get<double>();

  c.corpus_path = merged["paths"]["corpus"].get<std::string>();
  c.out_path = merged["paths"]["out"].get<std::string>();
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path.string() + ": " + e.what());
  }
  return resolve_run_config(doc);
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("SEGALIGN_SEED"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      const unsigned long long v = std::stoull(env, &used);
      if (std::isdigit(static_cast<unsigned char>(env[0])) && used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("SEGALIGN_SEED: expected an unsigned integer, got \"" + std::string(env) + "\"");
  }
  return 0;
}

}  // namespace segalign
