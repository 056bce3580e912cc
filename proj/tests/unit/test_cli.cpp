// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "segalign/cli/commands.hpp"
#include "segalign/cli/experiment.hpp"
#include "segalign/cli/run_config.hpp"
#include "segalign/cli/run_dir.hpp"
#include "segalign/numerics/errors.hpp"
#include "segalign/pipeline/datasets.hpp"

using namespace segalign;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("segalign-test-cli-" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string config_error(const json& doc) {
  try {
    resolve_run_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("run config defaults round trip through the resolved document") {
  const RunConfig d = RunConfig::defaults();
  CHECK_NOTHROW(d.validate());
  CHECK(resolve_run_config(json::object()) == d);
  CHECK(resolve_run_config(run_config_json(d)) == d);
  const RunConfig c = RunConfig::defaults(BodyPart::Cervical);
  CHECK(resolve_run_config(run_config_json(c)) == c);
  CHECK(resolve_run_config(json{{"generator", {{"body_part", "cervical"}}}}) == c);
}

TEST_CASE("run config rejects unknown keys and wrong types with a dotted path") {
  CHECK(config_error({{"modle", json::object()}}).rfind("modle:", 0) == 0);
  CHECK(config_error({{"train", {{"single", {{"epocs", 3}}}}}}).rfind("train.single.epocs:", 0) == 0);
  CHECK(config_error({{"train", {{"single", {{"epochs", "three"}}}}}}).rfind("train.single.epochs:", 0) == 0);
  CHECK(config_error({{"train", {{"trials", -2}}}}).rfind("train.trials:", 0) == 0);
  CHECK(config_error({{"generator", {{"seed", 4}}}}).find("seed") != std::string::npos);
  CHECK(config_error({{"generator", {{"class_priors", {{"disc", {0.5, 0.6}}}}}}}).find("generator.class_priors.disc") !=
        std::string::npos);
  CHECK(config_error({{"generator", {{"test_fraction", 1.5}}}}).rfind("generator.test_fraction:", 0) == 0);
  CHECK(config_error({{"analysis", {{"cka_numerator", "cubed"}}}}).rfind("analysis.cka_numerator:", 0) == 0);

  const RunConfig r = resolve_run_config({{"train", {{"trials", 2}, {"multi", {{"epochs", 3}}}}}});
  CHECK(r.trials == 2);
  CHECK(r.multi.epochs == 3);
  CHECK(r.single == RunConfig::defaults().single);
}

TEST_CASE("seed resolution order") {
  ::unsetenv("SEGALIGN_SEED");
  CHECK(resolve_seed(std::nullopt) == 0);
  CHECK(resolve_seed(9) == 9);
  ::setenv("SEGALIGN_SEED", "42", 1);
  CHECK(resolve_seed(std::nullopt) == 42);
  CHECK(resolve_seed(9) == 9);
  for (const char* bad : {"abc", "-1", "12x", " 5"}) {
    ::setenv("SEGALIGN_SEED", bad, 1);
    CHECK_THROWS_AS(resolve_seed(std::nullopt), ConfigError);
  }
  ::unsetenv("SEGALIGN_SEED");
}

TEST_CASE("prepared corpus: report-level stratified split and train-only vocabulary") {
  GeneratorConfig g = GeneratorConfig::defaults(BodyPart::Lumbar);
  g.n_reports = 300;
  g.seed = 5;
  const PreparedCorpus c = prepare_corpus(g, 0.4, 2, split_seed(5));
  std::set<std::size_t> seen(c.train.begin(), c.train.end());
  for (std::size_t i : c.test) CHECK(seen.insert(i).second);
  CHECK(seen.size() == c.reports.size());
  CHECK(std::is_sorted(c.train.begin(), c.train.end()));
  CHECK(static_cast<double>(c.test.size()) == doctest::Approx(120).epsilon(0.05));

  const auto train = c.subset(false);
  CHECK(c.vocab == corpus_vocab(train, 2));

  // Every stratum holding at least two reports appears on both sides.
  const auto strata = report_strata(c.reports);
  std::map<int, std::pair<int, int>> sides;
  for (std::size_t i : c.train) ++sides[strata[i]].first;
  for (std::size_t i : c.test) ++sides[strata[i]].second;
  for (const auto& [s, n] : sides) {
    CAPTURE(s);
    if (n.first + n.second >= 5) {
      CHECK(n.first > 0);
      CHECK(n.second > 0);
    }
  }

  const PreparedCorpus again = prepare_corpus(g, 0.4, 2, split_seed(5));
  CHECK(again.test == c.test);
  CHECK(prepare_corpus(g, 0.4, 2, split_seed(6)).test != c.test);

  const fs::path dir = scratch("prepared");
  const auto files = save_prepared(dir, c);
  CHECK(files.size() == 4);
  const PreparedCorpus loaded = load_prepared(dir);
  CHECK(loaded.train == c.train);
  CHECK(loaded.test == c.test);
  CHECK(loaded.vocab == c.vocab);
  CHECK(loaded.body_part == c.body_part);
  REQUIRE(loaded.reports.size() == c.reports.size());
  CHECK(loaded.reports.front().text == c.reports.front().text);
  fs::remove_all(dir);
}

TEST_CASE("train modes and trial seeds") {
  const auto schema = schema_for(BodyPart::Lumbar);
  CHECK(TrainMode::parse("multi", schema).name() == "multi");
  CHECK(TrainMode::parse("segmenter", schema).kind == TrainKind::Segmenter);
  const TrainMode disc = TrainMode::parse("single:disc", schema);
  CHECK(disc.kind == TrainKind::Single);
  CHECK(disc.name() == "single-disc");
  try {
    TrainMode::parse("single:cord", schema);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("stenosis, disc, nerve") != std::string::npos);
  }
  CHECK_THROWS_AS(TrainMode::parse("both", schema), ConfigError);

  std::set<std::uint64_t> seeds;
  for (std::size_t k = 1; k <= 5; ++k) seeds.insert(trial_seed(3, k));
  seeds.insert(split_seed(3));
  CHECK(seeds.size() == 6);
  CHECK(trial_seed(3, 1) == trial_seed(3, 1));
}

TEST_CASE("trial summaries use the sample standard deviation") {
  const auto s = summarize_trials({{{"a", 1.0}}, {{"a", 2.0}}, {{"a", 3.0}}});
  CHECK(s.at("a").mean == doctest::Approx(2.0));
  CHECK(s.at("a").sd == doctest::Approx(1.0));
  CHECK(summarize_trials({{{"a", 0.5}}}).at("a").sd == 0.0);
}

TEST_CASE("sha256 and run directory manifest") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");

  const auto make = [](const fs::path& root) {
    RunDir dir(root, true);
    dir.write_text("b.csv", "x,y\n1,2\n");
    dir.write_json("a.json", {{"k", 1}});
    fs::create_directories(dir.path("sub"));
    std::ofstream(dir.path("sub/c.txt")) << "c";
    dir.add("sub");
    dir.finish("test", {"in.json"}, {{"section", {{"v", 1}}}}, 17);
  };
  const fs::path a = scratch("manifest-a"), b = scratch("manifest-b");
  make(a);
  make(b);
  CHECK(slurp(a / "manifest.json") == slurp(b / "manifest.json"));
  const json m = json::parse(slurp(a / "manifest.json"));
  CHECK(m.at("seed") == 17);
  CHECK(m.at("command") == "test");
  CHECK(m.at("config_sha256") == sha256_hex(slurp(a / "config.resolved.json")));
  std::vector<std::string> paths;
  for (const auto& f : m.at("files")) {
    paths.push_back(f.at("path"));
    CHECK(f.at("sha256") == file_sha256(a / f.at("path").get<std::string>()));
  }
  CHECK(paths == std::vector<std::string>{"a.json", "b.csv", "config.resolved.json", "sub/c.txt"});

  CHECK_THROWS_AS(RunDir(a, false), OutputExists);
  CHECK_NOTHROW(RunDir(a, true));
  CHECK(fs::is_empty(a));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("generate command contract") {
  const fs::path cfg = scratch("gen-config.json");
  std::ofstream(cfg) << R"({"generator": {"n_reports": 60}})";
  GenerateOptions o;
  o.common.config = cfg.string();
  o.common.seed = 7;
  o.out = scratch("gen-a").string();
  std::ostringstream log;
  cmd_generate(o, log);
  const fs::path first = o.out;
  o.out = scratch("gen-b").string();
  cmd_generate(o, log);
  for (const char* f : {"corpus.jsonl", "train_ids.txt", "test_ids.txt", "vocab.json", "manifest.json",
                        "config.resolved.json"}) {
    CAPTURE(f);
    CHECK(slurp(first / f) == slurp(fs::path(o.out) / f));
  }
  CHECK(load_prepared(first).reports.size() == 60);

  // Existing output without --force.
  CHECK_THROWS_AS(cmd_generate(o, log), OutputExists);
  o.common.force = true;
  CHECK_NOTHROW(cmd_generate(o, log));

  o.common.seed = 8;
  o.out = scratch("gen-c").string();
  cmd_generate(o, log);
  CHECK(slurp(first / "corpus.jsonl") != slurp(fs::path(o.out) / "corpus.jsonl"));

  o.body_part = "cervical";
  o.n_reports = 20;
  o.common.force = true;
  cmd_generate(o, log);
  CHECK(load_prepared(o.out).body_part == BodyPart::Cervical);
  CHECK(load_prepared(o.out).reports.size() == 20);

  std::ofstream(cfg) << R"({"generator": {"class_priors": {"disc": [0.5, 0.6]}}})";
  try {
    cmd_generate(o, log);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("generator.class_priors.disc") != std::string::npos);
  }
  for (const char* d : {"gen-a", "gen-b", "gen-c"}) fs::remove_all(scratch(d));
  fs::remove(cfg);
}
