// SPDX-License-Identifier: Apache-2.0
#include "segalign/cli/commands.hpp"

#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "segalign/analysis/alignment.hpp"
#include "segalign/analysis/export.hpp"
#include "segalign/cli/experiment.hpp"
#include "segalign/cli/run_config.hpp"
#include "segalign/cli/run_dir.hpp"
#include "segalign/model/checkpoint.hpp"
#include "segalign/numerics/errors.hpp"
#include "segalign/pipeline/pipeline.hpp"

extern char** environ;

namespace segalign {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path.string());
  return json::parse(in);
}

json config_document(const CommonOptions& o) {
  if (o.config.empty()) return json::object();
  std::ifstream in(o.config);
  if (!in) throw ConfigError("config: cannot open " + o.config);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + o.config + ": " + e.what());
  }
}

std::vector<std::string> config_inputs(const CommonOptions& o) {
  return o.config.empty() ? std::vector<std::string>{} : std::vector<std::string>{o.config};
}

std::string require_path(const std::string& flag_value, const std::string& config_value,
                         const std::string& flag) {
  if (!flag_value.empty()) return flag_value;
  if (!config_value.empty()) return config_value;
  throw ConfigError(flag + " is required");
}

std::string vocab_digest(const Vocab& v) { return sha256_hex(json(v).dump()); }

std::string trial_name(std::size_t k) { return "trial-" + std::to_string(k); }

// Checkpoint, per-epoch metrics and gradient snapshots, and test scores of
// one trial under `dir`.
void write_trial(const fs::path& dir, const TrainMode& mode, std::size_t trial,
                 std::uint64_t seed, const TrialOutcome& outcome, const Vocab& vocab) {
  fs::create_directories(dir);
  const json extra = {{"mode", mode.name()},
                      {"trial", trial},
                      {"seed", seed},
                      {"best_epoch", outcome.train.best_epoch},
                      {"vocab_sha256", vocab_digest(vocab)}};
  save_checkpoint(dir / "model", outcome.train.params, extra);
  {
    std::ofstream out(dir / "metrics.jsonl", std::ios::binary);
    for (const auto& m : outcome.train.history) out << to_json_line(m).dump() << '\n';
  }
  fs::create_directories(dir / "grads");
  for (const auto& snap : outcome.train.snapshots) {
    save_gradients(dir / "grads" / ("epoch-" + std::to_string(snap.epoch)),
                   outcome.train.params.config, snap.gradients,
                   {{"epoch", snap.epoch}, {"task", snap.task}});
  }
  std::ofstream out(dir / "test_f1.json", std::ios::binary);
  out << json{{"trial", trial},
              {"seed", seed},
              {"best_epoch", outcome.train.best_epoch},
              {"test_macro_f1", outcome.test_f1}}
             .dump(2)
      << '\n';
}

std::map<std::string, double> read_trial_scores(const fs::path& dir) {
  return read_json_file(dir / "test_f1.json").at("test_macro_f1").get<std::map<std::string, double>>();
}

std::string summary_csv(const std::map<std::string, TaskSummary>& s) {
  std::ostringstream os;
  std::size_t trials = s.empty() ? 0 : s.begin()->second.values.size();
  os << "task,mean,sd";
  for (std::size_t k = 1; k <= trials; ++k) os << ",trial_" << k;
  os << '\n';
  for (const auto& [task, t] : s) {
    os << task << ',' << format_real(t.mean) << ',' << format_real(t.sd);
    for (double v : t.values) os << ',' << format_real(v);
    os << '\n';
  }
  return os.str();
}

json summary_json(const std::map<std::string, TaskSummary>& s) {
  json out = json::object();
  for (const auto& [task, t] : s) out[task] = {{"mean", t.mean}, {"sd", t.sd}, {"values", t.values}};
  return out;
}

std::vector<EpochGradientSnapshot> load_snapshots(const fs::path& trial_dir, ModelConfig& config) {
  std::vector<std::pair<std::size_t, fs::path>> stems;
  const fs::path grads = trial_dir / "grads";
  if (!fs::is_directory(grads)) throw InvalidInput(grads.string() + " does not exist");
  for (const auto& entry : fs::directory_iterator(grads)) {
    if (entry.path().extension() != ".json") continue;
    const std::string stem = entry.path().stem().string();
    if (stem.rfind("epoch-", 0) != 0) continue;
    stems.emplace_back(std::stoul(stem.substr(6)), entry.path().parent_path() / stem);
  }
  std::sort(stems.begin(), stems.end());
  std::vector<EpochGradientSnapshot> out;
  for (const auto& [epoch, stem] : stems) {
    GradientDump dump = load_gradients(stem);
    config = dump.config;
    out.push_back({epoch, dump.meta.value("task", std::string()), std::move(dump.gradients), {}});
  }
  if (out.empty()) throw InvalidInput("no gradient snapshots under " + grads.string());
  return out;
}

// A prepared corpus directory probes its test side. A JSONL file probes
// every report in it, encoded with the vocabulary of its directory.
PreparedCorpus load_probe_corpus(const fs::path& path) {
  if (fs::is_directory(path)) return load_prepared(path);
  PreparedCorpus c;
  c.reports = load_corpus(path);
  c.vocab = load_vocab(path.parent_path() / "vocab.json");
  if (!c.reports.empty()) c.body_part = c.reports.front().body_part;
  for (std::size_t i = 0; i < c.reports.size(); ++i) c.test.push_back(i);
  return c;
}

std::string describe(const ModelConfig& c) { return json(c).dump(); }

void require_same_encoder(const ModelConfig& a, const ModelConfig& b) {
  if (a.d_model != b.d_model || a.n_layers != b.n_layers || a.n_heads != b.n_heads ||
      a.d_ff != b.d_ff || a.vocab_size != b.vocab_size || a.max_seq_len != b.max_seq_len) {
    throw InvalidInput("topology mismatch:\n  a: " + describe(a) + "\n  b: " + describe(b));
  }
}

std::string pair_name(const std::string& a, const std::string& b) { return a + "_" + b; }

// Runs `argv` for each worker trial with at most `jobs` alive at once.
void run_workers(const std::vector<std::vector<std::string>>& commands, std::size_t jobs) {
  std::vector<pid_t> running;
  bool failed = false;
  const auto reap_one = [&]() {
    int status = 0;
    const pid_t pid = ::wait(&status);
    if (pid < 0) throw std::runtime_error("wait failed");
    running.erase(std::remove(running.begin(), running.end(), pid), running.end());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) failed = true;
  };
  for (const auto& args : commands) {
    while (running.size() >= jobs) reap_one();
    std::vector<char*> argv;
    for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    pid_t pid = 0;
    if (::posix_spawn(&pid, "/proc/self/exe", nullptr, nullptr, argv.data(), environ) != 0) {
      throw std::runtime_error("cannot spawn worker process");
    }
    running.push_back(pid);
  }
  while (!running.empty()) reap_one();
  if (failed) throw std::runtime_error("a worker trial failed");
}

struct TrainedRun {
  std::map<std::string, TaskSummary> summary;
  std::vector<TrialOutcome> first;  // trial 1 only, kept in memory
};

// All trials of one mode, written to <dir>/trial-<k>.
TrainedRun train_trials(const fs::path& dir, const RunConfig& cfg, const PreparedCorpus& corpus,
                        const TrainMode& mode, std::uint64_t seed, std::size_t trials,
                        std::ostream& log) {
  TrainedRun run;
  std::vector<std::map<std::string, double>> scores;
  for (std::size_t k = 1; k <= trials; ++k) {
    const std::uint64_t s = trial_seed(seed, k);
    TrialOutcome outcome = run_trial(cfg, corpus, mode, s);
    write_trial(dir / trial_name(k), mode, k, s, outcome, corpus.vocab);
    log << mode.name() << " trial " << k << ':';
    for (const auto& [task, f1] : outcome.test_f1) log << ' ' << task << '=' << format_real(f1);
    log << '\n';
    scores.push_back(outcome.test_f1);
    if (k == 1) run.first.push_back(std::move(outcome));
  }
  run.summary = summarize_trials(scores);
  return run;
}

}  // namespace

void cmd_generate(const GenerateOptions& o, std::ostream& log) {
  json doc = config_document(o.common);
  if (o.body_part || o.n_reports) {
    if (!doc.contains("generator")) doc["generator"] = json::object();
    if (o.body_part) doc["generator"]["body_part"] = *o.body_part;
    if (o.n_reports) doc["generator"]["n_reports"] = *o.n_reports;
  }
  RunConfig cfg = resolve_run_config(doc);
  const std::uint64_t seed = resolve_seed(o.common.seed);
  cfg.generator.seed = seed;
  const std::string out = require_path(o.out, cfg.out_path, "--out");

  RunDir dir(out, o.common.force);
  const PreparedCorpus corpus =
      prepare_corpus(cfg.generator, cfg.test_fraction, cfg.vocab_min_count, split_seed(seed));
  for (const auto& f : save_prepared(dir.root(), corpus)) dir.add(f);
  dir.finish("generate", config_inputs(o.common), run_config_json(cfg), seed);
  log << "generated " << corpus.reports.size() << " " << to_string(corpus.body_part)
      << " reports (" << corpus.train.size() << " train, " << corpus.test.size()
      << " test), vocabulary " << corpus.vocab.size() << " -> " << out << '\n';
}

void cmd_train(const TrainOptions& o, std::ostream& log) {
  const RunConfig cfg = resolve_run_config(config_document(o.common));
  const std::uint64_t seed = resolve_seed(o.common.seed);
  const std::string corpus_dir = require_path(o.corpus, cfg.corpus_path, "--corpus");
  const std::string out = require_path(o.out, cfg.out_path, "--out");
  if (o.jobs == 0) throw ConfigError("--jobs: must be at least 1");
  const std::size_t trials = o.trials.value_or(cfg.trials);
  if (trials == 0) throw ConfigError("--trials: must be at least 1");

  const PreparedCorpus corpus = load_prepared(corpus_dir);
  const TrainMode mode = TrainMode::parse(o.mode, schema_for(corpus.body_part));

  if (o.worker_trial) {
    const std::size_t k = *o.worker_trial;
    const fs::path dir = fs::path(out) / trial_name(k);
    prepare_output_dir(dir, true);
    const std::uint64_t s = trial_seed(seed, k);
    write_trial(dir, mode, k, s, run_trial(cfg, corpus, mode, s), corpus.vocab);
    return;
  }

  RunDir dir(out, o.common.force);
  if (o.jobs > 1) {
    std::vector<std::vector<std::string>> commands;
    for (std::size_t k = 1; k <= trials; ++k) {
      std::vector<std::string> args{"segalign",  "train",        "--corpus", corpus_dir,
                                    "--out",     out,            "--mode",   o.mode,
                                    "--seed",    std::to_string(seed), "--worker-trial",
                                    std::to_string(k)};
      if (!o.common.config.empty()) {
        args.push_back("--config");
        args.push_back(o.common.config);
      }
      commands.push_back(std::move(args));
    }
    run_workers(commands, o.jobs);
  } else {
    for (std::size_t k = 1; k <= trials; ++k) {
      const std::uint64_t s = trial_seed(seed, k);
      write_trial(dir.path(trial_name(k)), mode, k, s, run_trial(cfg, corpus, mode, s),
                  corpus.vocab);
    }
  }

  std::vector<std::map<std::string, double>> scores;
  for (std::size_t k = 1; k <= trials; ++k) {
    scores.push_back(read_trial_scores(dir.path(trial_name(k))));
    dir.add(trial_name(k));
  }
  const auto summary = summarize_trials(scores);
  const std::size_t params =
      load_checkpoint(dir.path(trial_name(1)) / "model").params.parameter_count();
  dir.write_text("summary.csv", summary_csv(summary));
  dir.write_json("summary.json", {{"mode", mode.name()},
                                  {"trials", trials},
                                  {"parameter_count", params},
                                  {"test_macro_f1", summary_json(summary)}});
  dir.finish("train", [&] {
    auto in = config_inputs(o.common);
    in.push_back(corpus_dir);
    return in;
  }(), run_config_json(cfg), seed);

  log << mode.name() << " over " << trials << " trial(s), " << params << " parameters\n";
  for (const auto& [task, s] : summary) {
    log << "  " << task << ": " << format_real(s.mean) << " +/- " << format_real(s.sd) << '\n';
  }
}

void cmd_analyze(const AnalyzeOptions& o, std::ostream& log) {
  const RunConfig cfg = resolve_run_config(config_document(o.common));
  const std::uint64_t seed = resolve_seed(o.common.seed);
  if (o.a.empty() || o.b.empty()) throw ConfigError("--a and --b are required");
  const std::string out = require_path(o.out, cfg.out_path, "--out");
  std::vector<std::string> inputs = config_inputs(o.common);
  inputs.push_back(o.a);
  inputs.push_back(o.b);

  if (o.kind == "cka") {
    const std::string probe_dir = require_path(o.probe, cfg.corpus_path, "--probe");
    inputs.push_back(probe_dir);
    const LoadedCheckpoint a = load_checkpoint(o.a);
    const LoadedCheckpoint b = load_checkpoint(o.b);
    require_same_encoder(a.params.config, b.params.config);
    const PreparedCorpus corpus = load_probe_corpus(probe_dir);
    const std::string digest = vocab_digest(corpus.vocab);
    for (const auto* ck : {&a, &b}) {
      if (ck->extra.contains("vocab_sha256") && ck->extra["vocab_sha256"] != digest) {
        throw InvalidInput("vocabulary of the probe corpus differs from the models' vocabulary");
      }
    }
    const auto probe = probe_sequences(corpus, cfg.analysis.probe_size, a.params.config.max_seq_len);
    const CkaReport report = model_cka(a.params, b.params, probe, cfg.analysis.cka_numerator);
    RunDir dir(out, o.common.force);
    dir.write_text("cka.csv", cka_csv(report));
    dir.write_json("cka.json", cka_json(report));
    dir.finish("analyze cka", inputs, run_config_json(cfg), seed);
    for (const auto& layer : report.layers) {
      log << "layer " << layer.layer << " median CKA " << format_real(layer.stats.median) << '\n';
    }
  } else if (o.kind == "grads") {
    ModelConfig ca, cb;
    const auto sa = load_snapshots(o.a, ca);
    const auto sb = load_snapshots(o.b, cb);
    require_same_encoder(ca, cb);
    const auto series = alignment_series(sa, sb);
    RunDir dir(out, o.common.force);
    dir.write_text("apag_epochs.csv", apag_epochs_csv(series));
    dir.write_text("layer_proportions.csv", layer_proportions_csv(series.back().report));
    dir.write_json("alignment.json", alignment_json(series));
    dir.finish("analyze grads", inputs, run_config_json(cfg), seed);
    for (const auto& e : series) {
      log << "epoch " << e.epoch << " APAG " << format_real(e.report.apag) << " cosine "
          << format_real(e.report.cosine.scalar) << '\n';
    }
  } else {
    throw ConfigError("analyze: kind must be cka or grads, got \"" + o.kind + "\"");
  }
}

void cmd_pipeline(const PipelineOptions& o, std::ostream& log) {
  const RunConfig cfg = resolve_run_config(config_document(o.common));
  const std::uint64_t seed = resolve_seed(o.common.seed);
  if (o.segmenter.empty() || o.classifier.empty() || o.vocab.empty() || o.input.empty()) {
    throw ConfigError("--segmenter, --classifier, --vocab and --input are required");
  }
  if (o.format != "jsonl" && o.format != "csv") {
    throw ConfigError("--format: expected jsonl or csv, got \"" + o.format + "\"");
  }
  const std::string out = require_path(o.out, cfg.out_path, "--out");

  const LoadedCheckpoint segmenter = load_checkpoint(o.segmenter);
  const LoadedCheckpoint classifier = load_checkpoint(o.classifier);
  const Vocab vocab = load_vocab(o.vocab);
  const std::string digest = vocab_digest(vocab);
  std::vector<LoadedCheckpoint> singles;
  for (const auto& p : o.singles) singles.push_back(load_checkpoint(p));
  const auto check_vocab = [&](const LoadedCheckpoint& ck, const std::string& which) {
    if (ck.params.config.vocab_size != vocab.size() ||
        (ck.extra.contains("vocab_sha256") && ck.extra["vocab_sha256"] != digest)) {
      throw InvalidInput("vocab mismatch: " + which + " was trained with a different vocabulary");
    }
  };
  check_vocab(segmenter, "segmenter");
  check_vocab(classifier, "classifier");
  for (std::size_t i = 0; i < singles.size(); ++i) check_vocab(singles[i], o.singles[i]);

  std::vector<std::pair<std::string, std::string>> reports;
  if (fs::path(o.input).extension() == ".jsonl") {
    for (auto& r : load_corpus(o.input)) reports.emplace_back(r.id, std::move(r.text));
  } else {
    std::ifstream in(o.input, std::ios::binary);
    if (!in) throw InvalidInput("cannot open " + o.input);
    std::ostringstream text;
    text << in.rdbuf();
    reports.emplace_back(fs::path(o.input).stem().string(), text.str());
  }

  const MultiTaskSchema schema = classifier.params.config.schema;
  std::ostringstream rendered;
  if (o.format == "csv") {
    rendered << "report,segment";
    for (const auto& t : schema.tasks()) {
      rendered << ',' << t.name;
      for (std::size_t c = 0; c < t.n_classes; ++c) rendered << ',' << t.name << "_p" << c;
    }
    rendered << '\n';
  }
  std::size_t segments = 0, empty_reports = 0;
  std::vector<std::vector<int>> latency_rows;
  const auto t0 = std::chrono::steady_clock::now();
  for (const auto& [id, text] : reports) {
    const PipelineResult result = run_pipeline(text, segmenter.params, classifier.params, vocab);
    if (result.no_segments_found()) ++empty_reports;
    for (const auto& p : result.predictions) {
      ++segments;
      if (o.format == "jsonl") {
        rendered << prediction_record(id, p, schema).dump() << '\n';
      } else {
        rendered << id << ',' << to_string(p.segment);
        for (std::size_t t = 0; t < schema.size(); ++t) {
          rendered << ',' << p.classes[t];
          for (double v : p.probabilities[t]) rendered << ',' << format_real(v);
        }
        rendered << '\n';
      }
    }
    for (const auto& [seg, seg_text] : result.report.segments) {
      if (latency_rows.size() < o.latency_batch) {
        latency_rows.push_back(encode_segment_text(seg_text, vocab, classifier.params.config.max_seq_len).ids);
      }
    }
  }
  const double total_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

  json summary = {{"reports", reports.size()},
                  {"segments", segments},
                  {"no_motion_segments_found", empty_reports},
                  {"ms_per_report", reports.empty() ? 0.0 : total_ms / static_cast<double>(reports.size())}};
  if (!singles.empty() && !latency_rows.empty()) {
    for (std::size_t i = 0; latency_rows.size() < o.latency_batch; ++i) {
      latency_rows.push_back(latency_rows[i]);
    }
    std::vector<const ParameterStore*> ptrs;
    for (const auto& s : singles) ptrs.push_back(&s.params);
    const LatencyComparison lat =
        compare_latency(classifier.params, ptrs, latency_rows, o.latency_repeats);
    summary["latency"] = {{"batch_size", lat.batch_size},
                          {"repeats", lat.repeats},
                          {"multi_task_ms", lat.multi_ms},
                          {"single_task_ms", lat.single_ms},
                          {"single_task_models", singles.size()},
                          {"speedup", lat.speedup}};
  }

  RunDir dir(out, o.common.force);
  dir.write_text(o.format == "jsonl" ? "predictions.jsonl" : "predictions.csv", rendered.str());
  dir.write_json("summary.json", summary);
  std::vector<std::string> inputs = config_inputs(o.common);
  for (const auto& p : {o.segmenter, o.classifier, o.vocab, o.input}) inputs.push_back(p);
  for (const auto& p : o.singles) inputs.push_back(p);
  dir.finish("pipeline", inputs, run_config_json(cfg), seed);
  log << summary.dump(2) << '\n';
  if (empty_reports > 0) log << "No motion segments found in " << empty_reports << " report(s)\n";
}

void cmd_report(const ReportOptions& o, std::ostream& log) {
  RunConfig cfg = resolve_run_config(config_document(o.common));
  const std::uint64_t seed = resolve_seed(o.common.seed);
  const std::string out = require_path(o.out, cfg.out_path, "--out");
  cfg.generator.seed = seed;
  RunDir dir(out, o.common.force);

  const PreparedCorpus corpus =
      prepare_corpus(cfg.generator, cfg.test_fraction, cfg.vocab_min_count, split_seed(seed));
  for (const auto& f : save_prepared(dir.path("corpus"), corpus)) dir.add("corpus/" + f);
  GeneratorConfig control_gen = cfg.generator;
  control_gen.task_correlation = cfg.analysis.control_correlation;
  const PreparedCorpus control =
      prepare_corpus(control_gen, cfg.test_fraction, cfg.vocab_min_count, split_seed(seed));
  for (const auto& f : save_prepared(dir.path("control"), control)) dir.add("control/" + f);
  log << "corpus: " << corpus.reports.size() << " reports, vocabulary " << corpus.vocab.size() << '\n';

  // Report segmenter.
  const TrainMode seg_mode{TrainKind::Segmenter, ""};
  const TrainedRun seg = train_trials(dir.path("segmenter"), cfg, corpus, seg_mode, seed, 1, log);
  dir.add("segmenter");
  dir.write_json("segmenter.json", {{"location_f1", seg.summary.at("location").mean},
                                    {"parameter_count", seg.first[0].train.params.parameter_count()}});

  // Single-task baselines and the multi-task model on the correlated corpus.
  const MultiTaskSchema schema = schema_for(corpus.body_part);
  std::map<std::string, TrainedRun> single;
  for (const auto& t : schema.tasks()) {
    const TrainMode mode{TrainKind::Single, t.name};
    single[t.name] = train_trials(dir.path("train/" + mode.name()), cfg, corpus, mode, seed,
                                  cfg.trials, log);
  }
  const TrainMode multi_mode{TrainKind::Multi, ""};
  const TrainedRun multi =
      train_trials(dir.path("train/multi"), cfg, corpus, multi_mode, seed, cfg.trials, log);
  dir.add("train");

  std::ostringstream parity;
  parity << "task,single_mean,single_sd,multi_mean,multi_sd,difference\n";
  json parity_json = json::object();
  std::size_t single_params = 0;
  for (const auto& t : schema.tasks()) {
    const TaskSummary& s = single.at(t.name).summary.at(t.name);
    const TaskSummary& m = multi.summary.at(t.name);
    parity << t.name << ',' << format_real(s.mean) << ',' << format_real(s.sd) << ','
       << format_real(m.mean) << ',' << format_real(m.sd) << ',' << format_real(m.mean - s.mean)
       << '\n';
    parity_json[t.name] = {{"single", {{"mean", s.mean}, {"sd", s.sd}, {"values", s.values}}},
                   {"multi", {{"mean", m.mean}, {"sd", m.sd}, {"values", m.values}}}};
    single_params += single.at(t.name).first[0].train.params.parameter_count();
  }
  dir.write_text("parity.csv", parity.str());
  dir.write_json("parity.json", {{"trials", cfg.trials}, {"tasks", parity_json}});
  dir.write_json("parameters.json",
                 {{"single_task_sum", single_params},
                  {"multi_task", multi.first[0].train.params.parameter_count()}});

  // Single-task baselines on the negative-control corpus (first trial only).
  std::map<std::string, TrainedRun> control_single;
  for (const auto& t : schema.tasks()) {
    const TrainMode mode{TrainKind::Single, t.name};
    control_single[t.name] =
        train_trials(dir.path("control_train/" + mode.name()), cfg, control, mode, seed, 1, log);
  }
  dir.add("control_train");

  // Pairwise alignment and similarity between first-trial single-task models.
  const auto probe = probe_sequences(corpus, cfg.analysis.probe_size, cfg.classifier.max_seq_len);
  std::ostringstream apag_csv, control_csv, cosine_csv;
  apag_csv << "pair,epoch,apag,cosine\n";
  control_csv << "pair,epoch,apag,cosine\n";
  cosine_csv << "pair,cosine,positive_layer_fraction\n";
  json medians_json = json::object();
  for (std::size_t i = 0; i < schema.size(); ++i) {
    for (std::size_t j = i + 1; j < schema.size(); ++j) {
      const std::string a = schema[i].name, b = schema[j].name;
      const std::string pair = pair_name(a, b);
      const TrialOutcome& ta = single.at(a).first[0];
      const TrialOutcome& tb = single.at(b).first[0];

      const auto series = alignment_series(ta.train.snapshots, tb.train.snapshots);
      for (const auto& e : series) {
        apag_csv << pair << ',' << e.epoch << ',' << format_real(e.report.apag) << ','
           << format_real(e.report.cosine.scalar) << '\n';
      }
      const AlignmentReport& last = series.back().report;
      dir.write_text("layer_alignment_" + pair + ".csv", layer_proportions_csv(last));
      cosine_csv << pair << ',' << format_real(last.cosine.scalar) << ','
         << format_real(last.cosine.positive_fraction) << '\n';

      const auto control_series = alignment_series(control_single.at(a).first[0].train.snapshots,
                                                   control_single.at(b).first[0].train.snapshots);
      for (const auto& e : control_series) {
        control_csv << pair << ',' << e.epoch << ',' << format_real(e.report.apag) << ','
            << format_real(e.report.cosine.scalar) << '\n';
      }

      const CkaReport cka = model_cka(ta.train.params, tb.train.params, probe, cfg.analysis.cka_numerator);
      dir.write_text("cka_" + pair + ".csv", cka_csv(cka));
      json medians = json::array();
      for (const auto& layer : cka.layers) medians.push_back(layer.stats.median);
      medians_json[pair] = medians;
    }
  }
  dir.write_text("apag_epochs.csv", apag_csv.str());
  dir.write_text("apag_epochs_control.csv", control_csv.str());
  dir.write_text("gradient_cosine.csv", cosine_csv.str());
  dir.write_json("cka_medians.json", medians_json);
  dir.finish("report", config_inputs(o.common), run_config_json(cfg), seed);

  log << "test macro F1, single vs multi:\n" << parity.str();
  log << "APAG per epoch:\n" << apag_csv.str();
  log << "APAG per epoch, control corpus:\n" << control_csv.str();
  log << "CKA medians: " << medians_json.dump() << '\n';
}

}  // namespace segalign
