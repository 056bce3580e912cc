// SPDX-License-Identifier: Apache-2.0
// segalign command line. Exit codes: 0 success, 1 runtime failure, 2 bad
// arguments or configuration.

#include <iostream>

#include <CLI11.hpp>

#include "segalign/cli/commands.hpp"
#include "segalign/cli/run_dir.hpp"
#include "segalign/numerics/errors.hpp"

namespace {

void add_common(CLI::App* app, segalign::CommonOptions& c) {
  app->add_option("--config", c.config, "JSON run configuration");
  app->add_option("--seed", c.seed, "Run seed (falls back to SEGALIGN_SEED, then 0)");
  app->add_flag("--force", c.force, "Overwrite a non-empty output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Synthetic radiology report segmentation and multi-task alignment"};
  app.require_subcommand(1);

  segalign::GenerateOptions gen;
  auto* g = app.add_subcommand("generate", "Generate a labeled corpus with a test split");
  add_common(g, gen.common);
  g->add_option("--out", gen.out, "Output directory");
  g->add_option("--body-part", gen.body_part, "lumbar or cervical");
  g->add_option("--n,--n-reports", gen.n_reports, "Number of reports");

  segalign::TrainOptions train;
  auto* t = app.add_subcommand("train", "Train classifier or segmenter trials");
  add_common(t, train.common);
  t->add_option("--corpus", train.corpus, "Corpus directory from generate");
  t->add_option("--out", train.out, "Output directory");
  t->add_option("--mode", train.mode, "single:<task>, multi or segmenter")->capture_default_str();
  t->add_option("--trials", train.trials, "Number of seeded trials");
  t->add_option("--jobs", train.jobs, "Worker processes")->capture_default_str();
  t->add_option("--worker-trial", train.worker_trial)->group("");

  segalign::AnalyzeOptions an;
  auto* a = app.add_subcommand("analyze", "Compare two models (cka) or two gradient runs (grads)");
  add_common(a, an.common);
  a->add_option("kind", an.kind, "cka or grads")->required();
  a->add_option("--a", an.a, "First checkpoint (cka) or trial directory (grads)");
  a->add_option("--b", an.b, "Second checkpoint or trial directory");
  a->add_option("--probe", an.probe, "Corpus directory, or a corpus JSONL inside one, supplying probe inputs (cka)");
  a->add_option("--out", an.out, "Output directory");

  segalign::PipelineOptions pipe;
  auto* p = app.add_subcommand("pipeline", "Segment and classify reports");
  add_common(p, pipe.common);
  p->add_option("--segmenter", pipe.segmenter, "Segmenter checkpoint");
  p->add_option("--classifier", pipe.classifier, "Classifier checkpoint");
  p->add_option("--vocab", pipe.vocab, "vocab.json shared by both models");
  p->add_option("--input", pipe.input, "Report text file or corpus JSONL");
  p->add_option("--out", pipe.out, "Output directory");
  p->add_option("--format", pipe.format, "jsonl or csv")->capture_default_str();
  p->add_option("--single", pipe.singles, "Single-task checkpoints for the latency comparison");
  p->add_option("--latency-batch", pipe.latency_batch)->capture_default_str();
  p->add_option("--latency-repeats", pipe.latency_repeats)->capture_default_str();

  segalign::ReportOptions rep;
  auto* r = app.add_subcommand("report", "Run the full experiment and write every table");
  add_common(r, rep.common);
  r->add_option("--out", rep.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*g) segalign::cmd_generate(gen, std::cout);
    if (*t) segalign::cmd_train(train, std::cout);
    if (*a) segalign::cmd_analyze(an, std::cout);
    if (*p) segalign::cmd_pipeline(pipe, std::cout);
    if (*r) segalign::cmd_report(rep, std::cout);
  } catch (const segalign::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
