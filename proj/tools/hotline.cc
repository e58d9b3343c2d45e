// Copyright (c) 2026, The hotline-ser Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line driver: ingest, stats, split, train, cv, eval, predict, report, synth.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hotline/audio.h"
#include "hotline/config.h"
#include "hotline/corpus.h"
#include "hotline/error.h"
#include "hotline/evaluation.h"
#include "hotline/model.h"
#include "hotline/run_manifest.h"
#include "hotline/splitting.h"
#include "hotline/synthetic.h"
#include "hotline/timeline.h"
#include "hotline/training.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace hotline {
namespace {

struct Globals {
  uint64_t seed = 0;
  bool seed_given = false;
  std::string config_path;
  std::string out_dir = ".";
};

json ReadJson(const fs::path &path) {
  std::ifstream in(path);
  HOTLINE_ENFORCE(in, "cannot open '", path.string(), "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error &e) {
    throw Error(MakeString("'", path.string(), "' is not valid JSON: ", e.what()));
  }
}

fs::path WriteJson(const fs::path &path, const json &j) {
  std::ofstream out(path, std::ios::trunc);
  HOTLINE_ENFORCE(out, "cannot write '", path.string(), "'");
  out << j.dump(2) << '\n';
  return path;
}

fs::path OutDir(const Globals &g) {
  fs::create_directories(g.out_dir);
  return g.out_dir;
}

RunConfig ResolveConfig(const Globals &g, RunManifest &manifest) {
  RunConfig cfg;
  if (!g.config_path.empty()) {
    cfg = ApplyConfig(cfg, LoadKeyValues(g.config_path));
    manifest.AddInput(g.config_path);
  }
  if (g.seed_given) cfg.train.seed = g.seed;
  return cfg;
}

CorpusCache LoadCorpus(const std::string &path, RunManifest &manifest) {
  manifest.AddInput(path);
  return CorpusFromJson(ReadJson(path));
}

void CheckAudio(const std::vector<Call> &calls) {
  for (const auto &call : calls)
    for (const auto &seg : call.segments) {
      HOTLINE_ENFORCE(fs::exists(seg.audio_path), "segment '", seg.segment_id, "': audio file '",
                      seg.audio_path.string(), "' does not exist");
      const WavInfo info = ProbeWav(seg.audio_path);
      HOTLINE_ENFORCE(info.sample_rate == seg.sample_rate, "segment '", seg.segment_id, "': manifest says ",
                      seg.sample_rate, " Hz, file has ", info.sample_rate, " Hz");
      HOTLINE_ENFORCE(info.DurationSeconds() + 1.0 / info.sample_rate >= seg.end_s, "segment '", seg.segment_id,
                      "' ends at ", seg.end_s, " s but the audio is only ", info.DurationSeconds(), " s");
    }
}

int CmdIngest(const Globals &g, const std::string &manifest_path, const std::string &taxonomy_path,
              bool check_audio) {
  RunManifest run = RunManifest::Begin("ingest");
  run.config = {{"check_audio", check_audio}};
  const LabelTaxonomy taxonomy = taxonomy_path.empty() ? LabelTaxonomy::Default() : LabelTaxonomy::Load(taxonomy_path);
  if (!taxonomy_path.empty()) run.AddInput(taxonomy_path);
  run.AddInput(manifest_path);

  std::vector<Call> calls = LoadManifest(fs::path(manifest_path));
  if (check_audio) CheckAudio(calls);
  ConsolidateAll(calls);
  const ValidationReport report = ValidateCorpus(calls);

  const fs::path dir = OutDir(g);
  run.AddOutput(WriteJson(dir / "corpus.json", CorpusToJson(calls, taxonomy)));
  run.AddOutput(WriteJson(dir / "validation.json", ValidationToJson(report)));
  run.Write(dir);
  std::cerr << "ingested " << calls.size() << " calls, " << CountSegments(calls) << " segments; "
            << report.violations.size() << " validation finding(s)\n";
  for (const auto &v : report.violations)
    std::cerr << "  " << (v.segment_id.empty() ? "<corpus>" : v.segment_id) << ": " << v.message << '\n';
  return 0;
}

int CmdStats(const Globals &g, const std::string &corpus_path) {
  RunManifest run = RunManifest::Begin("stats");
  const CorpusCache corpus = LoadCorpus(corpus_path, run);
  const CorpusStats stats = ComputeStats(corpus.calls);
  PrintStatsTable(std::cout, stats, corpus.taxonomy);
  const fs::path dir = OutDir(g);
  run.AddOutput(WriteJson(dir / "stats.json", StatsToJson(stats, corpus.taxonomy)));
  run.Write(dir);
  return 0;
}

int CmdSplit(const Globals &g, const std::string &corpus_path, const std::string &ratio_text, int folds) {
  RunManifest run = RunManifest::Begin("split");
  const RunConfig cfg = ResolveConfig(g, run);
  const CorpusCache corpus = LoadCorpus(corpus_path, run);
  const SplitRatio ratio = SplitRatio::Parse(ratio_text);
  SplitPlan plan = HoldoutSplit(corpus.calls, ratio, cfg.train.seed);
  if (folds > 0) plan = AssignFolds(std::move(plan), folds, cfg.train.seed);
  run.config = {{"seed", cfg.train.seed}, {"ratio", ratio.ToString()}, {"folds", folds}};

  const fs::path dir = OutDir(g);
  run.AddOutput(WriteJson(dir / "split.json", plan.ToJson()));
  run.Write(dir);
  std::cout << "train calls " << plan.train_calls.size() << ", test calls " << plan.test_calls.size();
  if (plan.num_folds > 0) {
    std::cout << ", fold sizes";
    for (int f = 0; f < plan.num_folds; ++f) std::cout << ' ' << plan.FoldCalls(f).size();
  }
  std::cout << '\n';
  return 0;
}

struct TrainArgs {
  std::string corpus;
  std::string split;
  std::string task;
  std::string encoder;
  std::string feature_cache;
  std::string model_out;
};

RunConfig TrainingConfig(const Globals &g, const TrainArgs &a, RunManifest &run) {
  RunConfig cfg = ResolveConfig(g, run);
  if (!a.task.empty()) cfg.train.task = ParseTask(a.task);
  if (!a.encoder.empty() && a.encoder != cfg.encoder.encoder_id) cfg.encoder = EncoderSpec::Preset(a.encoder);
  run.config = {{"train", cfg.train.ToJson()}, {"encoder", cfg.encoder.ToJson()}};
  return cfg;
}

std::string TaskSuffix(Task t) { return t == Task::kBinary ? "binary" : "fine"; }

int CmdTrain(const Globals &g, const TrainArgs &a) {
  RunManifest run = RunManifest::Begin("train");
  const RunConfig cfg = TrainingConfig(g, a, run);
  const CorpusCache corpus = LoadCorpus(a.corpus, run);
  run.AddInput(a.split);
  const SplitPlan plan = SplitPlan::FromJson(ReadJson(a.split));

  const fs::path dir = OutDir(g);
  const fs::path model_path = a.model_out.empty() ? dir / ("model-" + TaskSuffix(cfg.train.task) + ".bin")
                                                  : fs::path(a.model_out);
  WavAudioSource audio;
  std::optional<FeatureCache> cache;
  if (!a.feature_cache.empty()) cache.emplace(a.feature_cache);
  FeatureExtractor extractor(cfg.encoder, audio, cache ? &*cache : nullptr);

  const FinalResult result = Finalize(plan, corpus.calls, extractor, cfg.train, corpus.taxonomy, model_path);
  AppendRunLog(dir / "run_log.jsonl", result.record);
  const fs::path metrics_path = dir / ("test_metrics-" + TaskSuffix(cfg.train.task) + ".json");
  WriteJson(metrics_path, {{"model", cfg.encoder.encoder_id}, {"metrics", result.test_report.ToJson()}});
  run.AddOutput(model_path);
  run.AddOutput(metrics_path);
  run.AddOutput(dir / "run_log.jsonl");
  run.Write(dir);

  const std::vector<ReportRow> rows = {{cfg.encoder.encoder_id, result.test_report}};
  std::cout << "test segments " << result.test_report.segments << ", epoch losses";
  for (double l : result.record.epoch_losses) std::cout << ' ' << l;
  std::cout << "\n\n";
  if (cfg.train.task == Task::kBinary) PrintBinaryTable(std::cout, rows);
  else PrintFineTable(std::cout, rows);
  return 0;
}

int CmdCv(const Globals &g, const TrainArgs &a) {
  RunManifest run = RunManifest::Begin("cv");
  const RunConfig cfg = TrainingConfig(g, a, run);
  const CorpusCache corpus = LoadCorpus(a.corpus, run);
  run.AddInput(a.split);
  const SplitPlan plan = SplitPlan::FromJson(ReadJson(a.split));

  WavAudioSource audio;
  std::optional<FeatureCache> cache;
  if (!a.feature_cache.empty()) cache.emplace(a.feature_cache);
  FeatureExtractor extractor(cfg.encoder, audio, cache ? &*cache : nullptr);
  const CvResult cv = CrossValidate(plan, corpus.calls, extractor, cfg.train, corpus.taxonomy);

  const fs::path dir = OutDir(g);
  for (const auto &r : cv.runs) AppendRunLog(dir / "run_log.jsonl", r);
  const fs::path summary = dir / ("cv-" + TaskSuffix(cfg.train.task) + ".json");
  json j = cv.ToJson();
  for (auto &r : j["runs"]) r.erase("wall_seconds");
  WriteJson(summary, j);
  run.AddOutput(summary);
  run.Write(dir);
  for (const auto &r : cv.runs)
    std::cout << "fold " << r.fold << ": weighted F1 " << r.validation.f1 << " (" << r.validation.segments
              << " segments)\n";
  std::cout << "mean " << cv.mean_f1 << " +- " << cv.std_f1 << '\n';
  return 0;
}

int CmdEval(const Globals &g, const std::string &model_path, const std::string &corpus_path,
            const std::string &split_path, const std::string &role_text, size_t error_limit) {
  RunManifest run = RunManifest::Begin("eval");
  run.AddInput(model_path);
  const Model model = LoadModel(model_path);
  const CorpusCache corpus = LoadCorpus(corpus_path, run);
  HOTLINE_ENFORCE(model.taxonomy.Fingerprint() == corpus.taxonomy.Fingerprint(),
                  "taxonomy fingerprint mismatch: model ", model.taxonomy.Fingerprint().substr(0, 12),
                  " vs corpus ", corpus.taxonomy.Fingerprint().substr(0, 12), "; refusing to evaluate");

  std::vector<Segment> segments;
  if (split_path.empty()) {
    for (const auto &c : corpus.calls) segments.insert(segments.end(), c.segments.begin(), c.segments.end());
  } else {
    run.AddInput(split_path);
    segments = Materialize(SplitPlan::FromJson(ReadJson(split_path)), corpus.calls, SplitRole::Parse(role_text));
  }
  run.config = {{"role", split_path.empty() ? "all" : role_text}, {"error_limit", error_limit}};

  WavAudioSource audio;
  FeatureExtractor extractor(model.encoder, audio);
  const auto examples = MakeExamples(segments, extractor);
  const auto preds = Predict(model, examples);
  std::vector<ConsolidatedLabel> truths;
  for (const auto &ex : examples) truths.push_back(ex.y);
  HOTLINE_ENFORCE(!segments.empty(), "nothing to evaluate");
  const MetricsReport report = Evaluate(model.head.task, preds, truths, model.taxonomy);

  const fs::path dir = OutDir(g);
  const std::string suffix = TaskSuffix(model.head.task);
  run.AddOutput(WriteJson(dir / ("eval_metrics-" + suffix + ".json"),
                          {{"model", model.encoder.encoder_id}, {"metrics", report.ToJson()}}));
  const std::vector<ReportRow> rows = {{model.encoder.encoder_id, report}};
  if (model.head.task == Task::kBinary) {
    PrintBinaryTable(std::cout, rows);
  } else {
    PrintFineTable(std::cout, rows);
    std::cout << '\n';
    PrintPerClassF1Table(std::cout, rows, model.taxonomy);
    const auto errors = ErrorReport(preds, truths, segments, error_limit);
    const fs::path tsv = dir / "errors.tsv";
    std::ofstream out(tsv, std::ios::trunc);
    WriteErrorReportTsv(out, errors, model.taxonomy);
    out.close();
    run.AddOutput(tsv);
  }
  run.Write(dir);
  return 0;
}

int CmdPredict(const Globals &g, const std::vector<std::string> &model_paths, const std::string &audio_path,
               const std::string &segments_path, const std::string &output) {
  RunManifest run = RunManifest::Begin("predict");
  std::vector<Model> models;
  for (const auto &p : model_paths) {
    run.AddInput(p);
    models.push_back(LoadModel(p));
  }
  run.AddInput(audio_path);
  run.AddInput(segments_path);
  std::ifstream seg_in(segments_path);
  HOTLINE_ENFORCE(seg_in, "cannot open segmentation file '", segments_path, "'");
  const auto spans = ParseSegmentation(seg_in);
  const Waveform audio = ReadWav(audio_path);
  const auto entries = PredictTimeline(audio, spans, models);

  json j = TimelineToJson(entries, models.front().taxonomy);
  j["audio"] = audio_path;
  j["models"] = model_paths;
  if (output.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    run.AddOutput(WriteJson(output, j));
  }
  run.Write(OutDir(g));
  return 0;
}

int CmdReport(const std::vector<std::string> &paths) {
  std::vector<ReportRow> binary, fine;
  for (const auto &p : paths) {
    const json j = ReadJson(p);
    const json &m = j.contains("metrics") ? j["metrics"] : j;
    ReportRow row{j.value("model", fs::path(p).stem().string()), MetricsReport::FromJson(m)};
    (row.report.task == Task::kBinary ? binary : fine).push_back(std::move(row));
  }
  if (!binary.empty()) {
    std::cout << "Negative emotion recognition\n";
    PrintBinaryTable(std::cout, binary);
  }
  if (!fine.empty()) {
    if (!binary.empty()) std::cout << '\n';
    std::cout << "Fine-grained multi-label classification\n";
    PrintFineTable(std::cout, fine);
    std::cout << '\n';
    PrintPerClassF1Table(std::cout, fine, LabelTaxonomy::Default());
  }
  return 0;
}

int CmdSynth(const Globals &g, SyntheticOptions o, const std::string &dir) {
  if (g.seed_given) o.seed = g.seed;
  const std::string target = dir.empty() ? g.out_dir : dir;
  WriteSyntheticCorpus(MakeSyntheticCorpus(o), target);
  std::cerr << "wrote " << o.num_calls << " calls x " << o.segments_per_call << " segments to " << target << '\n';
  return 0;
}

}  // namespace
}  // namespace hotline

int main(int argc, char **argv) {
  using namespace hotline;
  CLI::App app{"Negative-emotion recognition pipeline for segmented hotline call audio"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice");
  app.add_option("--config", g.config_path, "key = value config file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out_dir, "Output directory");

  std::string manifest, taxonomy, corpus, split, ratio = "4:1", role = "test", audio, segments, output;
  std::vector<std::string> models, metrics;
  bool check_audio = false;
  int folds = 0;
  size_t error_limit = 50;
  TrainArgs targs;
  SyntheticOptions synth;
  std::string synth_dir;

  auto *ingest = app.add_subcommand("ingest", "Load, consolidate and validate a JSONL manifest");
  ingest->add_option("--manifest", manifest, "Segment manifest (JSON Lines)")->required();
  ingest->add_option("--taxonomy", taxonomy, "Taxonomy file (id<TAB>name)");
  ingest->add_flag("--check-audio", check_audio, "Require every referenced WAV to exist and cover its segment");

  auto *stats = app.add_subcommand("stats", "Per-class, cardinality and duration statistics");
  stats->add_option("--corpus", corpus, "Corpus cache from ingest")->required();

  auto *splitc = app.add_subcommand("split", "Call-level holdout split and CV folds");
  splitc->add_option("--corpus", corpus)->required();
  splitc->add_option("--ratio", ratio, "train:test");
  splitc->add_option("--folds", folds, "Number of CV folds over the train calls (0 = none)");

  auto add_train_opts = [&](CLI::App *sub) {
    sub->add_option("--corpus", targs.corpus)->required();
    sub->add_option("--split", targs.split)->required();
    sub->add_option("--task", targs.task, "binary or fine");
    sub->add_option("--encoder", targs.encoder, "Encoder preset");
    sub->add_option("--feature-cache", targs.feature_cache, "Directory for pooled feature cache");
  };
  auto *train = app.add_subcommand("train", "Refit on all train calls, test once, save the model");
  add_train_opts(train);
  train->add_option("--model-out", targs.model_out, "Model artifact path");
  auto *cv = app.add_subcommand("cv", "Cross-validate over the plan's folds");
  add_train_opts(cv);

  auto *eval = app.add_subcommand("eval", "Evaluate a model on a corpus (optionally one split role)");
  eval->add_option("--model", models, "Model artifact")->required()->expected(1);
  eval->add_option("--corpus", corpus)->required();
  eval->add_option("--split", split);
  eval->add_option("--role", role, "train, test, fold-<f>-train or fold-<f>-val");
  eval->add_option("--error-limit", error_limit, "Rows in errors.tsv (0 = all)");

  auto *predict = app.add_subcommand("predict", "Per-segment emotion timeline for one call");
  predict->add_option("--model", models, "Binary and/or fine-grained artifact")->required();
  predict->add_option("--audio", audio, "Call recording (WAV)")->required();
  predict->add_option("--segments", segments, "Segmentation file")->required();
  predict->add_option("--output", output, "Write JSON here instead of stdout");

  auto *report = app.add_subcommand("report", "Render metrics files as comparison tables");
  report->add_option("--metrics", metrics, "Metrics JSON files")->required();

  auto *synthc = app.add_subcommand("synth", "Write a synthetic corpus (WAV + manifest) for demos");
  synthc->add_option("--calls", synth.num_calls);
  synthc->add_option("--segments-per-call", synth.segments_per_call);
  synthc->add_option("--min-duration", synth.min_duration_s);
  synthc->add_option("--max-duration", synth.max_duration_s);
  synthc->add_option("--label-noise", synth.label_noise);
  synthc->add_option("--dir", synth_dir, "Target directory (default: --out)");

  CLI11_PARSE(app, argc, argv);
  g.seed_given = app.count("--seed") > 0;

  try {
    if (*ingest) return CmdIngest(g, manifest, taxonomy, check_audio);
    if (*stats) return CmdStats(g, corpus);
    if (*splitc) return CmdSplit(g, corpus, ratio, folds);
    if (*train) return CmdTrain(g, targs);
    if (*cv) return CmdCv(g, targs);
    if (*eval) return CmdEval(g, models.front(), corpus, split, role, error_limit);
    if (*predict) return CmdPredict(g, models, audio, segments, output);
    if (*report) return CmdReport(metrics);
    if (*synthc) return CmdSynth(g, synth, synth_dir);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
