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


#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "hotline/hashing.h"
#include "hotline/model.h"
#include "json.hpp"
#include "test_util.h"

namespace hotline {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string Slurp(const fs::path &p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  RunResult Run(const std::string &args) {
    const fs::path out = dir_.path() / "stdout.txt", err = dir_.path() / "stderr.txt";
    const std::string cmd = "cd '" + dir_.path().string() + "' && '" + HOTLINE_CLI_PATH + "' " + args + " > '" +
                            out.string() + "' 2> '" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = Slurp(out);
    r.err = Slurp(err);
    return r;
  }
  fs::path P(const std::string &rel) const { return dir_.path() / rel; }
  void Synth(int calls, int segments) {
    const auto r = Run("synth --calls " + std::to_string(calls) + " --segments-per-call " +
                       std::to_string(segments) + " --dir data");
    ASSERT_EQ(r.code, 0) << r.err;
  }
  void Ingest(const std::string &out = "run") {
    const auto r = Run("ingest --manifest data/manifest.jsonl --taxonomy data/taxonomy.tsv --check-audio --out " + out);
    ASSERT_EQ(r.code, 0) << r.err;
  }

  testing::TempDir dir_;
};

TEST_F(Cli, IngestIsDeterministic) {
  Synth(4, 5);
  Ingest();
  const std::string first = Sha256File(P("run/corpus.json"));
  Ingest();
  EXPECT_EQ(Sha256File(P("run/corpus.json")), first);
  EXPECT_TRUE(fs::exists(P("run/validation.json")));
  EXPECT_TRUE(fs::exists(P("run/ingest.manifest.json")));
  const json corpus = json::parse(Slurp(P("run/corpus.json")));
  EXPECT_EQ(corpus.at("calls").size(), 4u);
}

TEST_F(Cli, IngestCitesMalformedLine) {
  Synth(2, 5);
  std::ifstream in(P("data/manifest.jsonl"));
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  lines[6] = lines[6].substr(0, lines[6].size() / 2);
  std::ofstream out(P("data/manifest.jsonl"), std::ios::trunc);
  for (const auto &l : lines) out << l << '\n';
  out.close();
  const auto r = Run("ingest --manifest data/manifest.jsonl --out run");
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("line 7"), std::string::npos) << r.err;
}

TEST_F(Cli, IngestCheckAudioFindsMissingFiles) {
  Synth(2, 3);
  fs::remove(P("data/audio/C002.wav"));
  const auto r = Run("ingest --manifest data/manifest.jsonl --check-audio --out run");
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("C002"), std::string::npos) << r.err;
}

TEST_F(Cli, StatsWritesJsonAndTable) {
  Synth(3, 6);
  Ingest();
  const auto r = Run("stats --corpus run/corpus.json --out run");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("Sadness"), std::string::npos);
  const json stats = json::parse(Slurp(P("run/stats.json")));
  EXPECT_TRUE(stats.contains("per_class_counts"));
}

TEST_F(Cli, SplitHundredFiveCalls) {
  Synth(105, 1);
  Ingest();
  const auto r = Run("split --corpus run/corpus.json --ratio 4:1 --folds 5 --seed 7 --out run");
  ASSERT_EQ(r.code, 0) << r.err;
  const json plan = json::parse(Slurp(P("run/split.json")));
  EXPECT_EQ(plan.at("seed"), 7);
  EXPECT_EQ(plan.at("folds"), 5);
  int train = 0, test = 0;
  std::map<int, int> folds;
  for (const auto &a : plan.at("assignments")) {
    if (a.at("role") == "test") {
      ++test;
    } else {
      ++train;
      ++folds[a.at("fold").get<int>()];
    }
  }
  EXPECT_EQ(train, 84);
  EXPECT_EQ(test, 21);
  EXPECT_EQ(folds.size(), 5u);
  const std::string first = Slurp(P("run/split.json"));
  ASSERT_EQ(Run("--seed 7 split --corpus run/corpus.json --folds 5 --out run").code, 0);
  EXPECT_EQ(Slurp(P("run/split.json")), first);
}

TEST_F(Cli, TrainEvalPredictReport) {
  Synth(10, 12);
  Ingest();
  ASSERT_EQ(Run("split --corpus run/corpus.json --seed 3 --out run").code, 0);
  auto r = Run("train --corpus run/corpus.json --split run/split.json --task fine --encoder mock --out run");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(P("run/model-fine.bin")));
  EXPECT_TRUE(fs::exists(P("run/run_log.jsonl")));
  EXPECT_TRUE(fs::exists(P("run/test_metrics-fine.json")));
  const Model m = LoadModel(P("run/model-fine.bin"));
  EXPECT_EQ(m.head.task, Task::kFineGrained);
  EXPECT_EQ(m.encoder.encoder_id, "mock");

  r = Run("train --corpus run/corpus.json --split run/split.json --task binary --out run");
  ASSERT_EQ(r.code, 0) << r.err;

  r = Run("eval --model run/model-fine.bin --corpus run/corpus.json --split run/split.json --role test --out run");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(P("run/errors.tsv")));
  EXPECT_NE(r.out.find("Precision"), std::string::npos);

  {
    std::ofstream seg(P("segments.txt"));
    seg << "s2 3.0 4.0\ns1 0.0 1.0\n";
  }
  r = Run("predict --model run/model-binary.bin --model run/model-fine.bin --audio data/audio/C001.wav "
          "--segments segments.txt --out run");
  ASSERT_EQ(r.code, 0) << r.err;
  const json timeline = json::parse(r.out);
  ASSERT_EQ(timeline.at("entries").size(), 2u);
  EXPECT_EQ(timeline["entries"][0]["segment_id"], "s1");
  EXPECT_TRUE(timeline["entries"][0].contains("negative"));

  r = Run("report --metrics run/test_metrics-fine.json run/test_metrics-binary.json");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("Accuracy"), std::string::npos);
  EXPECT_NE(r.out.find("Helplessness"), std::string::npos);
}

TEST_F(Cli, CrossValidationWritesSummary) {
  Synth(12, 6);
  Ingest();
  ASSERT_EQ(Run("split --corpus run/corpus.json --folds 3 --out run").code, 0);
  const auto r = Run("cv --corpus run/corpus.json --split run/split.json --out run");
  ASSERT_EQ(r.code, 0) << r.err;
  const json cv = json::parse(Slurp(P("run/cv-binary.json")));
  EXPECT_EQ(cv.at("runs").size(), 3u);
  std::ifstream log(P("run/run_log.jsonl"));
  int lines = 0;
  for (std::string l; std::getline(log, l);) ++lines;
  EXPECT_EQ(lines, 3);
}

TEST_F(Cli, EvalRefusesForeignTaxonomy) {
  Synth(6, 5);
  Ingest();
  ASSERT_EQ(Run("split --corpus run/corpus.json --out run").code, 0);
  ASSERT_EQ(Run("train --corpus run/corpus.json --split run/split.json --task fine --out run").code, 0);
  std::string tax = Slurp(P("data/taxonomy.tsv"));
  tax.replace(tax.find("Confuse"), 7, "Confusion");
  std::ofstream(P("data/renamed.tsv")) << tax;
  ASSERT_EQ(Run("ingest --manifest data/manifest.jsonl --taxonomy data/renamed.tsv --out other").code, 0);
  const auto r = Run("eval --model run/model-fine.bin --corpus other/corpus.json --out other");
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("taxonomy"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(P("other/eval_metrics-fine.json")));
}

TEST_F(Cli, UsageErrorsExitNonZero) {
  EXPECT_NE(Run("").code, 0);
  EXPECT_NE(Run("frobnicate").code, 0);
  EXPECT_NE(Run("stats").code, 0);
  const auto r = Run("stats --corpus nowhere.json");
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("nowhere.json"), std::string::npos);
}

}  // namespace
}  // namespace hotline
