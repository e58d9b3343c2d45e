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

#include <fstream>
#include <sstream>

#include "hotline/audio.h"
#include "hotline/config.h"
#include "hotline/error.h"
#include "hotline/hashing.h"
#include "hotline/model.h"
#include "hotline/run_manifest.h"
#include "hotline/synthetic.h"
#include "hotline/taxonomy.h"
#include "hotline/timeline.h"
#include "test_util.h"

namespace hotline {
namespace {

Model SmallModel(Task task, uint64_t seed, int dim = 8) {
  Model m;
  m.encoder = EncoderSpec::Preset("mock");
  m.encoder.feature_dim = dim;
  m.head.input_dim = dim;
  m.head.hidden_dim = 5;
  m.head.task = task;
  m.params = HeadParameters::Initialize(m.head, seed);
  m.taxonomy = LabelTaxonomy::Default();
  m.threshold = 0.4;
  return m;
}

TEST(ModelIo, RoundTripIsExact) {
  const Model m = SmallModel(Task::kFineGrained, 3);
  std::stringstream buf;
  WriteModel(buf, m);
  const std::string bytes = buf.str();
  EXPECT_EQ(bytes.substr(0, 8), "HLSERMDL");
  const Model back = ReadModel(buf);
  EXPECT_TRUE(back.params == m.params);
  EXPECT_EQ(back.head, m.head);
  EXPECT_EQ(back.encoder, m.encoder);
  EXPECT_EQ(back.taxonomy, m.taxonomy);
  EXPECT_EQ(back.threshold, 0.4);
  std::stringstream again;
  WriteModel(again, back);
  EXPECT_EQ(again.str(), bytes);
}

TEST(ModelIo, RejectsCorruption) {
  const Model m = SmallModel(Task::kBinary, 1);
  std::stringstream buf;
  WriteModel(buf, m);
  std::string bytes = buf.str();

  std::string bad_magic = bytes;
  bad_magic[0] = 'X';
  std::istringstream a(bad_magic);
  EXPECT_THROW(ReadModel(a), Error);

  std::istringstream truncated(bytes.substr(0, bytes.size() - 8));
  EXPECT_THROW(ReadModel(truncated), Error);

  std::string renamed = bytes;
  const auto pos = renamed.find("Sadness");
  ASSERT_NE(pos, std::string::npos);
  renamed.replace(pos, 7, "Sadnesz");
  std::istringstream b(renamed);
  EXPECT_THROW(ReadModel(b), Error);
}

TEST(Taxonomy, DefaultOrderAndRendering) {
  const LabelTaxonomy t = LabelTaxonomy::Default();
  EXPECT_EQ(t.Name(1), "Sadness");
  EXPECT_EQ(t.Name(11), "Fear");
  EXPECT_EQ(*t.Find("Despair"), 10);
  EXPECT_EQ(t.Render(MakeLabelSet({6, 1})), "1. Sadness; 6. Helplessness");
  EXPECT_EQ(t.Render({}), "None");
  std::istringstream in(t.Serialize());
  EXPECT_EQ(LabelTaxonomy::Parse(in), t);
  EXPECT_EQ(t.Fingerprint(), Sha256Hex(t.Serialize()));
  EXPECT_EQ(t.Fingerprint().size(), 64u);
}

TEST(Taxonomy, RejectsBadFiles) {
  std::istringstream short_list("1\tSadness\n2\tPain\n");
  EXPECT_THROW(LabelTaxonomy::Parse(short_list), Error);
  std::string dup = LabelTaxonomy::Default().Serialize();
  dup.replace(dup.find("Pain"), 4, "Fear");
  std::istringstream dup_in(dup);
  EXPECT_THROW(LabelTaxonomy::Parse(dup_in), Error);
}

TEST(Hashing, KnownDigest) {
  EXPECT_EQ(Sha256Hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Wav, WriteThenReadSlice) {
  testing::TempDir dir;
  Waveform w;
  w.sample_rate = 8000;
  for (int i = 0; i < 8000; ++i) w.samples.push_back(static_cast<float>((i % 100) / 200.0));
  WriteWav(dir.path() / "a.wav", w);
  const WavInfo info = ProbeWav(dir.path() / "a.wav");
  EXPECT_EQ(info.sample_rate, 8000);
  EXPECT_EQ(info.frames, 8000u);
  EXPECT_EQ(info.bits_per_sample, 16);
  const Waveform slice = ReadWav(dir.path() / "a.wav", 0.25, 0.5);
  ASSERT_EQ(slice.samples.size(), 2000u);
  EXPECT_NEAR(slice.samples[0], w.samples[2000], 1.0 / 32768);
  EXPECT_THROW(ReadWav(dir.path() / "a.wav", 2.0, 3.0), Error);
  EXPECT_THROW(ProbeWav(dir.path() / "missing.wav"), Error);
}

TEST(Config, KeyValuesApplyOnTopOfDefaults) {
  std::istringstream in("# run\nencoder = whisper-small\nbatch_size = 8\nlearning_rate=0.001\n"
                        "task = fine\nprecision = reduced\npooling = tanh_then_mean\n");
  const RunConfig cfg = ApplyConfig(RunConfig{}, ParseKeyValues(in));
  EXPECT_EQ(cfg.encoder.encoder_id, "whisper-small");
  EXPECT_EQ(cfg.encoder.feature_dim, 768);
  EXPECT_EQ(cfg.encoder.pooling, PoolingOrder::kTanhThenMean);
  EXPECT_EQ(cfg.train.batch_size, 8);
  EXPECT_EQ(cfg.train.learning_rate, 0.001);
  EXPECT_EQ(cfg.train.task, Task::kFineGrained);
  EXPECT_EQ(cfg.train.precision, Precision::kReduced);
  EXPECT_EQ(cfg.train.grad_accum_steps, 2);
  EXPECT_EQ(cfg.train.epochs, 3);
}

TEST(Config, UnknownKeyOrBadValueIsAnError) {
  std::istringstream a("bogus = 1\n");
  EXPECT_THROW(ApplyConfig(RunConfig{}, ParseKeyValues(a)), Error);
  std::istringstream b("batch_size = many\n");
  EXPECT_THROW(ApplyConfig(RunConfig{}, ParseKeyValues(b)), Error);
  std::istringstream c("no equals sign\n");
  EXPECT_THROW(ParseKeyValues(c), Error);
}

TEST(Segmentation, ShuffledInputComesBackSorted) {
  std::istringstream in("5.0 6.0\n# comment\n0.5 1.5\n\n2 3\n");
  const auto spans = ParseSegmentation(in);
  ASSERT_EQ(spans.size(), 3u);
  EXPECT_EQ(spans[0].start_s, 0.5);
  EXPECT_EQ(spans[0].segment_id, "seg-0001");
  EXPECT_EQ(spans[2].segment_id, "seg-0003");
  std::istringstream named("b 4 5\na 1 2\n");
  const auto ns = ParseSegmentation(named);
  EXPECT_EQ(ns[0].segment_id, "a");
  std::istringstream mixed("a 1 2\n3 4\n");
  EXPECT_THROW(ParseSegmentation(mixed), Error);
  std::istringstream bad("1 x\n");
  EXPECT_THROW(ParseSegmentation(bad), ParseError);
}

Waveform CallAudio(double seconds) {
  ConsolidatedLabel y{true, MakeLabelSet({2})};
  return SynthesizeAudio(y, seconds, 16000, 4);
}

TEST(Timeline, SingleSegmentGivesOneEntry) {
  const std::vector<SegmentSpan> spans = {{"only", 0.2, 1.2}};
  const std::vector<Model> models = {SmallModel(Task::kBinary, 2)};
  const auto entries = PredictTimeline(CallAudio(2.0), spans, models);
  ASSERT_EQ(entries.size(), 1u);
  EXPECT_EQ(entries[0].segment_id, "only");
  EXPECT_TRUE(entries[0].negative.has_value());
  EXPECT_GT(entries[0].negative_probability, 0.0);
  EXPECT_LT(entries[0].negative_probability, 1.0);
}

TEST(Timeline, EntriesFollowStartTime) {
  std::istringstream in("2.0 2.5\n0.0 0.5\n1.0 1.5\n");
  const auto spans = ParseSegmentation(in);
  const std::vector<Model> models = {SmallModel(Task::kBinary, 2), SmallModel(Task::kFineGrained, 3)};
  const auto entries = PredictTimeline(CallAudio(3.0), spans, models);
  ASSERT_EQ(entries.size(), 3u);
  for (size_t i = 1; i < entries.size(); ++i) EXPECT_LT(entries[i - 1].start_s, entries[i].start_s);
  EXPECT_EQ(entries[0].class_probabilities.size(), static_cast<size_t>(kNumLabels));
  const auto j = TimelineToJson(entries, LabelTaxonomy::Default());
  EXPECT_EQ(j.at("entries").size(), 3u);
  EXPECT_TRUE(j["entries"][0]["class_probabilities"].contains("Fear"));
}

TEST(Timeline, ZeroParameterFineModelIsUndecided) {
  Model m = SmallModel(Task::kFineGrained, 1);
  m.params.SetZero();
  m.threshold = 0.5;
  const std::vector<SegmentSpan> spans = {{"a", 0.0, 1.0}, {"b", 1.0, 2.0}};
  const auto entries = PredictTimeline(CallAudio(2.0), spans, std::vector<Model>{m});
  for (const auto &e : entries) {
    for (double p : e.class_probabilities) EXPECT_DOUBLE_EQ(p, 0.5);
    EXPECT_TRUE(e.predicted_labels.empty());
    EXPECT_FALSE(e.negative.has_value());
    EXPECT_NEAR(e.negative_probability, 1.0 - std::pow(0.5, kNumLabels), 1e-12);
  }
}

TEST(Timeline, RejectsBadModelSetsAndSpans) {
  const std::vector<SegmentSpan> spans = {{"a", 0.0, 1.0}};
  const std::vector<Model> two_binary = {SmallModel(Task::kBinary, 1), SmallModel(Task::kBinary, 2)};
  EXPECT_THROW(PredictTimeline(CallAudio(2.0), spans, two_binary), Error);
  EXPECT_THROW(PredictTimeline(CallAudio(2.0), spans, std::vector<Model>{}), Error);
  const std::vector<SegmentSpan> late = {{"z", 5.0, 6.0}};
  EXPECT_THROW(PredictTimeline(CallAudio(2.0), late, std::vector<Model>{SmallModel(Task::kBinary, 1)}), Error);
}

TEST(RunManifest, RecordsHashesOfInputsAndOutputs) {
  testing::TempDir dir;
  {
    std::ofstream(dir.path() / "in.txt") << "abc";
  }
  RunManifest m = RunManifest::Begin("stats");
  m.AddInput(dir.path() / "in.txt");
  const auto path = m.Write(dir.path());
  EXPECT_EQ(path.filename(), "stats.manifest.json");
  std::ifstream in(path);
  const auto j = nlohmann::json::parse(in);
  EXPECT_EQ(j.at("command"), "stats");
  EXPECT_EQ(j.at("inputs").at((dir.path() / "in.txt").string()),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_FALSE(j.at("finished_at").get<std::string>().empty());
}

TEST(Synthetic, WrittenCorpusLoadsBack) {
  testing::TempDir dir;
  SyntheticOptions o;
  o.num_calls = 3;
  o.segments_per_call = 4;
  const auto corpus = MakeSyntheticCorpus(o);
  WriteSyntheticCorpus(corpus, dir.path().string());
  auto calls = LoadManifest(dir.path() / "manifest.jsonl");
  ConsolidateAll(calls);
  ASSERT_EQ(calls.size(), 3u);
  for (size_t c = 0; c < calls.size(); ++c)
    for (size_t s = 0; s < calls[c].segments.size(); ++s) {
      EXPECT_EQ(calls[c].segments[s].consolidated, corpus.calls[c].segments[s].consolidated);
      EXPECT_TRUE(std::filesystem::exists(calls[c].segments[s].audio_path));
    }
  EXPECT_EQ(LabelTaxonomy::Load(dir.path() / "taxonomy.tsv"), LabelTaxonomy::Default());
}

TEST(Synthetic, SameSeedSameCorpus) {
  SyntheticOptions o;
  o.num_calls = 4;
  o.segments_per_call = 6;
  const auto a = MakeSyntheticCorpus(o), b = MakeSyntheticCorpus(o);
  EXPECT_EQ(CorpusToJson(a.calls, LabelTaxonomy::Default()), CorpusToJson(b.calls, LabelTaxonomy::Default()));
}

}  // namespace
}  // namespace hotline
