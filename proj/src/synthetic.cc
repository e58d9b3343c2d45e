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

#include "hotline/synthetic.h"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "hotline/error.h"
#include "hotline/random.h"
#include "json.hpp"

namespace hotline {

namespace {

constexpr double kToneHz = 250.0;
constexpr double kBlockS = 0.1;
constexpr double kNoiseStd = 0.003;

// Relative label frequencies and cardinality mix used for the learnability corpus.
constexpr std::array<double, kNumLabels> kLabelWeights = {5662, 2102, 1384, 1224, 1128, 1089,
                                                          962,  561,  509,  461,  191};
constexpr std::array<double, 5> kCardinalityWeights = {0.57, 0.28, 0.115, 0.03, 0.005};

uint64_t Fnv1a(const std::string &s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

size_t WeightedPick(std::span<const double> weights, Rng &rng) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  double r = rng.Uniform() * total;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (r < weights[i]) return i;
    r -= weights[i];
  }
  for (size_t i = weights.size(); i-- > 0;)
    if (weights[i] > 0) return i;
  return 0;
}

LabelSet SampleDistinct(int k, std::array<double, kNumLabels> weights, Rng &rng) {
  LabelSet set;
  for (int n = 0; n < k; ++n) {
    const size_t i = WeightedPick(weights, rng);
    set.set(i);
    weights[i] = 0.0;
  }
  return set;
}

// Three annotators whose union reproduces `label`.
std::vector<AnnotatorLabels> SplitAmongAnnotators(const ConsolidatedLabel &label, Rng &rng) {
  std::vector<AnnotatorLabels> anns(3);
  for (int a = 0; a < 3; ++a) anns[a].annotator_id = "A" + std::to_string(a + 1);
  for (LabelId id : LabelIds(label.labels)) {
    const uint64_t mask = 1 + rng.UniformIndex(7);  // nonempty subset of 3 annotators
    for (int a = 0; a < 3; ++a)
      if (mask & (1u << a)) anns[a].labels.set(id - 1);
  }
  for (auto &a : anns) a.negative = a.labels.any();
  if (label.negative && label.labels.none()) anns[rng.UniformIndex(3)].negative = true;
  return anns;
}

double DrawDuration(Rng &rng) {
  static constexpr std::array<double, 5> kShare = {0.353, 0.238, 0.280, 0.099, 0.030};
  static constexpr std::array<double, 6> kEdges = {0.5, 3.0, 6.0, 15.0, 30.0, 63.61};
  const size_t b = WeightedPick(kShare, rng);
  return std::round(rng.Uniform(kEdges[b], kEdges[b + 1]) * 100.0) / 100.0;
}

std::vector<Call> GroupIntoCalls(std::vector<ConsolidatedLabel> labels, int num_calls, Rng &rng) {
  HOTLINE_ENFORCE(num_calls >= 1, "fixture needs at least one call");
  rng.Shuffle(std::span<ConsolidatedLabel>(labels));
  std::vector<Call> calls(num_calls);
  std::vector<double> cursor(num_calls, 0.0);
  for (int c = 0; c < num_calls; ++c) {
    char id[16];
    std::snprintf(id, sizeof(id), "F%04d", c + 1);
    calls[c].call_id = id;
  }
  for (size_t i = 0; i < labels.size(); ++i) {
    Call &call = calls[i % num_calls];
    Segment s;
    s.call_id = call.call_id;
    s.segment_id = call.call_id + "-" + std::to_string(call.segments.size() + 1);
    s.audio_path = call.call_id + ".wav";
    s.sample_rate = 8000;
    double &t = cursor[i % num_calls];
    s.start_s = t;
    s.end_s = t + DrawDuration(rng);
    t = s.end_s + 0.5;
    s.annotations = SplitAmongAnnotators(labels[i], rng);
    s.consolidated = labels[i];
    call.segments.push_back(std::move(s));
  }
  std::erase_if(calls, [](const Call &c) { return c.segments.empty(); });
  return calls;
}

}  // namespace

double SyntheticLevel(int level) {
  HOTLINE_ENFORCE(level >= 0 && level <= kNumLabels + 1, "synthetic level ", level, " out of range");
  return level == 0 ? 0.05 : 0.10 + 0.045 * (level - 1);
}

Waveform SynthesizeAudio(const ConsolidatedLabel &clean, double duration_s, int sample_rate, uint64_t seed) {
  HOTLINE_ENFORCE(duration_s > 0 && sample_rate > 0, "bad synthetic audio request");
  std::vector<int> levels;
  if (!clean.negative) {
    levels.push_back(0);
  } else {
    levels.push_back(1);
    for (LabelId id : LabelIds(clean.labels)) levels.push_back(1 + id);
  }
  Rng rng(seed);
  const size_t offset = rng.UniformIndex(levels.size());
  const double phase = rng.Uniform(0.0, 2.0 * M_PI);
  const auto n = static_cast<size_t>(std::llround(duration_s * sample_rate));
  const auto block = static_cast<size_t>(std::llround(kBlockS * sample_rate));

  Waveform w;
  w.sample_rate = sample_rate;
  w.channels = 1;
  w.samples.resize(std::max<size_t>(n, 1));
  const double omega = 2.0 * M_PI * kToneHz / sample_rate;
  for (size_t i = 0; i < w.samples.size(); ++i) {
    const int level = levels[(i / block + offset) % levels.size()];
    const double amp = SyntheticLevel(level) * M_PI / 2.0;  // mean |sin| = 2 / pi
    const double v = amp * std::sin(omega * static_cast<double>(i) + phase) + kNoiseStd * rng.Normal();
    w.samples[i] = static_cast<float>(std::clamp(v, -1.0, 1.0));
  }
  return w;
}

SyntheticCorpus MakeSyntheticCorpus(const SyntheticOptions &o) {
  HOTLINE_ENFORCE(o.num_calls >= 1 && o.segments_per_call >= 1, "synthetic corpus needs calls and segments");
  HOTLINE_ENFORCE(o.min_duration_s > 0 && o.max_duration_s >= o.min_duration_s, "bad synthetic durations");
  SyntheticCorpus corpus;
  corpus.options = o;
  Rng rng(o.seed);
  for (int c = 0; c < o.num_calls; ++c) {
    Call call;
    char id[16];
    std::snprintf(id, sizeof(id), "C%03d", c + 1);
    call.call_id = id;
    double t = 0.0;
    for (int s = 0; s < o.segments_per_call; ++s) {
      ConsolidatedLabel clean;
      clean.negative = rng.Bernoulli(o.negative_fraction);
      if (clean.negative && !rng.Bernoulli(o.unlabeled_negative_fraction)) {
        const int k = 1 + static_cast<int>(WeightedPick(kCardinalityWeights, rng));
        clean.labels = SampleDistinct(k, kLabelWeights, rng);
      }
      ConsolidatedLabel noisy = clean;
      if (rng.Bernoulli(o.label_noise)) {
        const auto bit = rng.UniformIndex(kNumLabels + 1);
        if (bit == kNumLabels) {
          noisy.negative = !noisy.negative;
          if (!noisy.negative) noisy.labels.reset();
        } else {
          noisy.labels.flip(bit);
          noisy.negative = noisy.negative || noisy.labels.any();
        }
      }

      Segment seg;
      seg.call_id = call.call_id;
      char sid[32];
      std::snprintf(sid, sizeof(sid), "%s-S%04d", id, s + 1);
      seg.segment_id = sid;
      seg.audio_path = "audio/" + call.call_id + ".wav";
      seg.sample_rate = o.sample_rate;
      // Snap to whole samples so a WAV round trip reproduces the segment exactly.
      const double dur = std::round(rng.Uniform(o.min_duration_s, o.max_duration_s) * 100.0) / 100.0;
      seg.start_s = t;
      seg.end_s = t + dur;
      t = std::round((seg.end_s + o.gap_s) * 100.0) / 100.0;
      seg.annotations = SplitAmongAnnotators(noisy, rng);
      seg.consolidated = noisy;
      corpus.clean_labels[seg.segment_id] = clean;
      call.segments.push_back(std::move(seg));
    }
    corpus.calls.push_back(std::move(call));
  }
  return corpus;
}

SyntheticAudioSource::SyntheticAudioSource(const SyntheticCorpus &corpus)
    : clean_(corpus.clean_labels), sample_rate_(corpus.options.sample_rate), seed_(corpus.options.seed) {}

Waveform SyntheticAudioSource::Load(const Segment &segment) const {
  auto it = clean_.find(segment.segment_id);
  HOTLINE_ENFORCE(it != clean_.end(), "segment '", segment.segment_id, "' is not part of the synthetic corpus");
  return SynthesizeAudio(it->second, segment.Duration(), sample_rate_, DeriveSeed(seed_, Fnv1a(segment.segment_id)));
}

std::vector<Call> MakeClassCountFixture(const std::array<int64_t, kNumLabels> &per_class, int64_t non_negative,
                                        int num_calls, uint64_t seed) {
  Rng rng(seed);
  std::array<int64_t, kNumLabels> remaining = per_class;
  std::vector<ConsolidatedLabel> labels;
  while (true) {
    std::array<double, kNumLabels> weights{};
    int available = 0;
    for (int i = 0; i < kNumLabels; ++i) {
      HOTLINE_ENFORCE(remaining[i] >= 0, "negative class count");
      weights[i] = static_cast<double>(remaining[i]);
      available += remaining[i] > 0;
    }
    if (available == 0) break;
    const int k = 1 + static_cast<int>(rng.UniformIndex(static_cast<uint64_t>(std::min(available, 3))));
    ConsolidatedLabel l{true, SampleDistinct(k, weights, rng)};
    for (LabelId id : LabelIds(l.labels)) --remaining[id - 1];
    labels.push_back(l);
  }
  for (int64_t i = 0; i < non_negative; ++i) labels.push_back({});
  return GroupIntoCalls(std::move(labels), num_calls, rng);
}

std::vector<Call> MakeCardinalityFixture(const std::map<int, int64_t> &cardinality, int64_t non_negative,
                                         int num_calls, uint64_t seed) {
  Rng rng(seed);
  std::vector<ConsolidatedLabel> labels;
  for (const auto &[k, count] : cardinality) {
    HOTLINE_ENFORCE(k >= 1 && k <= kNumLabels && count >= 0, "bad cardinality entry ", k, " -> ", count);
    for (int64_t n = 0; n < count; ++n) labels.push_back({true, SampleDistinct(k, kLabelWeights, rng)});
  }
  for (int64_t i = 0; i < non_negative; ++i) labels.push_back({});
  return GroupIntoCalls(std::move(labels), num_calls, rng);
}

void WriteSyntheticCorpus(const SyntheticCorpus &corpus, const std::string &dir_name) {
  namespace fs = std::filesystem;
  const fs::path dir(dir_name);
  fs::create_directories(dir / "audio");
  const SyntheticAudioSource source(corpus);
  const int sr = corpus.options.sample_rate;

  std::ofstream manifest(dir / "manifest.jsonl", std::ios::trunc);
  HOTLINE_ENFORCE(manifest, "cannot write '", (dir / "manifest.jsonl").string(), "'");
  for (const auto &call : corpus.calls) {
    Waveform wav;
    wav.sample_rate = sr;
    wav.channels = 1;
    for (const auto &seg : call.segments) {
      const auto start = static_cast<size_t>(std::llround(seg.start_s * sr));
      const Waveform part = source.Load(seg);
      wav.samples.resize(std::max(wav.samples.size(), start + part.samples.size()), 0.0f);
      std::copy(part.samples.begin(), part.samples.end(), wav.samples.begin() + static_cast<std::ptrdiff_t>(start));

      nlohmann::json anns = nlohmann::json::array();
      for (const auto &a : seg.annotations)
        anns.push_back({{"annotator_id", a.annotator_id}, {"negative", a.negative}, {"labels", LabelIds(a.labels)}});
      nlohmann::json rec = {{"call_id", seg.call_id},     {"segment_id", seg.segment_id},
                            {"audio_path", seg.audio_path.generic_string()},
                            {"start_s", seg.start_s},     {"end_s", seg.end_s},
                            {"sample_rate", seg.sample_rate}, {"annotations", anns}};
      manifest << rec.dump() << '\n';
    }
    WriteWav(dir / "audio" / (call.call_id + ".wav"), wav);
  }
  std::ofstream taxonomy(dir / "taxonomy.tsv", std::ios::trunc);
  taxonomy << LabelTaxonomy::Default().Serialize();
}

}  // namespace hotline
