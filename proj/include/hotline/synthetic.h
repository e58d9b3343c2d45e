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

#ifndef HOTLINE_SYNTHETIC_H_
#define HOTLINE_SYNTHETIC_H_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "hotline/audio.h"
#include "hotline/corpus.h"
#include "hotline/encoding.h"

namespace hotline {

// Synthetic corpora for tests, demos and acceptance runs. Nothing here is used
// on real data.

struct SyntheticOptions {
  int num_calls = 105;
  int segments_per_call = 40;
  double min_duration_s = 1.0;
  double max_duration_s = 3.0;
  double gap_s = 0.3;
  double negative_fraction = 0.47;
  /// Share of negative segments that carry no fine label.
  double unlabeled_negative_fraction = 0.03;
  /// Per-segment probability that the annotated label has one flipped bit.
  double label_noise = 0.03;
  uint64_t seed = 1;
  int sample_rate = 16000;
};

struct SyntheticCorpus {
  std::vector<Call> calls;  // consolidated; labels include the injected noise
  /// Labels the audio was rendered from, by segment_id.
  std::map<std::string, ConsolidatedLabel> clean_labels;
  SyntheticOptions options;
};

SyntheticCorpus MakeSyntheticCorpus(const SyntheticOptions &options);

/// Mean absolute amplitude the renderer uses for a label level: 0 = not negative,
/// 1 = negative marker, 1 + id for fine label `id`.
double SyntheticLevel(int level);

/// Renders a 250 Hz tone whose loudness steps through 100 ms blocks, one block
/// per active level in turn. Under the mock encoder every level lights up its
/// own feature dimensions, so labels are linearly recoverable from the pooled vector.
Waveform SynthesizeAudio(const ConsolidatedLabel &clean, double duration_s, int sample_rate, uint64_t seed);

/// Regenerates synthetic audio on demand from the clean labels.
class SyntheticAudioSource : public AudioSource {
 public:
  explicit SyntheticAudioSource(const SyntheticCorpus &corpus);
  Waveform Load(const Segment &segment) const override;

 private:
  std::map<std::string, ConsolidatedLabel> clean_;
  int sample_rate_;
  uint64_t seed_;
};

/// Corpus whose per-class label counts equal `per_class` exactly. Segments carry
/// 1-3 labels each (plus `non_negative` unlabeled segments).
std::vector<Call> MakeClassCountFixture(const std::array<int64_t, kNumLabels> &per_class, int64_t non_negative,
                                        int num_calls, uint64_t seed);

/// Corpus whose label-cardinality counts equal `cardinality` exactly (k -> segments).
std::vector<Call> MakeCardinalityFixture(const std::map<int, int64_t> &cardinality, int64_t non_negative,
                                         int num_calls, uint64_t seed);

/// Writes one WAV per call plus manifest.jsonl and taxonomy.tsv under `dir`.
void WriteSyntheticCorpus(const SyntheticCorpus &corpus, const std::string &dir);

}  // namespace hotline

#endif  // HOTLINE_SYNTHETIC_H_
