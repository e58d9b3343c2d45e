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

#ifndef HOTLINE_CORPUS_H_
#define HOTLINE_CORPUS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hotline/taxonomy.h"
#include "json.hpp"

namespace hotline {

struct AnnotatorLabels {
  std::string annotator_id;
  bool negative = false;
  LabelSet labels;
};

struct ConsolidatedLabel {
  bool negative = false;
  LabelSet labels;

  int Cardinality() const { return static_cast<int>(labels.count()); }
  bool operator==(const ConsolidatedLabel &) const = default;
};

struct Segment {
  std::string call_id;
  std::string segment_id;
  std::filesystem::path audio_path;
  double start_s = 0.0;
  double end_s = 0.0;
  int sample_rate = 0;
  std::vector<AnnotatorLabels> annotations;
  /// Empty until `Consolidate` has been applied.
  std::optional<ConsolidatedLabel> consolidated;
  std::optional<std::string> transcript;

  double Duration() const { return end_s - start_s; }
};

struct Call {
  std::string call_id;
  std::vector<Segment> segments;  // sorted by start_s
};

/// Reads a JSON Lines manifest, one segment per line. Relative audio paths are
/// resolved against `base_dir`. Calls come back ordered by call_id and their
/// segments by start_s; annotations are attached but not consolidated.
/// Throws ParseError (with line number) on malformed or invalid records.
std::vector<Call> LoadManifest(std::istream &in, const std::filesystem::path &base_dir = {});
std::vector<Call> LoadManifest(const std::filesystem::path &manifest_path);

/// Union of annotator label sets, OR of negative flags.
ConsolidatedLabel Consolidate(std::span<const AnnotatorLabels> annotations);

/// Applies `Consolidate` to every segment.
void ConsolidateAll(std::vector<Call> &calls);

size_t CountSegments(std::span<const Call> calls);

/// Duration buckets in seconds: [0,3) [3,6) [6,15) [15,30) [30,inf).
inline constexpr std::array<double, 4> kDurationEdges = {3.0, 6.0, 15.0, 30.0};
inline constexpr int kNumDurationBuckets = 5;
int DurationBucket(double seconds);
std::string DurationBucketName(int bucket);

struct CorpusStats {
  std::array<int64_t, kNumLabels> per_class_counts{};
  /// k -> number of segments carrying exactly k labels, k >= 1 only.
  std::map<int, int64_t> cardinality_counts;
  /// cooccurrence[i][j], 0-based; the diagonal holds per-class totals.
  std::array<std::array<int64_t, kNumLabels>, kNumLabels> cooccurrence{};
  std::array<int64_t, kNumDurationBuckets> duration_histogram{};
  double mean_duration_s = 0.0;
  double max_duration_s = 0.0;
  int64_t negative_count = 0;
  int64_t non_negative_count = 0;
  int64_t segment_count = 0;
  int64_t call_count = 0;

  int64_t LabeledSegments() const;
  int64_t LabelInstances() const;
};

/// Requires every segment to be consolidated.
CorpusStats ComputeStats(std::span<const Call> calls);

nlohmann::json StatsToJson(const CorpusStats &stats, const LabelTaxonomy &taxonomy);

/// Aligned-column console rendering of per-class, cardinality and duration tables.
void PrintStatsTable(std::ostream &os, const CorpusStats &stats, const LabelTaxonomy &taxonomy);

struct Violation {
  std::string segment_id;  // empty for call- or corpus-level findings
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Non-fatal structural checks over loaded calls.
ValidationReport ValidateCorpus(std::span<const Call> calls);

nlohmann::json ValidationToJson(const ValidationReport &report);

/// Lossless JSON form of a loaded (and possibly consolidated) corpus.
nlohmann::json CorpusToJson(std::span<const Call> calls, const LabelTaxonomy &taxonomy);

struct CorpusCache {
  LabelTaxonomy taxonomy;
  std::vector<Call> calls;
};
CorpusCache CorpusFromJson(const nlohmann::json &j);

}  // namespace hotline

#endif  // HOTLINE_CORPUS_H_
