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

#ifndef HOTLINE_TIMELINE_H_
#define HOTLINE_TIMELINE_H_

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hotline/audio.h"
#include "hotline/model.h"
#include "json.hpp"

namespace hotline {

struct SegmentSpan {
  std::string segment_id;
  double start_s = 0.0;
  double end_s = 0.0;
};

/// One line per segment: `start end` or `segment_id start end`, whitespace
/// separated; `#` comments and blank lines are skipped. Missing ids become
/// "seg-0001"... in start order. Result is sorted by start_s.
std::vector<SegmentSpan> ParseSegmentation(std::istream &in);

struct TimelineEntry {
  std::string segment_id;
  double start_s = 0.0;
  double end_s = 0.0;
  double negative_probability = 0.0;
  /// Binary head decision, when a binary model was supplied.
  std::optional<bool> negative;
  /// Per-class sigmoid probabilities; empty without a fine-grained model.
  std::vector<double> class_probabilities;
  std::vector<std::string> predicted_labels;
};

/// Scores every span of one call with up to one binary and one fine-grained
/// model. Without a binary model the negative probability is the chance that
/// at least one fine label fires, 1 - prod(1 - p_i).
std::vector<TimelineEntry> PredictTimeline(const Waveform &call_audio, std::span<const SegmentSpan> spans,
                                           std::span<const Model> models);

nlohmann::json TimelineToJson(std::span<const TimelineEntry> entries, const LabelTaxonomy &taxonomy);

}  // namespace hotline

#endif  // HOTLINE_TIMELINE_H_
