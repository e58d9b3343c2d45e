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

#include "hotline/timeline.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "hotline/error.h"

namespace hotline {

std::vector<SegmentSpan> ParseSegmentation(std::istream &in) {
  std::vector<SegmentSpan> spans;
  std::string line;
  int line_no = 0;
  bool any_named = false, any_unnamed = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::vector<std::string> fields;
    for (std::string f; ss >> f;) fields.push_back(f);
    if (fields.empty()) continue;
    if (fields.size() != 2 && fields.size() != 3)
      throw ParseError(MakeString("segmentation line ", line_no, ": expected '[id] start end'"), line_no);
    SegmentSpan span;
    try {
      size_t used = 0;
      const size_t o = fields.size() - 2;
      span.start_s = std::stod(fields[o], &used);
      if (used != fields[o].size()) throw std::invalid_argument("start");
      span.end_s = std::stod(fields[o + 1], &used);
      if (used != fields[o + 1].size()) throw std::invalid_argument("end");
    } catch (const std::exception &) {
      throw ParseError(MakeString("segmentation line ", line_no, ": bad time value"), line_no);
    }
    if (fields.size() == 3) {
      span.segment_id = fields[0];
      any_named = true;
    } else {
      any_unnamed = true;
    }
    if (!(span.end_s > span.start_s) || span.start_s < 0)
      throw ParseError(MakeString("segmentation line ", line_no, ": need 0 <= start < end"), line_no);
    spans.push_back(std::move(span));
  }
  HOTLINE_ENFORCE(!(any_named && any_unnamed), "segmentation file mixes named and unnamed segments");
  std::stable_sort(spans.begin(), spans.end(),
                   [](const SegmentSpan &a, const SegmentSpan &b) { return a.start_s < b.start_s; });
  if (any_unnamed)
    for (size_t i = 0; i < spans.size(); ++i) {
      char id[32];
      std::snprintf(id, sizeof(id), "seg-%04zu", i + 1);
      spans[i].segment_id = id;
    }
  return spans;
}

std::vector<TimelineEntry> PredictTimeline(const Waveform &call_audio, std::span<const SegmentSpan> spans,
                                           std::span<const Model> models) {
  HOTLINE_ENFORCE(!models.empty() && models.size() <= 2, "predict needs one or two models");
  const Model *binary = nullptr;
  const Model *fine = nullptr;
  for (const auto &m : models) {
    const Model *&slot = m.head.task == Task::kBinary ? binary : fine;
    HOTLINE_ENFORCE(slot == nullptr, "two ", ToString(m.head.task), " models supplied");
    slot = &m;
  }
  if (binary && fine)
    HOTLINE_ENFORCE(binary->taxonomy.Fingerprint() == fine->taxonomy.Fingerprint(),
                    "the binary and fine-grained models were trained with different taxonomies");
  HOTLINE_ENFORCE(call_audio.sample_rate > 0 && call_audio.Frames() > 0, "call audio is empty");

  std::vector<SegmentSpan> ordered(spans.begin(), spans.end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const SegmentSpan &a, const SegmentSpan &b) { return a.start_s < b.start_s; });

  std::vector<std::unique_ptr<EncoderAdapter>> adapters;
  for (const auto &m : models) adapters.push_back(CreateEncoder(m.encoder));

  std::vector<TimelineEntry> out;
  for (const auto &span : ordered) {
    const auto first = static_cast<size_t>(std::llround(span.start_s * call_audio.sample_rate));
    const auto last = std::min(call_audio.Frames(),
                               static_cast<size_t>(std::llround(span.end_s * call_audio.sample_rate)));
    HOTLINE_ENFORCE(last > first, "segment '", span.segment_id, "' [", span.start_s, ", ", span.end_s,
                    ") lies outside the ", call_audio.DurationSeconds(), " s call audio");
    Waveform piece;
    piece.sample_rate = call_audio.sample_rate;
    piece.channels = call_audio.channels;
    piece.samples.assign(call_audio.samples.begin() + static_cast<std::ptrdiff_t>(first * call_audio.channels),
                         call_audio.samples.begin() + static_cast<std::ptrdiff_t>(last * call_audio.channels));

    TimelineEntry e;
    e.segment_id = span.segment_id;
    e.start_s = span.start_s;
    e.end_s = span.end_s;
    for (size_t i = 0; i < models.size(); ++i) {
      const Model &m = models[i];
      const PooledFeature x = Pool(Encode(Preprocess(piece, m.encoder), m.encoder, *adapters[i]), m.encoder.pooling);
      const Prediction p = Decide(Forward(x, m.params, m.head), m.head, m.threshold);
      if (&m == binary) {
        e.negative = p.binary_label;
        e.negative_probability = p.probabilities[kNegativeClass];
      } else {
        e.class_probabilities.assign(p.probabilities.data(), p.probabilities.data() + p.probabilities.size());
        for (LabelId id : LabelIds(*p.label_set)) e.predicted_labels.push_back(m.taxonomy.Name(id));
        if (!binary) {
          double none = 1.0;
          for (double q : e.class_probabilities) none *= 1.0 - q;
          e.negative_probability = 1.0 - none;
        }
      }
    }
    out.push_back(std::move(e));
  }
  return out;
}

nlohmann::json TimelineToJson(std::span<const TimelineEntry> entries, const LabelTaxonomy &taxonomy) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto &e : entries) {
    nlohmann::json j = {{"segment_id", e.segment_id},
                        {"start_s", e.start_s},
                        {"end_s", e.end_s},
                        {"negative_probability", e.negative_probability},
                        {"predicted_labels", e.predicted_labels}};
    if (e.negative) j["negative"] = *e.negative;
    nlohmann::json classes = nlohmann::json::object();
    for (size_t i = 0; i < e.class_probabilities.size(); ++i)
      classes[taxonomy.Name(static_cast<LabelId>(i + 1))] = e.class_probabilities[i];
    j["class_probabilities"] = classes;
    arr.push_back(std::move(j));
  }
  return {{"entries", arr}};
}

}  // namespace hotline
