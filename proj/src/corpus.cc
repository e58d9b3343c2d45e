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

#include "hotline/corpus.h"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "hotline/error.h"

namespace hotline {

using nlohmann::json;

namespace {

[[noreturn]] void Fail(int line, const std::string &msg) {
  throw ParseError(MakeString("manifest line ", line, ": ", msg), line);
}

const json &Require(const json &obj, const char *key, int line) {
  auto it = obj.find(key);
  if (it == obj.end()) Fail(line, MakeString("missing field '", key, "'"));
  return *it;
}

std::string RequireString(const json &obj, const char *key, int line) {
  const json &v = Require(obj, key, line);
  if (!v.is_string()) Fail(line, MakeString("field '", key, "' must be a string"));
  return v.get<std::string>();
}

double RequireNumber(const json &obj, const char *key, int line) {
  const json &v = Require(obj, key, line);
  if (!v.is_number()) Fail(line, MakeString("field '", key, "' must be a number"));
  return v.get<double>();
}

void RejectUnknown(const json &obj, std::initializer_list<const char *> allowed, int line) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = std::any_of(allowed.begin(), allowed.end(),
                          [&](const char *k) { return it.key() == k; });
    if (!ok) Fail(line, MakeString("unknown field '", it.key(), "'"));
  }
}

AnnotatorLabels ParseAnnotation(const json &a, const std::string &segment_id, int line) {
  if (!a.is_object()) Fail(line, "annotation entries must be objects");
  RejectUnknown(a, {"annotator_id", "negative", "labels"}, line);
  AnnotatorLabels out;
  out.annotator_id = RequireString(a, "annotator_id", line);
  const json &neg = Require(a, "negative", line);
  if (!neg.is_boolean()) Fail(line, "field 'negative' must be a boolean");
  out.negative = neg.get<bool>();
  const json &labels = Require(a, "labels", line);
  if (!labels.is_array()) Fail(line, "field 'labels' must be an array");
  for (const json &l : labels) {
    if (!l.is_number_integer()) Fail(line, "label ids must be integers");
    const int64_t id = l.get<int64_t>();
    if (id < 1 || id > kNumLabels)
      Fail(line, MakeString("segment '", segment_id, "': label id ", id, " outside 1..", kNumLabels));
    out.labels.set(static_cast<size_t>(id - 1));
  }
  return out;
}

json LabelSetToJson(const LabelSet &set) { return LabelIds(set); }

LabelSet LabelSetFromJson(const json &j) {
  LabelSet set;
  for (const json &v : j) {
    const int id = v.get<int>();
    HOTLINE_ENFORCE(ValidLabelId(id), "label id ", id, " outside 1..", kNumLabels);
    set.set(id - 1);
  }
  return set;
}

}  // namespace

std::vector<Call> LoadManifest(std::istream &in, const std::filesystem::path &base_dir) {
  std::map<std::string, Call> by_call;
  std::set<std::string> seen_ids;
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(text);
    } catch (const json::parse_error &e) {
      Fail(line, MakeString("not valid JSON (", e.what(), ")"));
    }
    if (!rec.is_object()) Fail(line, "record must be a JSON object");
    RejectUnknown(rec,
                  {"call_id", "segment_id", "audio_path", "start_s", "end_s", "sample_rate",
                   "transcript", "annotations"},
                  line);
    Segment seg;
    seg.call_id = RequireString(rec, "call_id", line);
    seg.segment_id = RequireString(rec, "segment_id", line);
    if (seg.call_id.empty()) Fail(line, "empty call_id");
    if (seg.segment_id.empty()) Fail(line, "empty segment_id");
    std::filesystem::path audio = RequireString(rec, "audio_path", line);
    seg.audio_path = (audio.is_relative() && !base_dir.empty()) ? (base_dir / audio).lexically_normal()
                                                                : audio;
    seg.start_s = RequireNumber(rec, "start_s", line);
    seg.end_s = RequireNumber(rec, "end_s", line);
    const json &sr = Require(rec, "sample_rate", line);
    if (!sr.is_number_integer() || sr.get<int64_t>() <= 0)
      Fail(line, "field 'sample_rate' must be a positive integer");
    seg.sample_rate = sr.get<int>();
    if (auto it = rec.find("transcript"); it != rec.end() && !it->is_null()) {
      if (!it->is_string()) Fail(line, "field 'transcript' must be a string");
      seg.transcript = it->get<std::string>();
    }
    const json &anns = Require(rec, "annotations", line);
    if (!anns.is_array()) Fail(line, "field 'annotations' must be an array");
    for (const json &a : anns) seg.annotations.push_back(ParseAnnotation(a, seg.segment_id, line));

    if (!(seg.end_s > seg.start_s))
      Fail(line, MakeString("segment '", seg.segment_id, "': end_s (", seg.end_s,
                            ") must exceed start_s (", seg.start_s, ")"));
    if (!seen_ids.insert(seg.segment_id).second)
      Fail(line, MakeString("duplicate segment_id '", seg.segment_id, "'"));

    Call &call = by_call[seg.call_id];
    call.call_id = seg.call_id;
    call.segments.push_back(std::move(seg));
  }

  std::vector<Call> calls;
  calls.reserve(by_call.size());
  for (auto &[id, call] : by_call) {
    std::stable_sort(call.segments.begin(), call.segments.end(),
                     [](const Segment &a, const Segment &b) {
                       if (a.start_s != b.start_s) return a.start_s < b.start_s;
                       return a.segment_id < b.segment_id;
                     });
    calls.push_back(std::move(call));
  }
  return calls;
}

std::vector<Call> LoadManifest(const std::filesystem::path &manifest_path) {
  std::ifstream in(manifest_path);
  HOTLINE_ENFORCE(in, "cannot open manifest '", manifest_path.string(), "'");
  return LoadManifest(in, manifest_path.parent_path());
}

ConsolidatedLabel Consolidate(std::span<const AnnotatorLabels> annotations) {
  HOTLINE_ENFORCE(!annotations.empty(), "cannot consolidate a segment with zero annotators");
  ConsolidatedLabel out;
  for (const auto &a : annotations) {
    out.negative = out.negative || a.negative;
    out.labels |= a.labels;
  }
  return out;
}

void ConsolidateAll(std::vector<Call> &calls) {
  for (auto &call : calls)
    for (auto &seg : call.segments) {
      try {
        seg.consolidated = Consolidate(seg.annotations);
      } catch (const Error &e) {
        throw Error(MakeString("segment '", seg.segment_id, "': ", e.what()));
      }
    }
}

size_t CountSegments(std::span<const Call> calls) {
  size_t n = 0;
  for (const auto &c : calls) n += c.segments.size();
  return n;
}

int DurationBucket(double seconds) {
  int b = 0;
  while (b < static_cast<int>(kDurationEdges.size()) && seconds >= kDurationEdges[b]) ++b;
  return b;
}

std::string DurationBucketName(int bucket) {
  HOTLINE_ENFORCE(bucket >= 0 && bucket < kNumDurationBuckets, "bad duration bucket ", bucket);
  auto edge = [](int i) {
    std::ostringstream ss;
    ss << kDurationEdges[i];
    return ss.str();
  };
  const std::string lo = bucket == 0 ? "0" : edge(bucket - 1);
  const std::string hi = bucket == kNumDurationBuckets - 1 ? "inf" : edge(bucket);
  return "[" + lo + "," + hi + ")";
}

int64_t CorpusStats::LabeledSegments() const {
  int64_t n = 0;
  for (const auto &[k, count] : cardinality_counts) n += count;
  return n;
}

int64_t CorpusStats::LabelInstances() const {
  int64_t n = 0;
  for (int64_t c : per_class_counts) n += c;
  return n;
}

CorpusStats ComputeStats(std::span<const Call> calls) {
  CorpusStats stats;
  stats.call_count = static_cast<int64_t>(calls.size());
  double total_duration = 0.0;
  for (const auto &call : calls) {
    for (const auto &seg : call.segments) {
      HOTLINE_ENFORCE(seg.consolidated.has_value(), "segment '", seg.segment_id,
                      "' has not been consolidated");
      const ConsolidatedLabel &label = *seg.consolidated;
      ++stats.segment_count;
      (label.negative ? stats.negative_count : stats.non_negative_count)++;

      const auto ids = LabelIds(label.labels);
      if (!ids.empty()) ++stats.cardinality_counts[static_cast<int>(ids.size())];
      for (LabelId i : ids) {
        ++stats.per_class_counts[i - 1];
        for (LabelId j : ids) ++stats.cooccurrence[i - 1][j - 1];
      }

      const double d = seg.Duration();
      total_duration += d;
      stats.max_duration_s = std::max(stats.max_duration_s, d);
      ++stats.duration_histogram[DurationBucket(d)];
    }
  }
  if (stats.segment_count > 0)
    stats.mean_duration_s = total_duration / static_cast<double>(stats.segment_count);
  return stats;
}

json StatsToJson(const CorpusStats &stats, const LabelTaxonomy &taxonomy) {
  json j;
  j["calls"] = stats.call_count;
  j["segments"] = stats.segment_count;
  j["negative_count"] = stats.negative_count;
  j["non_negative_count"] = stats.non_negative_count;
  j["mean_duration_s"] = stats.mean_duration_s;
  j["max_duration_s"] = stats.max_duration_s;
  json per_class = json::array();
  for (int i = 0; i < kNumLabels; ++i)
    per_class.push_back({{"id", i + 1}, {"name", taxonomy.Name(i + 1)}, {"count", stats.per_class_counts[i]}});
  j["per_class_counts"] = per_class;
  json card = json::object();
  for (const auto &[k, count] : stats.cardinality_counts) card[std::to_string(k)] = count;
  j["cardinality_counts"] = card;
  j["cooccurrence"] = stats.cooccurrence;
  json hist = json::array();
  for (int b = 0; b < kNumDurationBuckets; ++b)
    hist.push_back({{"bucket", DurationBucketName(b)}, {"count", stats.duration_histogram[b]}});
  j["duration_histogram"] = hist;
  return j;
}

void PrintStatsTable(std::ostream &os, const CorpusStats &stats, const LabelTaxonomy &taxonomy) {
  os << "calls " << stats.call_count << ", segments " << stats.segment_count << " (negative "
     << stats.negative_count << ", non-negative " << stats.non_negative_count << ")\n\n";
  os << std::left << std::setw(20) << "Categories" << std::right << std::setw(10) << "Segments" << '\n';
  for (int i = 0; i < kNumLabels; ++i) {
    std::string label = std::to_string(i + 1) + ". " + taxonomy.Name(i + 1);
    os << std::left << std::setw(20) << label << std::right << std::setw(10)
       << stats.per_class_counts[i] << '\n';
  }
  os << '\n' << std::left << std::setw(20) << "Number of labels" << std::right << std::setw(10)
     << "Segments" << '\n';
  for (const auto &[k, count] : stats.cardinality_counts)
    os << std::left << std::setw(20) << k << std::right << std::setw(10) << count << '\n';
  os << '\n' << std::left << std::setw(20) << "Duration (s)" << std::right << std::setw(10)
     << "Segments" << std::setw(10) << "Share" << '\n';
  for (int b = 0; b < kNumDurationBuckets; ++b) {
    const double share = stats.segment_count
                             ? 100.0 * stats.duration_histogram[b] / stats.segment_count
                             : 0.0;
    os << std::left << std::setw(20) << DurationBucketName(b) << std::right << std::setw(10)
       << stats.duration_histogram[b] << std::setw(9) << std::fixed << std::setprecision(2) << share
       << "%\n";
  }
  os << std::defaultfloat << std::setprecision(6);
  os << "\nmean duration " << std::fixed << std::setprecision(2) << stats.mean_duration_s
     << " s, max " << stats.max_duration_s << " s\n"
     << std::defaultfloat << std::setprecision(6);
}

ValidationReport ValidateCorpus(std::span<const Call> calls) {
  ValidationReport report;
  auto add = [&](std::string seg, std::string msg) {
    report.violations.push_back({std::move(seg), std::move(msg)});
  };

  std::unordered_map<std::string, int> id_counts;
  std::set<std::string> call_ids;
  bool all_consolidated = true;
  for (const auto &call : calls) {
    if (!call_ids.insert(call.call_id).second)
      add("", MakeString("call '", call.call_id, "' appears more than once"));
    if (call.segments.empty()) add("", MakeString("call '", call.call_id, "' has no segments"));
    for (size_t i = 0; i < call.segments.size(); ++i) {
      const Segment &seg = call.segments[i];
      if (seg.segment_id.empty()) add("", MakeString("call '", call.call_id, "' has a segment without id"));
      if (seg.call_id.empty())
        add(seg.segment_id, "missing call_id");
      else if (seg.call_id != call.call_id)
        add(seg.segment_id, MakeString("call_id '", seg.call_id, "' differs from its call '", call.call_id, "'"));
      if (!(seg.end_s > seg.start_s))
        add(seg.segment_id, MakeString("non-positive duration (start ", seg.start_s, ", end ", seg.end_s, ")"));
      if (i > 0 && seg.start_s < call.segments[i - 1].start_s)
        add(seg.segment_id, "segments of the call are not ordered by start_s");
      if (seg.sample_rate <= 0) add(seg.segment_id, "non-positive sample_rate");
      if (seg.annotations.empty() || seg.annotations.size() > 3)
        add(seg.segment_id, MakeString("expected 1..3 annotators, got ", seg.annotations.size()));

      bool annotator_breach = false;
      for (const auto &a : seg.annotations) {
        if (a.labels.any() && !a.negative) {
          annotator_breach = true;
          add(seg.segment_id, MakeString("annotator '", a.annotator_id,
                                         "' assigns fine labels but negative=false"));
        }
      }
      if (!seg.consolidated) {
        all_consolidated = false;
      } else {
        if (!annotator_breach && seg.consolidated->labels.any() && !seg.consolidated->negative)
          add(seg.segment_id, "consolidated label has fine labels but negative=false");
        if (!seg.annotations.empty() && *seg.consolidated != Consolidate(seg.annotations))
          add(seg.segment_id, "consolidated label disagrees with its annotations");
      }
      if (!seg.segment_id.empty()) ++id_counts[seg.segment_id];
    }
  }
  std::vector<std::pair<std::string, int>> dups(id_counts.begin(), id_counts.end());
  std::sort(dups.begin(), dups.end());
  for (const auto &[id, n] : dups)
    for (int k = 1; k < n; ++k) add(id, "duplicate segment_id");

  if (all_consolidated) {
    const CorpusStats stats = ComputeStats(calls);
    int64_t weighted = 0;
    for (const auto &[k, count] : stats.cardinality_counts) weighted += k * count;
    if (weighted != stats.LabelInstances())
      add("", MakeString("per-class total ", stats.LabelInstances(),
                         " disagrees with cardinality-weighted total ", weighted));
    for (int i = 0; i < kNumLabels; ++i)
      for (int j = 0; j < kNumLabels; ++j)
        if (stats.cooccurrence[i][j] != stats.cooccurrence[j][i] ||
            stats.cooccurrence[i][j] > std::min(stats.per_class_counts[i], stats.per_class_counts[j]))
          add("", MakeString("co-occurrence cell (", i + 1, ",", j + 1, ") is inconsistent"));
  }
  return report;
}

json ValidationToJson(const ValidationReport &report) {
  json v = json::array();
  for (const auto &x : report.violations) v.push_back({{"segment_id", x.segment_id}, {"message", x.message}});
  return {{"ok", report.ok()}, {"violations", v}};
}

json CorpusToJson(std::span<const Call> calls, const LabelTaxonomy &taxonomy) {
  json jcalls = json::array();
  for (const auto &call : calls) {
    json segs = json::array();
    for (const auto &s : call.segments) {
      json js;
      js["call_id"] = s.call_id;
      js["segment_id"] = s.segment_id;
      js["audio_path"] = s.audio_path.generic_string();
      js["start_s"] = s.start_s;
      js["end_s"] = s.end_s;
      js["sample_rate"] = s.sample_rate;
      js["transcript"] = s.transcript ? json(*s.transcript) : json(nullptr);
      json anns = json::array();
      for (const auto &a : s.annotations)
        anns.push_back({{"annotator_id", a.annotator_id}, {"negative", a.negative},
                        {"labels", LabelSetToJson(a.labels)}});
      js["annotations"] = anns;
      js["consolidated"] = s.consolidated ? json{{"negative", s.consolidated->negative},
                                                 {"labels", LabelSetToJson(s.consolidated->labels)}}
                                          : json(nullptr);
      segs.push_back(std::move(js));
    }
    jcalls.push_back({{"call_id", call.call_id}, {"segments", std::move(segs)}});
  }
  return {{"format", "hotline-corpus/1"},
          {"taxonomy", taxonomy.Serialize()},
          {"taxonomy_fingerprint", taxonomy.Fingerprint()},
          {"calls", std::move(jcalls)}};
}

CorpusCache CorpusFromJson(const json &j) {
  HOTLINE_ENFORCE(j.value("format", "") == "hotline-corpus/1", "not a corpus cache (format tag missing)");
  CorpusCache out;
  std::istringstream tax(j.at("taxonomy").get<std::string>());
  out.taxonomy = LabelTaxonomy::Parse(tax);
  for (const json &jc : j.at("calls")) {
    Call call;
    call.call_id = jc.at("call_id").get<std::string>();
    for (const json &js : jc.at("segments")) {
      Segment s;
      s.call_id = js.at("call_id").get<std::string>();
      s.segment_id = js.at("segment_id").get<std::string>();
      s.audio_path = js.at("audio_path").get<std::string>();
      s.start_s = js.at("start_s").get<double>();
      s.end_s = js.at("end_s").get<double>();
      s.sample_rate = js.at("sample_rate").get<int>();
      if (!js.at("transcript").is_null()) s.transcript = js["transcript"].get<std::string>();
      for (const json &ja : js.at("annotations"))
        s.annotations.push_back({ja.at("annotator_id").get<std::string>(), ja.at("negative").get<bool>(),
                                 LabelSetFromJson(ja.at("labels"))});
      if (!js.at("consolidated").is_null())
        s.consolidated = ConsolidatedLabel{js["consolidated"].at("negative").get<bool>(),
                                           LabelSetFromJson(js["consolidated"].at("labels"))};
      call.segments.push_back(std::move(s));
    }
    out.calls.push_back(std::move(call));
  }
  return out;
}

}  // namespace hotline
