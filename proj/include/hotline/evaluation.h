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

#ifndef HOTLINE_EVALUATION_H_
#define HOTLINE_EVALUATION_H_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hotline/classifier.h"
#include "hotline/corpus.h"
#include "hotline/taxonomy.h"
#include "json.hpp"

namespace hotline {

/// Positive class = negative emotion.
struct BinaryConfusion {
  int64_t tp = 0, fp = 0, tn = 0, fn = 0;

  int64_t Total() const { return tp + fp + tn + fn; }
  void Add(bool predicted_negative, bool truly_negative);
  void Merge(const BinaryConfusion &o);
};

struct ClassCounts {
  int64_t tp = 0, fp = 0, fn = 0;
  int64_t support() const { return tp + fn; }
};

struct MultiLabelCounts {
  std::array<ClassCounts, kNumLabels> classes{};
  int64_t segments = 0;
  int64_t exact_matches = 0;

  void Add(const LabelSet &predicted, const LabelSet &truth);
  void Merge(const MultiLabelCounts &o);
};

struct ClassMetrics {
  std::string name;
  int64_t tp = 0, fp = 0, fn = 0, support = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

/// precision/recall/f1 are support-weighted averages over classes; 0/0 is taken as 0.
struct MetricsReport {
  Task task = Task::kBinary;
  int64_t segments = 0;
  /// Binary: fraction correct. Fine-grained: exact-match (subset) accuracy.
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double macro_f1 = 0.0;
  std::vector<ClassMetrics> per_class;
  std::optional<BinaryConfusion> confusion;

  nlohmann::json ToJson() const;
  static MetricsReport FromJson(const nlohmann::json &j);
};

/// Per-class metrics from raw counts with the 0/0 := 0 convention.
ClassMetrics MakeClassMetrics(std::string name, int64_t tp, int64_t fp, int64_t fn);

MetricsReport BinaryMetrics(const BinaryConfusion &confusion);
MetricsReport BinaryMetrics(std::span<const Prediction> preds, std::span<const ConsolidatedLabel> truths);

MetricsReport MultilabelMetrics(const MultiLabelCounts &counts,
                                const LabelTaxonomy &taxonomy = LabelTaxonomy::Default());
MetricsReport MultilabelMetrics(std::span<const Prediction> preds, std::span<const ConsolidatedLabel> truths,
                                const LabelTaxonomy &taxonomy = LabelTaxonomy::Default());

/// Dispatches on the task of the predictions' head.
MetricsReport Evaluate(Task task, std::span<const Prediction> preds, std::span<const ConsolidatedLabel> truths,
                       const LabelTaxonomy &taxonomy = LabelTaxonomy::Default());

/// 1 - |A n B| / |A u B|; 0 when both sets are empty.
double JaccardDistance(const LabelSet &a, const LabelSet &b);

struct ErrorRecord {
  std::string segment_id;
  std::optional<std::string> transcript;
  LabelSet truth;
  LabelSet predicted;
  double jaccard_distance = 0.0;
};

/// Fine-grained discrepancy listing, most severe first (Jaccard distance
/// descending, then segment_id). Exact matches are dropped when
/// `discrepancies_only`. `limit` == 0 keeps everything.
std::vector<ErrorRecord> ErrorReport(std::span<const Prediction> preds, std::span<const ConsolidatedLabel> truths,
                                     std::span<const Segment> segments, size_t limit = 0,
                                     bool discrepancies_only = true);

/// Tab-separated: segment_id, jaccard_distance, labels, predictions, missing,
/// spurious, transcript. Empty predictions render as "None".
void WriteErrorReportTsv(std::ostream &os, std::span<const ErrorRecord> records, const LabelTaxonomy &taxonomy);

struct ReportRow {
  std::string model;
  MetricsReport report;
};

/// Models | Accuracy | Recall | F1
void PrintBinaryTable(std::ostream &os, std::span<const ReportRow> rows);
/// Models | Precision | Recall | F1 (weighted averages)
void PrintFineTable(std::ostream &os, std::span<const ReportRow> rows);
/// Models x 11 per-class F1
void PrintPerClassF1Table(std::ostream &os, std::span<const ReportRow> rows, const LabelTaxonomy &taxonomy);

}  // namespace hotline

#endif  // HOTLINE_EVALUATION_H_
