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

#include "hotline/evaluation.h"

#include <algorithm>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "hotline/error.h"

namespace hotline {

using nlohmann::json;

namespace {

double Ratio(int64_t num, int64_t den) { return den == 0 ? 0.0 : static_cast<double>(num) / den; }

void WeightedAverages(MetricsReport &r) {
  int64_t total_support = 0;
  double p = 0.0, rec = 0.0, f = 0.0, macro = 0.0;
  for (const auto &c : r.per_class) {
    total_support += c.support;
    p += c.support * c.precision;
    rec += c.support * c.recall;
    f += c.support * c.f1;
    macro += c.f1;
  }
  r.precision = total_support ? p / total_support : 0.0;
  r.recall = total_support ? rec / total_support : 0.0;
  r.f1 = total_support ? f / total_support : 0.0;
  r.macro_f1 = r.per_class.empty() ? 0.0 : macro / static_cast<double>(r.per_class.size());
}

void CheckAligned(size_t preds, size_t truths) {
  HOTLINE_ENFORCE(preds == truths, "predictions (", preds, ") and truths (", truths, ") differ in length");
}

std::string Percent(double v) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(2) << 100.0 * v << '%';
  return ss.str();
}

size_t ModelColumnWidth(std::span<const ReportRow> rows) {
  size_t w = 8;
  for (const auto &r : rows) w = std::max(w, r.model.size() + 2);
  return w;
}

std::string CleanCell(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
  return s;
}

}  // namespace

void BinaryConfusion::Add(bool predicted_negative, bool truly_negative) {
  if (predicted_negative)
    (truly_negative ? tp : fp)++;
  else
    (truly_negative ? fn : tn)++;
}

void BinaryConfusion::Merge(const BinaryConfusion &o) {
  tp += o.tp;
  fp += o.fp;
  tn += o.tn;
  fn += o.fn;
}

void MultiLabelCounts::Add(const LabelSet &predicted, const LabelSet &truth) {
  ++segments;
  if (predicted == truth) ++exact_matches;
  for (int i = 0; i < kNumLabels; ++i) {
    const bool p = predicted.test(i), t = truth.test(i);
    if (p && t) ++classes[i].tp;
    else if (p) ++classes[i].fp;
    else if (t) ++classes[i].fn;
  }
}

void MultiLabelCounts::Merge(const MultiLabelCounts &o) {
  segments += o.segments;
  exact_matches += o.exact_matches;
  for (int i = 0; i < kNumLabels; ++i) {
    classes[i].tp += o.classes[i].tp;
    classes[i].fp += o.classes[i].fp;
    classes[i].fn += o.classes[i].fn;
  }
}

ClassMetrics MakeClassMetrics(std::string name, int64_t tp, int64_t fp, int64_t fn) {
  ClassMetrics c;
  c.name = std::move(name);
  c.tp = tp;
  c.fp = fp;
  c.fn = fn;
  c.support = tp + fn;
  c.precision = Ratio(tp, tp + fp);
  c.recall = Ratio(tp, tp + fn);
  c.f1 = (c.precision + c.recall) > 0 ? 2.0 * c.precision * c.recall / (c.precision + c.recall) : 0.0;
  return c;
}

MetricsReport BinaryMetrics(const BinaryConfusion &m) {
  MetricsReport r;
  r.task = Task::kBinary;
  r.segments = m.Total();
  r.accuracy = Ratio(m.tp + m.tn, m.Total());
  // Class order follows the logit order: non-negative first.
  r.per_class.push_back(MakeClassMetrics("non-negative", m.tn, m.fn, m.fp));
  r.per_class.push_back(MakeClassMetrics("negative", m.tp, m.fp, m.fn));
  WeightedAverages(r);
  r.confusion = m;
  return r;
}

MetricsReport BinaryMetrics(std::span<const Prediction> preds, std::span<const ConsolidatedLabel> truths) {
  CheckAligned(preds.size(), truths.size());
  HOTLINE_ENFORCE(!preds.empty(), "binary metrics need at least one segment");
  BinaryConfusion m;
  for (size_t i = 0; i < preds.size(); ++i) {
    HOTLINE_ENFORCE(preds[i].binary_label.has_value(), "prediction ", i, " is not a binary prediction");
    m.Add(*preds[i].binary_label, truths[i].negative);
  }
  return BinaryMetrics(m);
}

MetricsReport MultilabelMetrics(const MultiLabelCounts &counts, const LabelTaxonomy &taxonomy) {
  MetricsReport r;
  r.task = Task::kFineGrained;
  r.segments = counts.segments;
  r.accuracy = Ratio(counts.exact_matches, counts.segments);
  for (int i = 0; i < kNumLabels; ++i) {
    const auto &c = counts.classes[i];
    r.per_class.push_back(MakeClassMetrics(taxonomy.Name(i + 1), c.tp, c.fp, c.fn));
  }
  WeightedAverages(r);
  return r;
}

MetricsReport MultilabelMetrics(std::span<const Prediction> preds, std::span<const ConsolidatedLabel> truths,
                                const LabelTaxonomy &taxonomy) {
  CheckAligned(preds.size(), truths.size());
  MultiLabelCounts counts;
  for (size_t i = 0; i < preds.size(); ++i) {
    HOTLINE_ENFORCE(preds[i].label_set.has_value(), "prediction ", i, " is not a fine-grained prediction");
    counts.Add(*preds[i].label_set, truths[i].labels);
  }
  return MultilabelMetrics(counts, taxonomy);
}

MetricsReport Evaluate(Task task, std::span<const Prediction> preds, std::span<const ConsolidatedLabel> truths,
                       const LabelTaxonomy &taxonomy) {
  return task == Task::kBinary ? BinaryMetrics(preds, truths) : MultilabelMetrics(preds, truths, taxonomy);
}

json MetricsReport::ToJson() const {
  json classes = json::array();
  for (const auto &c : per_class)
    classes.push_back({{"name", c.name}, {"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"support", c.support},
                       {"precision", c.precision}, {"recall", c.recall}, {"f1", c.f1}});
  json j = {{"task", ToString(task)},
            {"segments", segments},
            {"accuracy", accuracy},
            {"weighted_precision", precision},
            {"weighted_recall", recall},
            {"weighted_f1", f1},
            {"macro_f1", macro_f1},
            {"per_class", classes},
            {"note", "averages are support-weighted over classes; 0/0 metric cells are defined as 0"}};
  if (confusion)
    j["confusion"] = {{"tp", confusion->tp}, {"fp", confusion->fp}, {"tn", confusion->tn}, {"fn", confusion->fn}};
  return j;
}

MetricsReport MetricsReport::FromJson(const json &j) {
  MetricsReport r;
  r.task = ParseTask(j.at("task").get<std::string>());
  r.segments = j.at("segments").get<int64_t>();
  r.accuracy = j.at("accuracy").get<double>();
  r.precision = j.at("weighted_precision").get<double>();
  r.recall = j.at("weighted_recall").get<double>();
  r.f1 = j.at("weighted_f1").get<double>();
  r.macro_f1 = j.at("macro_f1").get<double>();
  for (const json &c : j.at("per_class")) {
    ClassMetrics m;
    m.name = c.at("name").get<std::string>();
    m.tp = c.at("tp").get<int64_t>();
    m.fp = c.at("fp").get<int64_t>();
    m.fn = c.at("fn").get<int64_t>();
    m.support = c.at("support").get<int64_t>();
    m.precision = c.at("precision").get<double>();
    m.recall = c.at("recall").get<double>();
    m.f1 = c.at("f1").get<double>();
    r.per_class.push_back(std::move(m));
  }
  if (j.contains("confusion")) {
    const json &c = j["confusion"];
    r.confusion = BinaryConfusion{c.at("tp").get<int64_t>(), c.at("fp").get<int64_t>(), c.at("tn").get<int64_t>(),
                                  c.at("fn").get<int64_t>()};
  }
  return r;
}

double JaccardDistance(const LabelSet &a, const LabelSet &b) {
  const auto uni = (a | b).count();
  if (uni == 0) return 0.0;
  return 1.0 - static_cast<double>((a & b).count()) / static_cast<double>(uni);
}

std::vector<ErrorRecord> ErrorReport(std::span<const Prediction> preds, std::span<const ConsolidatedLabel> truths,
                                     std::span<const Segment> segments, size_t limit, bool discrepancies_only) {
  CheckAligned(preds.size(), truths.size());
  HOTLINE_ENFORCE(segments.size() == preds.size(), "segments (", segments.size(), ") and predictions (",
                  preds.size(), ") differ in length");
  std::vector<ErrorRecord> out;
  for (size_t i = 0; i < preds.size(); ++i) {
    HOTLINE_ENFORCE(preds[i].label_set.has_value(), "error report needs fine-grained predictions");
    ErrorRecord rec{segments[i].segment_id, segments[i].transcript, truths[i].labels, *preds[i].label_set, 0.0};
    rec.jaccard_distance = JaccardDistance(rec.truth, rec.predicted);
    if (discrepancies_only && rec.jaccard_distance == 0.0) continue;
    out.push_back(std::move(rec));
  }
  std::sort(out.begin(), out.end(), [](const ErrorRecord &a, const ErrorRecord &b) {
    if (a.jaccard_distance != b.jaccard_distance) return a.jaccard_distance > b.jaccard_distance;
    return a.segment_id < b.segment_id;
  });
  if (limit > 0 && out.size() > limit) out.resize(limit);
  return out;
}

void WriteErrorReportTsv(std::ostream &os, std::span<const ErrorRecord> records, const LabelTaxonomy &taxonomy) {
  auto names = [&](const LabelSet &s) { return s.none() ? std::string() : taxonomy.Render(s); };
  os << "segment_id\tjaccard_distance\tlabels\tpredictions\tmissing\tspurious\ttranscript\n";
  for (const auto &r : records) {
    os << CleanCell(r.segment_id) << '\t' << std::fixed << std::setprecision(4) << r.jaccard_distance
       << std::defaultfloat << '\t' << taxonomy.Render(r.truth) << '\t' << taxonomy.Render(r.predicted) << '\t'
       << names(r.truth & ~r.predicted) << '\t' << names(r.predicted & ~r.truth) << '\t'
       << CleanCell(r.transcript.value_or("")) << '\n';
  }
}

void PrintBinaryTable(std::ostream &os, std::span<const ReportRow> rows) {
  const auto w = static_cast<int>(ModelColumnWidth(rows));
  os << std::left << std::setw(w) << "Models" << std::right << std::setw(10) << "Accuracy" << std::setw(10)
     << "Recall" << std::setw(10) << "F1" << '\n';
  for (const auto &r : rows)
    os << std::left << std::setw(w) << r.model << std::right << std::setw(10) << Percent(r.report.accuracy)
       << std::setw(10) << Percent(r.report.recall) << std::setw(10) << Percent(r.report.f1) << '\n';
  os << "(recall and F1 are support-weighted over both classes; 0/0 := 0)\n";
}

void PrintFineTable(std::ostream &os, std::span<const ReportRow> rows) {
  const auto w = static_cast<int>(ModelColumnWidth(rows));
  os << std::left << std::setw(w) << "Models" << std::right << std::setw(11) << "Precision" << std::setw(10)
     << "Recall" << std::setw(10) << "F1" << '\n';
  for (const auto &r : rows)
    os << std::left << std::setw(w) << r.model << std::right << std::setw(11) << Percent(r.report.precision)
       << std::setw(10) << Percent(r.report.recall) << std::setw(10) << Percent(r.report.f1) << '\n';
  os << "(weighted averages over the 11 classes; 0/0 := 0)\n";
}

void PrintPerClassF1Table(std::ostream &os, std::span<const ReportRow> rows, const LabelTaxonomy &taxonomy) {
  const auto w = static_cast<int>(ModelColumnWidth(rows));
  std::vector<int> widths;
  os << std::left << std::setw(w) << "Models" << std::right;
  for (int i = 1; i <= kNumLabels; ++i) {
    widths.push_back(static_cast<int>(std::max<size_t>(9, taxonomy.Name(i).size() + 2)));
    os << std::setw(widths.back()) << taxonomy.Name(i);
  }
  os << '\n';
  for (const auto &r : rows) {
    os << std::left << std::setw(w) << r.model << std::right;
    for (int i = 0; i < kNumLabels; ++i) {
      const double f1 = i < static_cast<int>(r.report.per_class.size()) ? r.report.per_class[i].f1 : 0.0;
      os << std::setw(widths[i]) << Percent(f1);
    }
    os << '\n';
  }
}

}  // namespace hotline
