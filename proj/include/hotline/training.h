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

#ifndef HOTLINE_TRAINING_H_
#define HOTLINE_TRAINING_H_

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hotline/classifier.h"
#include "hotline/corpus.h"
#include "hotline/encoding.h"
#include "hotline/evaluation.h"
#include "hotline/model.h"
#include "hotline/splitting.h"
#include "json.hpp"

namespace hotline {

enum class OptimizerKind { kAdam, kSgd };

std::string ToString(OptimizerKind k);
OptimizerKind ParseOptimizer(const std::string &text);

struct TrainConfig {
  Task task = Task::kBinary;
  int batch_size = 16;
  double learning_rate = 1e-4;
  /// Micro-batches per optimizer step; their mean gradients are averaged.
  int grad_accum_steps = 2;
  int epochs = 3;
  Precision precision = Precision::kFull;
  uint64_t seed = 0;
  bool freeze_encoder = true;
  double threshold = 0.5;
  OptimizerKind optimizer = OptimizerKind::kAdam;
  int hidden_dim = 0;  // 0: same as the feature dimension
  double dropout_p = 0.1;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;

  void Validate() const;
  HeadConfig MakeHeadConfig(int input_dim) const;
  nlohmann::json ToJson() const;
  static TrainConfig FromJson(const nlohmann::json &j);
};

/// A segment reduced to what the head sees.
struct Example {
  std::string call_id;
  std::string segment_id;
  Eigen::VectorXd x;
  ConsolidatedLabel y;
};

/// Requires consolidated segments.
std::vector<Example> MakeExamples(std::span<const Segment> segments, FeatureExtractor &extractor);

struct RunRecord {
  std::string fold;  // fold index, or "final"
  std::vector<double> epoch_losses;
  MetricsReport validation;
  std::string artifact_path;
  double wall_seconds = 0.0;
  std::vector<std::string> train_calls;
  std::vector<std::string> val_calls;

  nlohmann::json ToJson() const;
};

/// Mini-batch training of a head on fixed features. `epoch_losses`, when given,
/// receives the mean per-example training loss of every epoch.
HeadParameters TrainHead(std::span<const Example> train, const HeadConfig &head, const TrainConfig &cfg,
                         HeadParameters init, std::vector<double> *epoch_losses = nullptr);

/// Eval-mode predictions of `model` over `examples`.
std::vector<Prediction> Predict(const Model &model, std::span<const Example> examples);

/// Metrics of `model` over `examples`; an empty set yields an empty report.
MetricsReport EvaluateExamples(const Model &model, std::span<const Example> examples);

struct TrainResult {
  RunRecord record;
  Model model;
};

/// Trains a fresh head on `train`, validates on `val`. Throws if any call id
/// appears on both sides or if `train` is empty.
TrainResult TrainOne(std::span<const Segment> train, std::span<const Segment> val, FeatureExtractor &extractor,
                     const TrainConfig &cfg, const LabelTaxonomy &taxonomy, std::string fold = "final");

struct CvResult {
  std::vector<RunRecord> runs;
  double mean_f1 = 0.0;
  double std_f1 = 0.0;  // sample standard deviation

  nlohmann::json ToJson() const;
};

/// One run per fold, each validated on its held-out fold.
CvResult CrossValidate(const SplitPlan &plan, std::span<const Call> calls, FeatureExtractor &extractor,
                       const TrainConfig &cfg, const LabelTaxonomy &taxonomy);

struct FinalResult {
  RunRecord record;
  Model model;
  MetricsReport test_report;
  std::vector<Segment> test_segments;
  std::vector<Prediction> test_predictions;
};

/// Refits on every train call, evaluates once on the test calls and, when
/// `artifact_path` is non-empty, saves the model there.
FinalResult Finalize(const SplitPlan &plan, std::span<const Call> calls, FeatureExtractor &extractor,
                     const TrainConfig &cfg, const LabelTaxonomy &taxonomy,
                     const std::filesystem::path &artifact_path = {});

/// Appends one JSON line.
void AppendRunLog(const std::filesystem::path &path, const RunRecord &record);

}  // namespace hotline

#endif  // HOTLINE_TRAINING_H_
