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

#ifndef HOTLINE_CLASSIFIER_H_
#define HOTLINE_CLASSIFIER_H_

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>

#include "hotline/corpus.h"
#include "hotline/encoding.h"
#include "json.hpp"

namespace hotline {

enum class Task { kBinary, kFineGrained };

std::string ToString(Task task);
/// Accepts "binary", "fine", "fine_grained".
Task ParseTask(const std::string &text);

/// Binary heads put the negative-emotion class at this logit index.
inline constexpr int kNegativeClass = 1;

struct HeadConfig {
  int input_dim = 0;
  int hidden_dim = 0;
  double dropout_p = 0.1;
  Task task = Task::kBinary;

  int NumOutputs() const { return task == Task::kBinary ? 2 : kNumLabels; }
  void Validate() const;
  nlohmann::json ToJson() const;
  static HeadConfig FromJson(const nlohmann::json &j);
  bool operator==(const HeadConfig &) const = default;
};

struct HeadParameters {
  Eigen::MatrixXd w1;  // H x D
  Eigen::VectorXd b1;  // H
  Eigen::MatrixXd w2;  // K x H
  Eigen::VectorXd b2;  // K

  static HeadParameters Zeros(const HeadConfig &cfg);
  /// Uniform in +-1/sqrt(fan_in), reproducible from `seed`.
  static HeadParameters Initialize(const HeadConfig &cfg, uint64_t seed);

  bool Matches(const HeadConfig &cfg) const;
  bool AllFinite() const;
  void SetZero();
  void Scale(double alpha);
  /// this += alpha * other
  void Axpy(double alpha, const HeadParameters &other);
  double MaxAbsDiff(const HeadParameters &other) const;
  bool operator==(const HeadParameters &other) const;
};

enum class Mode { kTrain, kEval };
enum class Precision { kFull, kReduced };

std::string ToString(Precision p);
Precision ParsePrecision(const std::string &text);

/// Nearest IEEE binary16 value (round-half-even), returned as double.
double RoundToHalf(double x);
HeadParameters RoundedToHalf(const HeadParameters &p);

/// Intermediate values of one forward pass, kept for backpropagation.
struct ForwardTrace {
  Eigen::VectorXd input_mask;   // D; scaled keep-mask, ones in eval mode
  Eigen::VectorXd x_dropped;    // D
  Eigen::VectorXd hidden;       // H; tanh(W1 x_dropped + b1)
  Eigen::VectorXd hidden_mask;  // H
  Eigen::VectorXd hidden_dropped;
  Eigen::VectorXd logits;       // K
};

/// dropout -> dense + tanh -> dropout -> linear. Dropout masks are drawn from
/// `dropout_seed`; eval mode makes both dropouts the identity.
ForwardTrace ForwardWithTrace(const Eigen::VectorXd &x, const HeadParameters &p, const HeadConfig &cfg,
                              Mode mode, uint64_t dropout_seed, Precision precision = Precision::kFull);

Eigen::VectorXd Forward(const PooledFeature &x, const HeadParameters &p, const HeadConfig &cfg,
                        Mode mode = Mode::kEval, uint64_t dropout_seed = 0);

/// Binary: softmax cross-entropy with target class kNegativeClass iff negative.
/// Fine-grained: mean over the 11 classes of sigmoid binary cross-entropy.
double Loss(const Eigen::VectorXd &logits, const ConsolidatedLabel &target, const HeadConfig &cfg);

/// dLoss/dlogits.
Eigen::VectorXd LossGradient(const Eigen::VectorXd &logits, const ConsolidatedLabel &target,
                             const HeadConfig &cfg);

/// Adds `scale` * dLoss/dparams for one example into `grad` and returns the loss.
double AccumulateGradient(const Eigen::VectorXd &x, const ConsolidatedLabel &target, const HeadParameters &p,
                          const HeadConfig &cfg, Mode mode, uint64_t dropout_seed, double scale,
                          HeadParameters &grad, Precision precision = Precision::kFull);

struct Prediction {
  Eigen::VectorXd logits;
  /// Softmax (binary) or per-class sigmoid (fine-grained).
  Eigen::VectorXd probabilities;
  std::optional<bool> binary_label;   // binary task only; true = negative emotion
  std::optional<LabelSet> label_set;  // fine-grained task only; may be empty
};

Eigen::VectorXd Sigmoid(const Eigen::VectorXd &logits);
Eigen::VectorXd Softmax(const Eigen::VectorXd &logits);

/// Binary: argmax (ties go to the lower index). Fine-grained: every class whose
/// sigmoid probability exceeds `threshold`.
Prediction Decide(const Eigen::VectorXd &logits, const HeadConfig &cfg, double threshold = 0.5);

}  // namespace hotline

#endif  // HOTLINE_CLASSIFIER_H_
