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


#include <gtest/gtest.h>

#include <cmath>

#include "hotline/classifier.h"
#include "hotline/error.h"
#include "oracles.h"

namespace hotline {
namespace {

HeadConfig Config(int d, int h, Task task, double dropout = 0.1) {
  HeadConfig c;
  c.input_dim = d;
  c.hidden_dim = h;
  c.task = task;
  c.dropout_p = dropout;
  return c;
}

Eigen::VectorXd RandomInput(int d, Rng &rng) {
  Eigen::VectorXd x(d);
  for (int i = 0; i < d; ++i) x(i) = rng.Uniform(-0.99, 0.99);
  return x;
}

ConsolidatedLabel RandomTarget(Rng &rng) {
  ConsolidatedLabel y;
  for (int c = 0; c < kNumLabels; ++c) y.labels[c] = rng.Bernoulli(0.2);
  y.negative = y.labels.any() || rng.Bernoulli(0.5);
  return y;
}

TEST(Forward, ZeroParametersGiveZeroLogits) {
  for (Task t : {Task::kBinary, Task::kFineGrained}) {
    const HeadConfig cfg = Config(5, 4, t);
    const auto z = ForwardWithTrace(Eigen::VectorXd::Ones(5), HeadParameters::Zeros(cfg), cfg, Mode::kEval, 0).logits;
    EXPECT_EQ(z, Eigen::VectorXd::Zero(cfg.NumOutputs()));
  }
}

TEST(Forward, EvalEqualsTrainWithoutDropout) {
  Rng rng(1);
  const HeadConfig cfg = Config(6, 5, Task::kFineGrained, 0.0);
  const HeadParameters p = HeadParameters::Initialize(cfg, 3);
  const Eigen::VectorXd x = RandomInput(6, rng);
  EXPECT_EQ(ForwardWithTrace(x, p, cfg, Mode::kEval, 0).logits, ForwardWithTrace(x, p, cfg, Mode::kTrain, 77).logits);
}

TEST(Forward, HandEvaluatedScalarHead) {
  HeadConfig cfg = Config(1, 1, Task::kFineGrained, 0.0);
  HeadParameters p = HeadParameters::Zeros(cfg);
  p.w1(0, 0) = 1.0;
  p.w2.setZero();
  p.w2(0, 0) = 2.0;
  p.b2(0) = 0.5;
  EXPECT_DOUBLE_EQ(ForwardWithTrace(Eigen::VectorXd::Zero(1), p, cfg, Mode::kEval, 0).logits(0), 0.5);
}

TEST(Forward, DropoutMasksAreInvertedAndSeeded) {
  const HeadConfig cfg = Config(200, 50, Task::kBinary, 0.25);
  const HeadParameters p = HeadParameters::Initialize(cfg, 1);
  const Eigen::VectorXd x = Eigen::VectorXd::Ones(200);
  const ForwardTrace a = ForwardWithTrace(x, p, cfg, Mode::kTrain, 9);
  const ForwardTrace b = ForwardWithTrace(x, p, cfg, Mode::kTrain, 9);
  EXPECT_EQ(a.logits, b.logits);
  int dropped = 0;
  for (Eigen::Index i = 0; i < a.input_mask.size(); ++i) {
    const double m = a.input_mask(i);
    EXPECT_TRUE(m == 0.0 || std::fabs(m - 1.0 / 0.75) < 1e-15);
    dropped += m == 0.0;
  }
  EXPECT_GT(dropped, 20);
  EXPECT_LT(dropped, 80);
  EXPECT_NE(ForwardWithTrace(x, p, cfg, Mode::kTrain, 10).logits, a.logits);
}

TEST(Initialize, UniformWithinFanInBoundAndReproducible) {
  const HeadConfig cfg = Config(16, 9, Task::kFineGrained);
  const HeadParameters a = HeadParameters::Initialize(cfg, 5);
  EXPECT_TRUE(a == HeadParameters::Initialize(cfg, 5));
  EXPECT_FALSE(a == HeadParameters::Initialize(cfg, 6));
  EXPECT_LE(a.w1.cwiseAbs().maxCoeff(), 1.0 / std::sqrt(16.0));
  EXPECT_LE(a.w2.cwiseAbs().maxCoeff(), 1.0 / std::sqrt(9.0));
  EXPECT_TRUE(a.Matches(cfg));
  EXPECT_EQ(a.w2.rows(), kNumLabels);
}

TEST(Loss, BinaryUniformLogits) {
  const HeadConfig cfg = Config(1, 1, Task::kBinary);
  ConsolidatedLabel y;
  EXPECT_NEAR(Loss(Eigen::VectorXd::Zero(2), y, cfg), std::log(2.0), 1e-12);
}

TEST(Loss, FineZeroLogitsEmptyTarget) {
  const HeadConfig cfg = Config(1, 1, Task::kFineGrained);
  EXPECT_NEAR(Loss(Eigen::VectorXd::Zero(kNumLabels), ConsolidatedLabel{}, cfg), std::log(2.0), 1e-12);
}

TEST(Loss, MatchesReferenceFormula) {
  Rng rng(4);
  for (Task t : {Task::kBinary, Task::kFineGrained}) {
    for (int trial = 0; trial < 20; ++trial) {
      const HeadConfig cfg = Config(7, 6, t, 0.3);
      const HeadParameters p = HeadParameters::Initialize(cfg, trial);
      const Eigen::VectorXd x = RandomInput(7, rng);
      const ConsolidatedLabel y = RandomTarget(rng);
      const ForwardTrace tr = ForwardWithTrace(x, p, cfg, Mode::kTrain, trial);
      EXPECT_NEAR(Loss(tr.logits, y, cfg), oracle::ReferenceLoss(x, y, p, tr.input_mask, tr.hidden_mask, t), 1e-12);
    }
  }
}

TEST(Loss, LargeLogitsStayFinite) {
  const HeadConfig cfg = Config(1, 1, Task::kFineGrained);
  ConsolidatedLabel y;
  y.labels.set(0);
  Eigen::VectorXd z = Eigen::VectorXd::Constant(kNumLabels, -800.0);
  EXPECT_TRUE(std::isfinite(Loss(z, y, cfg)));
  EXPECT_TRUE(LossGradient(z, y, cfg).allFinite());
}

TEST(Gradient, MatchesCentralDifferences) {
  Rng rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    for (Task t : {Task::kBinary, Task::kFineGrained}) {
      const int d = 1 + static_cast<int>(rng.UniformIndex(8));
      const int h = 1 + static_cast<int>(rng.UniformIndex(8));
      const HeadConfig cfg = Config(d, h, t, trial % 2 ? 0.2 : 0.0);
      HeadParameters p = HeadParameters::Initialize(cfg, rng.NextU64());
      p.Scale(1.0 + 2.0 * rng.Uniform());
      const auto check = oracle::CheckGradient(RandomInput(d, rng), RandomTarget(rng), p, cfg,
                                               trial % 3 ? Mode::kTrain : Mode::kEval, rng.NextU64());
      EXPECT_LT(check.max_relative_error, 1e-4) << "trial " << trial << " task " << ToString(t);
    }
  }
}

TEST(Gradient, ScaleAccumulates) {
  const HeadConfig cfg = Config(3, 2, Task::kBinary, 0.0);
  const HeadParameters p = HeadParameters::Initialize(cfg, 8);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(3, 0.4);
  ConsolidatedLabel y;
  y.negative = true;
  HeadParameters once = HeadParameters::Zeros(cfg), twice = HeadParameters::Zeros(cfg);
  AccumulateGradient(x, y, p, cfg, Mode::kEval, 0, 2.0, once);
  AccumulateGradient(x, y, p, cfg, Mode::kEval, 0, 1.0, twice);
  AccumulateGradient(x, y, p, cfg, Mode::kEval, 0, 1.0, twice);
  EXPECT_LT(once.MaxAbsDiff(twice), 1e-15);
}

TEST(Decide, FineZeroLogitsPredictNothing) {
  const HeadConfig cfg = Config(1, 1, Task::kFineGrained);
  const Prediction p = Decide(Eigen::VectorXd::Zero(kNumLabels), cfg, 0.5);
  ASSERT_TRUE(p.label_set.has_value());
  EXPECT_TRUE(p.label_set->none());
  EXPECT_FALSE(p.binary_label.has_value());
  for (int c = 0; c < kNumLabels; ++c) EXPECT_DOUBLE_EQ(p.probabilities(c), 0.5);
}

TEST(Decide, BinaryArgmax) {
  const HeadConfig cfg = Config(1, 1, Task::kBinary);
  Eigen::VectorXd z(2);
  z << 1.0, -1.0;
  EXPECT_FALSE(*Decide(z, cfg).binary_label);
  z << -1.0, 1.0;
  EXPECT_TRUE(*Decide(z, cfg).binary_label);
  z << 0.0, 0.0;
  EXPECT_FALSE(*Decide(z, cfg).binary_label);
}

TEST(Decide, SinglePositiveLogitGivesSingleton) {
  const HeadConfig cfg = Config(1, 1, Task::kFineGrained);
  Eigen::VectorXd z = Eigen::VectorXd::Constant(kNumLabels, -2.0);
  z(9) = 3.0;
  EXPECT_EQ(*Decide(z, cfg).label_set, MakeLabelSet({10}));
}

TEST(Decide, ThresholdMustBeInsideUnitInterval) {
  const HeadConfig cfg = Config(1, 1, Task::kFineGrained);
  EXPECT_THROW(Decide(Eigen::VectorXd::Zero(kNumLabels), cfg, 0.0), Error);
  EXPECT_THROW(Decide(Eigen::VectorXd::Zero(kNumLabels), cfg, 1.0), Error);
}

TEST(DecideProperty, MonotoneInThreshold) {
  Rng rng(6);
  const HeadConfig cfg = Config(1, 1, Task::kFineGrained);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::VectorXd z(kNumLabels);
    for (int c = 0; c < kNumLabels; ++c) z(c) = rng.Uniform(-4, 4);
    const double lo = rng.Uniform(0.05, 0.5), hi = rng.Uniform(0.5, 0.95);
    const LabelSet a = *Decide(z, cfg, lo).label_set, b = *Decide(z, cfg, hi).label_set;
    EXPECT_EQ((b & ~a).count(), 0u);
  }
}

TEST(HalfPrecision, RoundsLikeBinary16) {
  EXPECT_EQ(RoundToHalf(1.0), 1.0);
  EXPECT_EQ(RoundToHalf(0.1), 0.0999755859375);
  EXPECT_EQ(RoundToHalf(65504.0), 65504.0);
  EXPECT_TRUE(std::isinf(RoundToHalf(70000.0)));
  EXPECT_EQ(RoundToHalf(1e-9), 0.0);
  EXPECT_EQ(RoundToHalf(-2.0), -2.0);
  EXPECT_EQ(RoundToHalf(1.0 + 1.0 / 2048), 1.0);  // tie to even
}

TEST(HeadConfig, JsonRoundTripAndValidation) {
  const HeadConfig cfg = Config(12, 7, Task::kFineGrained, 0.3);
  EXPECT_EQ(HeadConfig::FromJson(cfg.ToJson()), cfg);
  EXPECT_THROW(Config(12, 7, Task::kBinary, 1.0).Validate(), Error);
  EXPECT_THROW(Config(0, 7, Task::kBinary).Validate(), Error);
  EXPECT_EQ(ParseTask("fine"), Task::kFineGrained);
  EXPECT_THROW(ParseTask("ternary"), Error);
}

}  // namespace
}  // namespace hotline
