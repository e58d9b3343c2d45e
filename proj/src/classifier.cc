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

#include "hotline/classifier.h"

#include <cmath>

#include "hotline/error.h"
#include "hotline/random.h"

namespace hotline {

using nlohmann::json;

std::string ToString(Task task) { return task == Task::kBinary ? "binary" : "fine_grained"; }

Task ParseTask(const std::string &text) {
  if (text == "binary") return Task::kBinary;
  if (text == "fine" || text == "fine_grained") return Task::kFineGrained;
  throw Error(MakeString("unknown task '", text, "' (expected binary or fine)"));
}

std::string ToString(Precision p) { return p == Precision::kFull ? "full" : "reduced"; }

Precision ParsePrecision(const std::string &text) {
  if (text == "full" || text == "fp32" || text == "fp64") return Precision::kFull;
  if (text == "reduced" || text == "fp16") return Precision::kReduced;
  throw Error(MakeString("unknown precision '", text, "' (expected full or reduced)"));
}

void HeadConfig::Validate() const {
  HOTLINE_ENFORCE(input_dim >= 1 && hidden_dim >= 1, "head dims must be >= 1 (input ", input_dim, ", hidden ",
                  hidden_dim, ")");
  HOTLINE_ENFORCE(dropout_p >= 0.0 && dropout_p < 1.0, "dropout_p must lie in [0, 1), got ", dropout_p);
}

json HeadConfig::ToJson() const {
  return {{"input_dim", input_dim},
          {"hidden_dim", hidden_dim},
          {"dropout_p", dropout_p},
          {"task", ToString(task)},
          {"num_outputs", NumOutputs()}};
}

HeadConfig HeadConfig::FromJson(const json &j) {
  HeadConfig c;
  c.input_dim = j.at("input_dim").get<int>();
  c.hidden_dim = j.at("hidden_dim").get<int>();
  c.dropout_p = j.at("dropout_p").get<double>();
  c.task = ParseTask(j.at("task").get<std::string>());
  HOTLINE_ENFORCE(j.value("num_outputs", c.NumOutputs()) == c.NumOutputs(), "num_outputs disagrees with task");
  c.Validate();
  return c;
}

HeadParameters HeadParameters::Zeros(const HeadConfig &cfg) {
  cfg.Validate();
  HeadParameters p;
  p.w1 = Eigen::MatrixXd::Zero(cfg.hidden_dim, cfg.input_dim);
  p.b1 = Eigen::VectorXd::Zero(cfg.hidden_dim);
  p.w2 = Eigen::MatrixXd::Zero(cfg.NumOutputs(), cfg.hidden_dim);
  p.b2 = Eigen::VectorXd::Zero(cfg.NumOutputs());
  return p;
}

HeadParameters HeadParameters::Initialize(const HeadConfig &cfg, uint64_t seed) {
  HeadParameters p = Zeros(cfg);
  Rng rng(seed);
  auto fill = [&](auto &m, int fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.Uniform(-bound, bound);
  };
  fill(p.w1, cfg.input_dim);
  fill(p.b1, cfg.input_dim);
  fill(p.w2, cfg.hidden_dim);
  fill(p.b2, cfg.hidden_dim);
  return p;
}

bool HeadParameters::Matches(const HeadConfig &cfg) const {
  return w1.rows() == cfg.hidden_dim && w1.cols() == cfg.input_dim && b1.size() == cfg.hidden_dim &&
         w2.rows() == cfg.NumOutputs() && w2.cols() == cfg.hidden_dim && b2.size() == cfg.NumOutputs();
}

bool HeadParameters::AllFinite() const {
  return w1.allFinite() && b1.allFinite() && w2.allFinite() && b2.allFinite();
}

void HeadParameters::SetZero() {
  w1.setZero();
  b1.setZero();
  w2.setZero();
  b2.setZero();
}

void HeadParameters::Scale(double alpha) {
  w1 *= alpha;
  b1 *= alpha;
  w2 *= alpha;
  b2 *= alpha;
}

void HeadParameters::Axpy(double alpha, const HeadParameters &other) {
  w1 += alpha * other.w1;
  b1 += alpha * other.b1;
  w2 += alpha * other.w2;
  b2 += alpha * other.b2;
}

double HeadParameters::MaxAbsDiff(const HeadParameters &other) const {
  return std::max({(w1 - other.w1).cwiseAbs().maxCoeff(), (b1 - other.b1).cwiseAbs().maxCoeff(),
                   (w2 - other.w2).cwiseAbs().maxCoeff(), (b2 - other.b2).cwiseAbs().maxCoeff()});
}

bool HeadParameters::operator==(const HeadParameters &o) const {
  return w1.rows() == o.w1.rows() && w1.cols() == o.w1.cols() && w2.rows() == o.w2.rows() &&
         w2.cols() == o.w2.cols() && w1 == o.w1 && b1 == o.b1 && w2 == o.w2 && b2 == o.b2;
}

double RoundToHalf(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  const double ax = std::fabs(x);
  int e = 0;
  std::frexp(ax, &e);  // ax = f * 2^e, f in [0.5, 1)
  const int quantum = std::max(e - 1, -14) - 10;
  const double r = std::ldexp(std::nearbyint(std::ldexp(ax, -quantum)), quantum);
  const double out = r > 65504.0 ? HUGE_VAL : r;
  return std::copysign(out, x);
}

HeadParameters RoundedToHalf(const HeadParameters &p) {
  HeadParameters q = p;
  auto round = [](auto &m) { m = m.unaryExpr([](double v) { return RoundToHalf(v); }); };
  round(q.w1);
  round(q.b1);
  round(q.w2);
  round(q.b2);
  return q;
}

namespace {

Eigen::VectorXd DropoutMask(Eigen::Index n, double p, Rng &rng) {
  Eigen::VectorXd mask = Eigen::VectorXd::Ones(n);
  if (p <= 0.0) return mask;
  const double keep_scale = 1.0 / (1.0 - p);
  for (Eigen::Index i = 0; i < n; ++i) mask[i] = rng.Uniform() < p ? 0.0 : keep_scale;
  return mask;
}

void RoundInPlace(Eigen::VectorXd &v) { v = v.unaryExpr([](double x) { return RoundToHalf(x); }); }

double Softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::fabs(z))); }

}  // namespace

ForwardTrace ForwardWithTrace(const Eigen::VectorXd &x, const HeadParameters &p, const HeadConfig &cfg,
                              Mode mode, uint64_t dropout_seed, Precision precision) {
  HOTLINE_ENFORCE(p.Matches(cfg), "head parameters do not match the head config");
  HOTLINE_ENFORCE(x.size() == cfg.input_dim, "feature has ", x.size(), " dims, head expects ", cfg.input_dim);
  ForwardTrace t;
  Rng rng(dropout_seed);
  const bool train = mode == Mode::kTrain;
  t.input_mask = train ? DropoutMask(cfg.input_dim, cfg.dropout_p, rng) : Eigen::VectorXd::Ones(cfg.input_dim);
  t.x_dropped = x.cwiseProduct(t.input_mask);
  if (precision == Precision::kReduced) RoundInPlace(t.x_dropped);
  t.hidden = (p.w1 * t.x_dropped + p.b1).array().tanh();
  if (precision == Precision::kReduced) RoundInPlace(t.hidden);
  t.hidden_mask = train ? DropoutMask(cfg.hidden_dim, cfg.dropout_p, rng) : Eigen::VectorXd::Ones(cfg.hidden_dim);
  t.hidden_dropped = t.hidden.cwiseProduct(t.hidden_mask);
  t.logits = p.w2 * t.hidden_dropped + p.b2;
  if (precision == Precision::kReduced) RoundInPlace(t.logits);
  return t;
}

Eigen::VectorXd Forward(const PooledFeature &x, const HeadParameters &p, const HeadConfig &cfg, Mode mode,
                        uint64_t dropout_seed) {
  return ForwardWithTrace(x.vector, p, cfg, mode, dropout_seed).logits;
}

Eigen::VectorXd Sigmoid(const Eigen::VectorXd &logits) {
  return logits.unaryExpr([](double z) {
    if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
  });
}

Eigen::VectorXd Softmax(const Eigen::VectorXd &logits) {
  const Eigen::ArrayXd e = (logits.array() - logits.maxCoeff()).exp();
  return (e / e.sum()).matrix();
}

double Loss(const Eigen::VectorXd &logits, const ConsolidatedLabel &target, const HeadConfig &cfg) {
  HOTLINE_ENFORCE(logits.size() == cfg.NumOutputs(), "expected ", cfg.NumOutputs(), " logits, got ", logits.size());
  if (cfg.task == Task::kBinary) {
    const double m = logits.maxCoeff();
    const double lse = m + std::log((logits.array() - m).exp().sum());
    return lse - logits[target.negative ? kNegativeClass : 1 - kNegativeClass];
  }
  double total = 0.0;
  for (int i = 0; i < kNumLabels; ++i) {
    const double z = logits[i];
    const double y = target.labels.test(i) ? 1.0 : 0.0;
    total += Softplus(z) - z * y;
  }
  return total / kNumLabels;
}

Eigen::VectorXd LossGradient(const Eigen::VectorXd &logits, const ConsolidatedLabel &target,
                             const HeadConfig &cfg) {
  HOTLINE_ENFORCE(logits.size() == cfg.NumOutputs(), "expected ", cfg.NumOutputs(), " logits, got ", logits.size());
  if (cfg.task == Task::kBinary) {
    Eigen::VectorXd g = Softmax(logits);
    g[target.negative ? kNegativeClass : 1 - kNegativeClass] -= 1.0;
    return g;
  }
  Eigen::VectorXd g = Sigmoid(logits);
  for (int i = 0; i < kNumLabels; ++i)
    if (target.labels.test(i)) g[i] -= 1.0;
  return g / kNumLabels;
}

double AccumulateGradient(const Eigen::VectorXd &x, const ConsolidatedLabel &target, const HeadParameters &p,
                          const HeadConfig &cfg, Mode mode, uint64_t dropout_seed, double scale,
                          HeadParameters &grad, Precision precision) {
  const ForwardTrace t = ForwardWithTrace(x, p, cfg, mode, dropout_seed, precision);
  const Eigen::VectorXd g_logits = scale * LossGradient(t.logits, target, cfg);
  grad.w2.noalias() += g_logits * t.hidden_dropped.transpose();
  grad.b2 += g_logits;
  const Eigen::VectorXd g_hidden = (p.w2.transpose() * g_logits).cwiseProduct(t.hidden_mask);
  const Eigen::VectorXd g_pre = g_hidden.array() * (1.0 - t.hidden.array().square());
  grad.w1.noalias() += g_pre * t.x_dropped.transpose();
  grad.b1 += g_pre;
  return Loss(t.logits, target, cfg);
}

Prediction Decide(const Eigen::VectorXd &logits, const HeadConfig &cfg, double threshold) {
  HOTLINE_ENFORCE(threshold > 0.0 && threshold < 1.0, "threshold must lie in (0, 1), got ", threshold);
  HOTLINE_ENFORCE(logits.size() == cfg.NumOutputs(), "expected ", cfg.NumOutputs(), " logits, got ", logits.size());
  Prediction p;
  p.logits = logits;
  if (cfg.task == Task::kBinary) {
    p.probabilities = Softmax(logits);
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < logits.size(); ++i)
      if (logits[i] > logits[best]) best = i;
    p.binary_label = best == kNegativeClass;
  } else {
    p.probabilities = Sigmoid(logits);
    LabelSet set;
    for (int i = 0; i < kNumLabels; ++i)
      if (p.probabilities[i] > threshold) set.set(i);
    p.label_set = set;
  }
  return p;
}

}  // namespace hotline
