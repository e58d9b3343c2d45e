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

#include "hotline/training.h"

#include <algorithm>
#include <chrono>
#include <iterator>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "hotline/error.h"
#include "hotline/random.h"

namespace hotline {

using nlohmann::json;

namespace {

constexpr uint64_t kInitTag = 0x696e6974;     // "init"
constexpr uint64_t kShuffleTag = 0x73687566;  // "shuf"
constexpr uint64_t kDropoutTag = 0x64726f70;  // "drop"

// Static loss scale for reduced-precision gradients.
constexpr double kLossScale = 1024.0;

class Optimizer {
 public:
  Optimizer(const TrainConfig &cfg, const HeadParameters &shape) : cfg_(cfg), m_(shape), v_(shape) {
    m_.SetZero();
    v_.SetZero();
  }

  void Step(HeadParameters &params, const HeadParameters &grad) {
    if (cfg_.optimizer == OptimizerKind::kSgd) {
      params.Axpy(-cfg_.learning_rate, grad);
      return;
    }
    ++t_;
    const double b1 = cfg_.adam_beta1, b2 = cfg_.adam_beta2;
    const double c1 = 1.0 - std::pow(b1, t_), c2 = 1.0 - std::pow(b2, t_);
    auto update = [&](auto &p, auto &m, auto &v, const auto &g) {
      m = b1 * m + (1.0 - b1) * g;
      v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
      p.array() -= cfg_.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + cfg_.adam_epsilon);
    };
    update(params.w1, m_.w1, v_.w1, grad.w1);
    update(params.b1, m_.b1, v_.b1, grad.b1);
    update(params.w2, m_.w2, v_.w2, grad.w2);
    update(params.b2, m_.b2, v_.b2, grad.b2);
  }

 private:
  const TrainConfig &cfg_;
  HeadParameters m_, v_;
  int t_ = 0;
};

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

std::vector<std::string> CallIds(std::span<const Segment> segs) {
  std::set<std::string> ids;
  for (const auto &s : segs) ids.insert(s.call_id);
  return {ids.begin(), ids.end()};
}

}  // namespace

std::string ToString(OptimizerKind k) { return k == OptimizerKind::kAdam ? "adam" : "sgd"; }

OptimizerKind ParseOptimizer(const std::string &text) {
  if (text == "adam") return OptimizerKind::kAdam;
  if (text == "sgd") return OptimizerKind::kSgd;
  throw Error(MakeString("unknown optimizer '", text, "' (expected adam or sgd)"));
}

void TrainConfig::Validate() const {
  HOTLINE_ENFORCE(batch_size >= 1, "batch_size must be >= 1");
  HOTLINE_ENFORCE(grad_accum_steps >= 1, "grad_accum_steps must be >= 1");
  HOTLINE_ENFORCE(epochs >= 1, "epochs must be >= 1");
  HOTLINE_ENFORCE(learning_rate >= 0.0 && std::isfinite(learning_rate), "learning_rate must be finite and >= 0");
  HOTLINE_ENFORCE(threshold > 0.0 && threshold < 1.0, "threshold must lie in (0, 1)");
  HOTLINE_ENFORCE(hidden_dim >= 0, "hidden_dim must be >= 0");
  HOTLINE_ENFORCE(dropout_p >= 0.0 && dropout_p < 1.0, "dropout_p must lie in [0, 1)");
}

HeadConfig TrainConfig::MakeHeadConfig(int input_dim) const {
  HeadConfig h;
  h.input_dim = input_dim;
  h.hidden_dim = hidden_dim > 0 ? hidden_dim : input_dim;
  h.dropout_p = dropout_p;
  h.task = task;
  h.Validate();
  return h;
}

json TrainConfig::ToJson() const {
  return {{"task", ToString(task)},
          {"batch_size", batch_size},
          {"learning_rate", learning_rate},
          {"grad_accum_steps", grad_accum_steps},
          {"epochs", epochs},
          {"precision", ToString(precision)},
          {"seed", seed},
          {"freeze_encoder", freeze_encoder},
          {"threshold", threshold},
          {"optimizer", ToString(optimizer)},
          {"hidden_dim", hidden_dim},
          {"dropout_p", dropout_p}};
}

TrainConfig TrainConfig::FromJson(const json &j) {
  TrainConfig c;
  c.task = ParseTask(j.value("task", ToString(c.task)));
  c.batch_size = j.value("batch_size", c.batch_size);
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.grad_accum_steps = j.value("grad_accum_steps", c.grad_accum_steps);
  c.epochs = j.value("epochs", c.epochs);
  c.precision = ParsePrecision(j.value("precision", ToString(c.precision)));
  c.seed = j.value("seed", c.seed);
  c.freeze_encoder = j.value("freeze_encoder", c.freeze_encoder);
  c.threshold = j.value("threshold", c.threshold);
  c.optimizer = ParseOptimizer(j.value("optimizer", ToString(c.optimizer)));
  c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
  c.dropout_p = j.value("dropout_p", c.dropout_p);
  c.Validate();
  return c;
}

std::vector<Example> MakeExamples(std::span<const Segment> segments, FeatureExtractor &extractor) {
  std::vector<Example> out;
  out.reserve(segments.size());
  for (const auto &s : segments) {
    HOTLINE_ENFORCE(s.consolidated.has_value(), "segment '", s.segment_id, "' has not been consolidated");
    out.push_back({s.call_id, s.segment_id, extractor.Extract(s).vector, *s.consolidated});
  }
  return out;
}

json RunRecord::ToJson() const {
  return {{"fold", fold},
          {"epoch_losses", epoch_losses},
          {"validation", validation.ToJson()},
          {"artifact_path", artifact_path},
          {"wall_seconds", wall_seconds},
          {"train_calls", train_calls},
          {"val_calls", val_calls}};
}

HeadParameters TrainHead(std::span<const Example> train, const HeadConfig &head, const TrainConfig &cfg,
                         HeadParameters params, std::vector<double> *epoch_losses) {
  cfg.Validate();
  head.Validate();
  HOTLINE_ENFORCE(!train.empty(), "cannot train on an empty training set");
  HOTLINE_ENFORCE(params.Matches(head), "initial parameters do not match the head config");
  const bool reduced = cfg.precision == Precision::kReduced;

  Optimizer optimizer(cfg, params);
  HeadParameters window_grad = params, micro_grad = params;
  window_grad.SetZero();
  std::vector<size_t> order(train.size());
  uint64_t sample_counter = 0;
  double loss_scale = reduced ? kLossScale : 1.0;
  if (epoch_losses) epoch_losses->clear();

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), size_t{0});
    Rng shuffle(DeriveSeed(cfg.seed, kShuffleTag, static_cast<uint64_t>(epoch)));
    shuffle.Shuffle(std::span<size_t>(order));

    double epoch_loss = 0.0;
    int micro_in_window = 0;
    const size_t n = order.size();
    for (size_t start = 0; start < n; start += cfg.batch_size) {
      const size_t stop = std::min(n, start + static_cast<size_t>(cfg.batch_size));
      const double inv = 1.0 / static_cast<double>(stop - start);
      const HeadParameters working = reduced ? RoundedToHalf(params) : HeadParameters{};
      const HeadParameters &forward_params = reduced ? working : params;

      micro_grad.SetZero();
      for (size_t k = start; k < stop; ++k) {
        const Example &ex = train[order[k]];
        const uint64_t dropout_seed = DeriveSeed(cfg.seed, kDropoutTag, sample_counter++);
        epoch_loss += AccumulateGradient(ex.x, ex.y, forward_params, head, Mode::kTrain, dropout_seed,
                                         inv * loss_scale, micro_grad, cfg.precision);
      }
      if (reduced) {
        micro_grad = RoundedToHalf(micro_grad);
        micro_grad.Scale(1.0 / loss_scale);
      }
      window_grad.Axpy(1.0, micro_grad);
      ++micro_in_window;

      if (micro_in_window == cfg.grad_accum_steps || stop == n) {
        window_grad.Scale(1.0 / micro_in_window);
        if (window_grad.AllFinite()) {
          optimizer.Step(params, window_grad);
        } else {
          // fp16 overflow: drop the step and back off the loss scale.
          loss_scale = std::max(1.0, loss_scale / 2.0);
        }
        window_grad.SetZero();
        micro_in_window = 0;
      }
    }
    if (epoch_losses) epoch_losses->push_back(epoch_loss / static_cast<double>(n));
  }
  return params;
}

std::vector<Prediction> Predict(const Model &model, std::span<const Example> examples) {
  std::vector<Prediction> out;
  out.reserve(examples.size());
  for (const auto &ex : examples) {
    const Eigen::VectorXd logits = Forward(PooledFeature{ex.x}, model.params, model.head);
    out.push_back(Decide(logits, model.head, model.threshold));
  }
  return out;
}

MetricsReport EvaluateExamples(const Model &model, std::span<const Example> examples) {
  if (examples.empty()) {
    MetricsReport empty;
    empty.task = model.head.task;
    return empty;
  }
  const auto preds = Predict(model, examples);
  std::vector<ConsolidatedLabel> truths;
  truths.reserve(examples.size());
  for (const auto &ex : examples) truths.push_back(ex.y);
  return Evaluate(model.head.task, preds, truths, model.taxonomy);
}

TrainResult TrainOne(std::span<const Segment> train, std::span<const Segment> val, FeatureExtractor &extractor,
                     const TrainConfig &cfg, const LabelTaxonomy &taxonomy, std::string fold) {
  const auto started = std::chrono::steady_clock::now();
  cfg.Validate();
  HOTLINE_ENFORCE(!train.empty(), "cannot train on an empty training set");
  HOTLINE_ENFORCE(cfg.freeze_encoder, "encoder '", extractor.spec().encoder_id,
                  "' does not support fine-tuning; set freeze_encoder=true");

  TrainResult result;
  result.record.fold = std::move(fold);
  result.record.train_calls = CallIds(train);
  result.record.val_calls = CallIds(val);
  {
    std::vector<std::string> overlap;
    std::set_intersection(result.record.train_calls.begin(), result.record.train_calls.end(),
                          result.record.val_calls.begin(), result.record.val_calls.end(),
                          std::back_inserter(overlap));
    HOTLINE_ENFORCE(overlap.empty(), "leakage: call '", overlap.empty() ? "" : overlap.front(),
                    "' appears in both training and validation data");
  }

  const auto train_examples = MakeExamples(train, extractor);
  const auto val_examples = MakeExamples(val, extractor);

  Model &model = result.model;
  model.encoder = extractor.spec();
  model.taxonomy = taxonomy;
  model.threshold = cfg.threshold;
  model.head = cfg.MakeHeadConfig(static_cast<int>(train_examples.front().x.size()));
  model.params = TrainHead(train_examples, model.head, cfg,
                           HeadParameters::Initialize(model.head, DeriveSeed(cfg.seed, kInitTag)),
                           &result.record.epoch_losses);
  result.record.validation = EvaluateExamples(model, val_examples);
  result.record.wall_seconds = Seconds(started);
  return result;
}

json CvResult::ToJson() const {
  json j = {{"folds", runs.size()}, {"mean_weighted_f1", mean_f1}, {"std_weighted_f1", std_f1}};
  json rs = json::array();
  for (const auto &r : runs) rs.push_back(r.ToJson());
  j["runs"] = rs;
  return j;
}

CvResult CrossValidate(const SplitPlan &plan, std::span<const Call> calls, FeatureExtractor &extractor,
                       const TrainConfig &cfg, const LabelTaxonomy &taxonomy) {
  HOTLINE_ENFORCE(plan.num_folds >= 2, "split plan has no cross-validation folds");
  CvResult cv;
  for (int f = 0; f < plan.num_folds; ++f) {
    const auto train = Materialize(plan, calls, SplitRole::FoldTrain(f));
    const auto val = Materialize(plan, calls, SplitRole::FoldVal(f));
    cv.runs.push_back(TrainOne(train, val, extractor, cfg, taxonomy, std::to_string(f)).record);
  }
  double sum = 0.0;
  for (const auto &r : cv.runs) sum += r.validation.f1;
  cv.mean_f1 = sum / static_cast<double>(cv.runs.size());
  double ss = 0.0;
  for (const auto &r : cv.runs) ss += (r.validation.f1 - cv.mean_f1) * (r.validation.f1 - cv.mean_f1);
  cv.std_f1 = cv.runs.size() > 1 ? std::sqrt(ss / static_cast<double>(cv.runs.size() - 1)) : 0.0;
  return cv;
}

FinalResult Finalize(const SplitPlan &plan, std::span<const Call> calls, FeatureExtractor &extractor,
                     const TrainConfig &cfg, const LabelTaxonomy &taxonomy,
                     const std::filesystem::path &artifact_path) {
  const auto train = Materialize(plan, calls, SplitRole::Train());
  FinalResult out;
  out.test_segments = Materialize(plan, calls, SplitRole::Test());
  TrainResult trained = TrainOne(train, out.test_segments, extractor, cfg, taxonomy, "final");
  out.model = std::move(trained.model);
  out.record = std::move(trained.record);

  const auto test_examples = MakeExamples(out.test_segments, extractor);
  out.test_predictions = Predict(out.model, test_examples);
  out.test_report = out.record.validation;
  if (!artifact_path.empty()) {
    SaveModel(artifact_path, out.model);
    out.record.artifact_path = artifact_path.string();
  }
  return out;
}

void AppendRunLog(const std::filesystem::path &path, const RunRecord &record) {
  std::ofstream out(path, std::ios::app);
  HOTLINE_ENFORCE(out, "cannot append to run log '", path.string(), "'");
  out << record.ToJson().dump() << '\n';
}

}  // namespace hotline
