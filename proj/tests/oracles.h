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


// Independent reference implementations used by the unit and acceptance tests.
// They deliberately avoid the library's metric and gradient code paths.

#ifndef HOTLINE_TESTS_ORACLES_H_
#define HOTLINE_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "hotline/classifier.h"
#include "hotline/random.h"

namespace hotline::oracle {

struct Scores {
  double precision = 0, recall = 0, f1 = 0, macro_f1 = 0, accuracy = 0;
  std::vector<double> class_precision, class_recall, class_f1;
  std::vector<long> support;
};

inline double SafeDiv(double a, double b) { return b == 0 ? 0.0 : a / b; }

/// Per-class and support-weighted scores of multi-hot predictions, computed by
/// scanning the instance matrix column by column. `accuracy` is exact-match.
inline Scores BruteForce(const std::vector<std::vector<int>> &truth, const std::vector<std::vector<int>> &pred) {
  Scores s;
  const size_t n = truth.size();
  const size_t k = n ? truth[0].size() : 0;
  long total_support = 0;
  for (size_t c = 0; c < k; ++c) {
    long tp = 0, fp = 0, fn = 0;
    for (size_t i = 0; i < n; ++i) {
      if (pred[i][c] && truth[i][c]) ++tp;
      if (pred[i][c] && !truth[i][c]) ++fp;
      if (!pred[i][c] && truth[i][c]) ++fn;
    }
    const double p = SafeDiv(tp, tp + fp), r = SafeDiv(tp, tp + fn);
    s.class_precision.push_back(p);
    s.class_recall.push_back(r);
    s.class_f1.push_back(SafeDiv(2 * p * r, p + r));
    s.support.push_back(tp + fn);
    total_support += tp + fn;
  }
  for (size_t c = 0; c < k; ++c) {
    const double w = SafeDiv(s.support[c], total_support);
    s.precision += w * s.class_precision[c];
    s.recall += w * s.class_recall[c];
    s.f1 += w * s.class_f1[c];
    s.macro_f1 += s.class_f1[c] / static_cast<double>(k);
  }
  long exact = 0;
  for (size_t i = 0; i < n; ++i) exact += truth[i] == pred[i];
  s.accuracy = SafeDiv(exact, static_cast<double>(n));
  return s;
}

/// Binary labels expressed as two one-hot columns [non-negative, negative].
inline Scores BruteForceBinary(const std::vector<bool> &truth, const std::vector<bool> &pred) {
  std::vector<std::vector<int>> t, p;
  for (size_t i = 0; i < truth.size(); ++i) {
    t.push_back({truth[i] ? 0 : 1, truth[i] ? 1 : 0});
    p.push_back({pred[i] ? 0 : 1, pred[i] ? 1 : 0});
  }
  return BruteForce(t, p);
}

/// Loss as a plain function of the parameters, mirroring the head definition.
inline double ReferenceLoss(const Eigen::VectorXd &x, const ConsolidatedLabel &y, const HeadParameters &p,
                            const Eigen::VectorXd &in_mask, const Eigen::VectorXd &hid_mask, Task task) {
  const Eigen::VectorXd h = (p.w1 * x.cwiseProduct(in_mask) + p.b1).array().tanh().matrix().cwiseProduct(hid_mask);
  const Eigen::VectorXd z = p.w2 * h + p.b2;
  if (task == Task::kBinary) {
    const double m = z.maxCoeff();
    const double lse = m + std::log((z.array() - m).exp().sum());
    return lse - z(y.negative ? 1 : 0);
  }
  double total = 0;
  for (int c = 0; c < z.size(); ++c) {
    const double t = y.labels[c] ? 1.0 : 0.0;
    // log(1 + e^z) - t z, stable form
    total += std::max(z(c), 0.0) + std::log1p(std::exp(-std::fabs(z(c)))) - t * z(c);
  }
  return total / static_cast<double>(z.size());
}

inline std::vector<double *> Entries(HeadParameters &p) {
  std::vector<double *> out;
  for (Eigen::Index i = 0; i < p.w1.size(); ++i) out.push_back(p.w1.data() + i);
  for (Eigen::Index i = 0; i < p.b1.size(); ++i) out.push_back(p.b1.data() + i);
  for (Eigen::Index i = 0; i < p.w2.size(); ++i) out.push_back(p.w2.data() + i);
  for (Eigen::Index i = 0; i < p.b2.size(); ++i) out.push_back(p.b2.data() + i);
  return out;
}

struct GradientCheck {
  double max_relative_error = 0;
  size_t entries = 0;
};

/// Compares analytic gradients from AccumulateGradient against central
/// differences of the library loss. Entries whose gradients are both below
/// `floor` in magnitude are compared against `floor` instead.
inline GradientCheck CheckGradient(const Eigen::VectorXd &x, const ConsolidatedLabel &y, const HeadParameters &p,
                                   const HeadConfig &cfg, Mode mode, uint64_t seed, double step = 1e-5,
                                   double floor = 1e-6) {
  HeadParameters analytic = HeadParameters::Zeros(cfg);
  AccumulateGradient(x, y, p, cfg, mode, seed, 1.0, analytic);
  HeadParameters probe = p;
  auto loss = [&] { return Loss(ForwardWithTrace(x, probe, cfg, mode, seed).logits, y, cfg); };
  const auto knobs = Entries(probe);
  const auto grads = Entries(analytic);
  GradientCheck out;
  for (size_t i = 0; i < knobs.size(); ++i) {
    const double saved = *knobs[i];
    *knobs[i] = saved + step;
    const double up = loss();
    *knobs[i] = saved - step;
    const double down = loss();
    *knobs[i] = saved;
    const double numeric = (up - down) / (2 * step);
    const double denom = std::max({std::fabs(numeric), std::fabs(*grads[i]), floor});
    out.max_relative_error = std::max(out.max_relative_error, std::fabs(numeric - *grads[i]) / denom);
    ++out.entries;
  }
  return out;
}

}  // namespace hotline::oracle

#endif  // HOTLINE_TESTS_ORACLES_H_
