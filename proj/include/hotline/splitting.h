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

#ifndef HOTLINE_SPLITTING_H_
#define HOTLINE_SPLITTING_H_

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hotline/corpus.h"
#include "json.hpp"

namespace hotline {

struct SplitRatio {
  int train = 4;
  int test = 1;

  /// Parses "4:1".
  static SplitRatio Parse(std::string_view text);
  std::string ToString() const;
  bool operator==(const SplitRatio &) const = default;
};

/// Call-level assignment of a corpus to train/test and to cross-validation folds.
struct SplitPlan {
  uint64_t seed = 0;
  SplitRatio ratio;
  std::set<std::string> train_calls;
  std::set<std::string> test_calls;
  /// Defined over train_calls only; empty until AssignFolds.
  std::map<std::string, int> folds;
  int num_folds = 0;
  uint64_t fold_seed = 0;

  std::set<std::string> FoldCalls(int fold) const;

  nlohmann::json ToJson() const;
  static SplitPlan FromJson(const nlohmann::json &j);

  bool operator==(const SplitPlan &) const = default;
};

/// Selects one side of a plan: "train", "test", "fold-<f>-train", "fold-<f>-val".
struct SplitRole {
  enum class Kind { kTrain, kTest, kFoldTrain, kFoldVal };
  Kind kind = Kind::kTrain;
  int fold = 0;

  static SplitRole Train() { return {Kind::kTrain, 0}; }
  static SplitRole Test() { return {Kind::kTest, 0}; }
  static SplitRole FoldTrain(int f) { return {Kind::kFoldTrain, f}; }
  static SplitRole FoldVal(int f) { return {Kind::kFoldVal, f}; }
  static SplitRole Parse(std::string_view text);
  std::string ToString() const;
};

/// Shuffles the sorted unique call ids with `seed` and takes a prefix as test.
/// |test| = max(1, round(n * test / (train + test))).
SplitPlan HoldoutSplit(std::span<const std::string> call_ids, SplitRatio ratio, uint64_t seed);
SplitPlan HoldoutSplit(std::span<const Call> calls, SplitRatio ratio, uint64_t seed);

/// Round-robin over a seeded shuffle of the train calls; fold sizes differ by at most one.
SplitPlan AssignFolds(SplitPlan plan, int k, uint64_t seed);

/// Call ids on the selected side of the plan.
std::set<std::string> RoleCalls(const SplitPlan &plan, SplitRole role);

/// All segments of the calls selected by `role`. Throws if the plan and the corpus
/// do not cover the same set of call ids.
std::vector<Segment> Materialize(const SplitPlan &plan, std::span<const Call> calls, SplitRole role);

}  // namespace hotline

#endif  // HOTLINE_SPLITTING_H_
