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

#include "hotline/splitting.h"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "hotline/error.h"
#include "hotline/random.h"

namespace hotline {

using nlohmann::json;

namespace {

int ParseInt(std::string_view s, std::string_view what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  HOTLINE_ENFORCE(ec == std::errc() && ptr == s.data() + s.size(), "bad ", what, " '", s, "'");
  return v;
}

}  // namespace

SplitRatio SplitRatio::Parse(std::string_view text) {
  auto colon = text.find(':');
  HOTLINE_ENFORCE(colon != std::string_view::npos, "ratio must look like 'train:test', got '", text, "'");
  SplitRatio r{ParseInt(text.substr(0, colon), "ratio"), ParseInt(text.substr(colon + 1), "ratio")};
  HOTLINE_ENFORCE(r.train > 0 && r.test > 0, "ratio parts must be positive, got '", text, "'");
  return r;
}

std::string SplitRatio::ToString() const { return std::to_string(train) + ":" + std::to_string(test); }

SplitRole SplitRole::Parse(std::string_view text) {
  if (text == "train") return Train();
  if (text == "test") return Test();
  if (text.starts_with("fold-")) {
    auto rest = text.substr(5);
    auto dash = rest.find('-');
    if (dash != std::string_view::npos) {
      const int f = ParseInt(rest.substr(0, dash), "fold index");
      if (rest.substr(dash + 1) == "train") return FoldTrain(f);
      if (rest.substr(dash + 1) == "val") return FoldVal(f);
    }
  }
  throw Error(MakeString("unknown split role '", text, "'"));
}

std::string SplitRole::ToString() const {
  switch (kind) {
    case Kind::kTrain: return "train";
    case Kind::kTest: return "test";
    case Kind::kFoldTrain: return "fold-" + std::to_string(fold) + "-train";
    case Kind::kFoldVal: return "fold-" + std::to_string(fold) + "-val";
  }
  return {};
}

std::set<std::string> SplitPlan::FoldCalls(int fold) const {
  std::set<std::string> out;
  for (const auto &[id, f] : folds)
    if (f == fold) out.insert(id);
  return out;
}

json SplitPlan::ToJson() const {
  json assignments = json::object();
  for (const auto &id : test_calls) assignments[id] = {{"role", "test"}};
  for (const auto &id : train_calls) {
    json a = {{"role", "train"}};
    if (auto it = folds.find(id); it != folds.end()) a["fold"] = it->second;
    assignments[id] = a;
  }
  return {{"format", "hotline-split/1"},
          {"rng", std::string(kShuffleAlgorithm)},
          {"seed", seed},
          {"ratio", ratio.ToString()},
          {"folds", num_folds},
          {"fold_seed", fold_seed},
          {"train_count", train_calls.size()},
          {"test_count", test_calls.size()},
          {"assignments", assignments}};
}

SplitPlan SplitPlan::FromJson(const json &j) {
  HOTLINE_ENFORCE(j.value("format", "") == "hotline-split/1", "not a split plan (format tag missing)");
  HOTLINE_ENFORCE(j.value("rng", "") == kShuffleAlgorithm, "split plan was produced by shuffle '",
                  j.value("rng", ""), "', this build uses '", kShuffleAlgorithm, "'");
  SplitPlan p;
  p.seed = j.at("seed").get<uint64_t>();
  p.ratio = SplitRatio::Parse(j.at("ratio").get<std::string>());
  p.num_folds = j.at("folds").get<int>();
  p.fold_seed = j.at("fold_seed").get<uint64_t>();
  for (auto it = j.at("assignments").begin(); it != j.at("assignments").end(); ++it) {
    const std::string role = it.value().at("role").get<std::string>();
    if (role == "test") {
      p.test_calls.insert(it.key());
    } else {
      HOTLINE_ENFORCE(role == "train", "bad role '", role, "' for call '", it.key(), "'");
      p.train_calls.insert(it.key());
      if (it.value().contains("fold")) p.folds[it.key()] = it.value()["fold"].get<int>();
    }
  }
  return p;
}

SplitPlan HoldoutSplit(std::span<const std::string> call_ids, SplitRatio ratio, uint64_t seed) {
  HOTLINE_ENFORCE(ratio.train > 0 && ratio.test > 0, "ratio parts must be positive");
  std::vector<std::string> ids(call_ids.begin(), call_ids.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  const int n = static_cast<int>(ids.size());
  HOTLINE_ENFORCE(n >= 2, "holdout split needs at least 2 calls, got ", n);
  HOTLINE_ENFORCE(n >= ratio.train + ratio.test, "holdout split ", ratio.ToString(), " needs at least ",
                  ratio.train + ratio.test, " calls, got ", n);

  const double exact = static_cast<double>(n) * ratio.test / (ratio.train + ratio.test);
  const int n_test = std::clamp(static_cast<int>(std::lround(exact)), 1, n - 1);

  Rng rng(seed);
  rng.Shuffle(std::span<std::string>(ids));

  SplitPlan plan;
  plan.seed = seed;
  plan.ratio = ratio;
  for (int i = 0; i < n; ++i) (i < n_test ? plan.test_calls : plan.train_calls).insert(ids[i]);
  return plan;
}

SplitPlan HoldoutSplit(std::span<const Call> calls, SplitRatio ratio, uint64_t seed) {
  std::vector<std::string> ids;
  ids.reserve(calls.size());
  for (const auto &c : calls) ids.push_back(c.call_id);
  return HoldoutSplit(ids, ratio, seed);
}

SplitPlan AssignFolds(SplitPlan plan, int k, uint64_t seed) {
  const int n = static_cast<int>(plan.train_calls.size());
  HOTLINE_ENFORCE(k >= 2, "cross-validation needs k >= 2, got ", k);
  HOTLINE_ENFORCE(k <= n, "k = ", k, " exceeds the ", n, " training calls");
  std::vector<std::string> ids(plan.train_calls.begin(), plan.train_calls.end());
  Rng rng(DeriveSeed(seed, 0x666f6c6473ULL));  // "folds"
  rng.Shuffle(std::span<std::string>(ids));
  plan.folds.clear();
  for (int i = 0; i < n; ++i) plan.folds[ids[i]] = i % k;
  plan.num_folds = k;
  plan.fold_seed = seed;
  return plan;
}

std::set<std::string> RoleCalls(const SplitPlan &plan, SplitRole role) {
  using Kind = SplitRole::Kind;
  if (role.kind == Kind::kTrain) return plan.train_calls;
  if (role.kind == Kind::kTest) return plan.test_calls;
  HOTLINE_ENFORCE(plan.num_folds > 0, "plan has no folds; role ", role.ToString(), " is undefined");
  HOTLINE_ENFORCE(role.fold >= 0 && role.fold < plan.num_folds, "fold ", role.fold, " outside 0..",
                  plan.num_folds - 1);
  std::set<std::string> out;
  for (const auto &[id, f] : plan.folds)
    if ((f == role.fold) == (role.kind == Kind::kFoldVal)) out.insert(id);
  return out;
}

std::vector<Segment> Materialize(const SplitPlan &plan, std::span<const Call> calls, SplitRole role) {
  std::set<std::string> corpus_ids;
  for (const auto &c : calls) {
    HOTLINE_ENFORCE(plan.train_calls.count(c.call_id) || plan.test_calls.count(c.call_id),
                    "call '", c.call_id, "' is not covered by the split plan");
    corpus_ids.insert(c.call_id);
  }
  for (const auto *side : {&plan.train_calls, &plan.test_calls})
    for (const auto &id : *side)
      HOTLINE_ENFORCE(corpus_ids.count(id), "split plan names call '", id, "' absent from the corpus");

  const std::set<std::string> selected = RoleCalls(plan, role);
  std::vector<Segment> out;
  for (const auto &c : calls)
    if (selected.count(c.call_id)) out.insert(out.end(), c.segments.begin(), c.segments.end());
  return out;
}

}  // namespace hotline
