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

#ifndef HOTLINE_TAXONOMY_H_
#define HOTLINE_TAXONOMY_H_

#include <array>
#include <bitset>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hotline {

inline constexpr int kNumLabels = 11;

/// 1-based fine-grained label id.
using LabelId = int;

/// Multi-hot label vector; bit (id - 1) is set when label `id` is present.
using LabelSet = std::bitset<kNumLabels>;

inline bool ValidLabelId(LabelId id) { return id >= 1 && id <= kNumLabels; }

std::vector<LabelId> LabelIds(const LabelSet &set);
LabelSet MakeLabelSet(std::initializer_list<LabelId> ids);

/// The ordered 11-category negative-emotion taxonomy.
class LabelTaxonomy {
 public:
  /// Sadness, Pain, Grievance, Confuse, Resentment, Helplessness, Anxiety,
  /// Guilt, Numbness, Despair, Fear.
  static LabelTaxonomy Default();

  /// Parses `id<TAB>name` lines. Blank lines are ignored.
  static LabelTaxonomy Parse(std::istream &in);
  static LabelTaxonomy Load(const std::filesystem::path &path);

  const std::string &Name(LabelId id) const;
  std::optional<LabelId> Find(std::string_view name) const;

  /// Canonical text form, identical to what `Parse` accepts.
  std::string Serialize() const;

  /// SHA-256 of the canonical text form.
  std::string Fingerprint() const;

  /// "1. Sadness; 6. Helplessness", or "None" for an empty set.
  std::string Render(const LabelSet &set) const;

  bool operator==(const LabelTaxonomy &other) const = default;

 private:
  std::array<std::string, kNumLabels> names_;
};

}  // namespace hotline

#endif  // HOTLINE_TAXONOMY_H_
