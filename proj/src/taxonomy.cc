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

#include "hotline/taxonomy.h"

#include <fstream>
#include <set>
#include <sstream>

#include "hotline/error.h"
#include "hotline/hashing.h"

namespace hotline {

std::vector<LabelId> LabelIds(const LabelSet &set) {
  std::vector<LabelId> ids;
  for (int i = 0; i < kNumLabels; ++i)
    if (set.test(i)) ids.push_back(i + 1);
  return ids;
}

LabelSet MakeLabelSet(std::initializer_list<LabelId> ids) {
  LabelSet set;
  for (LabelId id : ids) {
    HOTLINE_ENFORCE(ValidLabelId(id), "label id ", id, " outside 1..", kNumLabels);
    set.set(id - 1);
  }
  return set;
}

LabelTaxonomy LabelTaxonomy::Default() {
  LabelTaxonomy t;
  t.names_ = {"Sadness",    "Pain",         "Grievance", "Confuse", "Resentment", "Helplessness",
              "Anxiety",    "Guilt",        "Numbness",  "Despair", "Fear"};
  return t;
}

LabelTaxonomy LabelTaxonomy::Parse(std::istream &in) {
  LabelTaxonomy t;
  std::array<bool, kNumLabels> seen{};
  std::set<std::string> names;
  std::string line;
  int line_no = 0;
  int entries = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw ParseError(MakeString("taxonomy line ", line_no, ": expected 'id<TAB>name'"), line_no);
    int id = 0;
    try {
      size_t used = 0;
      id = std::stoi(line.substr(0, tab), &used);
      if (used != tab) throw std::invalid_argument("trailing");
    } catch (const std::exception &) {
      throw ParseError(MakeString("taxonomy line ", line_no, ": bad id '", line.substr(0, tab), "'"),
                       line_no);
    }
    std::string name = line.substr(tab + 1);
    if (!ValidLabelId(id))
      throw ParseError(MakeString("taxonomy line ", line_no, ": id ", id, " outside 1..", kNumLabels),
                       line_no);
    if (seen[id - 1])
      throw ParseError(MakeString("taxonomy line ", line_no, ": duplicate id ", id), line_no);
    if (name.empty() || !names.insert(name).second)
      throw ParseError(MakeString("taxonomy line ", line_no, ": empty or duplicate name '", name, "'"),
                       line_no);
    seen[id - 1] = true;
    t.names_[id - 1] = std::move(name);
    ++entries;
  }
  if (entries != kNumLabels)
    throw ParseError(MakeString("taxonomy must have exactly ", kNumLabels, " entries, got ", entries), 0);
  return t;
}

LabelTaxonomy LabelTaxonomy::Load(const std::filesystem::path &path) {
  std::ifstream in(path);
  HOTLINE_ENFORCE(in, "cannot open taxonomy file '", path.string(), "'");
  return Parse(in);
}

const std::string &LabelTaxonomy::Name(LabelId id) const {
  HOTLINE_ENFORCE(ValidLabelId(id), "label id ", id, " outside 1..", kNumLabels);
  return names_[id - 1];
}

std::optional<LabelId> LabelTaxonomy::Find(std::string_view name) const {
  for (int i = 0; i < kNumLabels; ++i)
    if (names_[i] == name) return i + 1;
  return std::nullopt;
}

std::string LabelTaxonomy::Serialize() const {
  std::ostringstream ss;
  for (int i = 0; i < kNumLabels; ++i) ss << (i + 1) << '\t' << names_[i] << '\n';
  return ss.str();
}

std::string LabelTaxonomy::Fingerprint() const { return Sha256Hex(Serialize()); }

std::string LabelTaxonomy::Render(const LabelSet &set) const {
  if (set.none()) return "None";
  std::string out;
  for (LabelId id : LabelIds(set)) {
    if (!out.empty()) out += "; ";
    out += std::to_string(id) + ". " + names_[id - 1];
  }
  return out;
}

}  // namespace hotline
