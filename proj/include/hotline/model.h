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

#ifndef HOTLINE_MODEL_H_
#define HOTLINE_MODEL_H_

#include <filesystem>
#include <iosfwd>
#include <string>

#include "hotline/classifier.h"
#include "hotline/encoding.h"
#include "hotline/taxonomy.h"

namespace hotline {

/// A trained head together with everything needed to apply it.
struct Model {
  HeadConfig head;
  HeadParameters params;
  EncoderSpec encoder;
  LabelTaxonomy taxonomy;
  double threshold = 0.5;
};

/// Artifact layout (all integers little-endian):
///   8 bytes  magic "HLSERMDL"
///   u32      format version (1)
///   u32      N, length of the JSON header
///   N bytes  UTF-8 JSON header: head config, encoder spec, taxonomy text and
///            fingerprint, threshold, and the ordered list of arrays with shapes
///   ...      each array as row-major IEEE-754 binary64, little-endian
inline constexpr char kModelMagic[8] = {'H', 'L', 'S', 'E', 'R', 'M', 'D', 'L'};
inline constexpr uint32_t kModelVersion = 1;

void WriteModel(std::ostream &out, const Model &model);
Model ReadModel(std::istream &in);
void SaveModel(const std::filesystem::path &path, const Model &model);
Model LoadModel(const std::filesystem::path &path);

}  // namespace hotline

#endif  // HOTLINE_MODEL_H_
