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

#ifndef HOTLINE_CONFIG_H_
#define HOTLINE_CONFIG_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

#include "hotline/encoding.h"
#include "hotline/training.h"

namespace hotline {

/// `key = value` lines; `#` starts a comment. Later keys win.
std::map<std::string, std::string> ParseKeyValues(std::istream &in);
std::map<std::string, std::string> LoadKeyValues(const std::filesystem::path &path);

struct RunConfig {
  TrainConfig train;
  EncoderSpec encoder = EncoderSpec::Preset("mock");
};

/// Applies recognised keys on top of `base`. Unknown keys are an error.
/// `encoder` selects a preset first; feature_dim, max_window_s,
/// target_sample_rate and pooling then override it.
RunConfig ApplyConfig(RunConfig base, const std::map<std::string, std::string> &kv);

}  // namespace hotline

#endif  // HOTLINE_CONFIG_H_
