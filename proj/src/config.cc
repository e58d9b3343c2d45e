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

#include "hotline/config.h"

#include <fstream>
#include <functional>

#include "hotline/error.h"

namespace hotline {

namespace {

std::string Trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T Convert(const std::string &key, const std::string &value) {
  try {
    size_t used = 0;
    T out{};
    if constexpr (std::is_same_v<T, int>) out = std::stoi(value, &used);
    else if constexpr (std::is_same_v<T, uint64_t>) out = std::stoull(value, &used);
    else out = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("trailing");
    return out;
  } catch (const std::exception &) {
    throw Error(MakeString("config key '", key, "': cannot parse '", value, "'"));
  }
}

bool ConvertBool(const std::string &key, const std::string &value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw Error(MakeString("config key '", key, "': expected a boolean, got '", value, "'"));
}

}  // namespace

std::map<std::string, std::string> ParseKeyValues(std::istream &in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError(MakeString("config line ", line_no, ": expected 'key = value'"), line_no);
    const std::string key = Trim(line.substr(0, eq));
    if (key.empty()) throw ParseError(MakeString("config line ", line_no, ": empty key"), line_no);
    kv[key] = Trim(line.substr(eq + 1));
  }
  return kv;
}

std::map<std::string, std::string> LoadKeyValues(const std::filesystem::path &path) {
  std::ifstream in(path);
  HOTLINE_ENFORCE(in, "cannot open config file '", path.string(), "'");
  return ParseKeyValues(in);
}

RunConfig ApplyConfig(RunConfig cfg, const std::map<std::string, std::string> &kv) {
  if (auto it = kv.find("encoder"); it != kv.end()) cfg.encoder = EncoderSpec::Preset(it->second);
  TrainConfig &t = cfg.train;
  EncoderSpec &e = cfg.encoder;
  const std::map<std::string, std::function<void(const std::string &, const std::string &)>> setters = {
      {"encoder", [](const std::string &, const std::string &) {}},
      {"task", [&](auto &, auto &v) { t.task = ParseTask(v); }},
      {"batch_size", [&](auto &k, auto &v) { t.batch_size = Convert<int>(k, v); }},
      {"learning_rate", [&](auto &k, auto &v) { t.learning_rate = Convert<double>(k, v); }},
      {"grad_accum_steps", [&](auto &k, auto &v) { t.grad_accum_steps = Convert<int>(k, v); }},
      {"epochs", [&](auto &k, auto &v) { t.epochs = Convert<int>(k, v); }},
      {"precision", [&](auto &, auto &v) { t.precision = ParsePrecision(v); }},
      {"seed", [&](auto &k, auto &v) { t.seed = Convert<uint64_t>(k, v); }},
      {"freeze_encoder", [&](auto &k, auto &v) { t.freeze_encoder = ConvertBool(k, v); }},
      {"threshold", [&](auto &k, auto &v) { t.threshold = Convert<double>(k, v); }},
      {"optimizer", [&](auto &, auto &v) { t.optimizer = ParseOptimizer(v); }},
      {"hidden_dim", [&](auto &k, auto &v) { t.hidden_dim = Convert<int>(k, v); }},
      {"dropout_p", [&](auto &k, auto &v) { t.dropout_p = Convert<double>(k, v); }},
      {"feature_dim", [&](auto &k, auto &v) { e.feature_dim = Convert<int>(k, v); }},
      {"max_window_s", [&](auto &k, auto &v) { e.max_window_s = Convert<double>(k, v); }},
      {"target_sample_rate", [&](auto &k, auto &v) { e.target_sample_rate = Convert<int>(k, v); }},
      {"pooling", [&](auto &, auto &v) { e.pooling = ParsePoolingOrder(v); }},
  };
  for (const auto &[key, value] : kv) {
    auto it = setters.find(key);
    HOTLINE_ENFORCE(it != setters.end(), "unknown config key '", key, "'");
    it->second(key, value);
  }
  t.Validate();
  e.Validate();
  return cfg;
}

}  // namespace hotline
