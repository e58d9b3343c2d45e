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

#ifndef HOTLINE_RUN_MANIFEST_H_
#define HOTLINE_RUN_MANIFEST_H_

#include <filesystem>
#include <map>
#include <string>

#include "json.hpp"

namespace hotline {

/// Provenance record written next to the outputs of every CLI command.
struct RunManifest {
  std::string command;
  nlohmann::json config = nlohmann::json::object();
  std::map<std::string, std::string> inputs;   // path -> sha256
  std::map<std::string, std::string> outputs;  // path -> sha256
  std::string started_at;
  std::string finished_at;

  static RunManifest Begin(std::string command);
  void AddInput(const std::filesystem::path &path);
  void AddOutput(const std::filesystem::path &path);
  nlohmann::json ToJson() const;
  /// Stamps finished_at and writes `<dir>/<command>.manifest.json`.
  std::filesystem::path Write(const std::filesystem::path &dir);
};

/// Current UTC time, ISO-8601.
std::string UtcTimestamp();

}  // namespace hotline

#endif  // HOTLINE_RUN_MANIFEST_H_
