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

#include "hotline/run_manifest.h"

#include <chrono>
#include <ctime>
#include <fstream>

#include "hotline/error.h"
#include "hotline/hashing.h"

namespace hotline {

std::string UtcTimestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest RunManifest::Begin(std::string command) {
  RunManifest m;
  m.command = std::move(command);
  m.started_at = UtcTimestamp();
  return m;
}

void RunManifest::AddInput(const std::filesystem::path &path) { inputs[path.string()] = Sha256File(path); }

void RunManifest::AddOutput(const std::filesystem::path &path) { outputs[path.string()] = Sha256File(path); }

nlohmann::json RunManifest::ToJson() const {
  return {{"command", command},   {"config", config},         {"inputs", inputs},
          {"outputs", outputs},   {"started_at", started_at}, {"finished_at", finished_at}};
}

std::filesystem::path RunManifest::Write(const std::filesystem::path &dir) {
  finished_at = UtcTimestamp();
  const auto path = dir / (command + ".manifest.json");
  std::ofstream out(path, std::ios::trunc);
  HOTLINE_ENFORCE(out, "cannot write run manifest '", path.string(), "'");
  out << ToJson().dump(2) << '\n';
  return path;
}

}  // namespace hotline
