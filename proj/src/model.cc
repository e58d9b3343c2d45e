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

#include "hotline/model.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hotline/error.h"
#include "json.hpp"

namespace hotline {

using nlohmann::json;

namespace {

void PutU32(std::ostream &out, uint32_t v) {
  const char b[4] = {char(v), char(v >> 8), char(v >> 16), char(v >> 24)};
  out.write(b, 4);
}

uint32_t GetU32(std::istream &in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char *>(b), 4);
  HOTLINE_ENFORCE(in, "model artifact truncated");
  return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
}

void PutDouble(std::ostream &out, double v) {
  const uint64_t u = std::bit_cast<uint64_t>(v);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = char(u >> (8 * i));
  out.write(b, 8);
}

double GetDouble(std::istream &in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char *>(b), 8);
  HOTLINE_ENFORCE(in, "model artifact truncated");
  uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= uint64_t(b[i]) << (8 * i);
  return std::bit_cast<double>(u);
}

template <typename M>
void PutArray(std::ostream &out, const M &m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) PutDouble(out, m(r, c));
}

template <typename M>
void GetArray(std::istream &in, M &m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = GetDouble(in);
}

}  // namespace

void WriteModel(std::ostream &out, const Model &model) {
  HOTLINE_ENFORCE(model.params.Matches(model.head), "model parameters do not match the head config");
  HOTLINE_ENFORCE(model.params.AllFinite(), "refusing to save non-finite model parameters");
  const auto &p = model.params;
  json header = {
      {"head", model.head.ToJson()},
      {"encoder", model.encoder.ToJson()},
      {"taxonomy", model.taxonomy.Serialize()},
      {"taxonomy_fingerprint", model.taxonomy.Fingerprint()},
      {"threshold", model.threshold},
      {"dtype", "float64-le"},
      {"arrays",
       {{{"name", "w1"}, {"shape", {p.w1.rows(), p.w1.cols()}}},
        {{"name", "b1"}, {"shape", {p.b1.size()}}},
        {{"name", "w2"}, {"shape", {p.w2.rows(), p.w2.cols()}}},
        {{"name", "b2"}, {"shape", {p.b2.size()}}}}},
  };
  const std::string text = header.dump();
  out.write(kModelMagic, sizeof(kModelMagic));
  PutU32(out, kModelVersion);
  PutU32(out, static_cast<uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  PutArray(out, p.w1);
  PutArray(out, p.b1);
  PutArray(out, p.w2);
  PutArray(out, p.b2);
  HOTLINE_ENFORCE(out, "failed writing model artifact");
}

Model ReadModel(std::istream &in) {
  char magic[sizeof(kModelMagic)];
  in.read(magic, sizeof(magic));
  HOTLINE_ENFORCE(in && std::memcmp(magic, kModelMagic, sizeof(magic)) == 0, "not a model artifact (bad magic)");
  const uint32_t version = GetU32(in);
  HOTLINE_ENFORCE(version == kModelVersion, "unsupported model artifact version ", version);
  const uint32_t len = GetU32(in);
  std::string text(len, '\0');
  in.read(text.data(), len);
  HOTLINE_ENFORCE(in, "model artifact truncated");
  const json header = json::parse(text);
  HOTLINE_ENFORCE(header.at("dtype") == "float64-le", "unsupported array encoding");

  Model m;
  m.head = HeadConfig::FromJson(header.at("head"));
  m.encoder = EncoderSpec::FromJson(header.at("encoder"));
  std::istringstream tax(header.at("taxonomy").get<std::string>());
  m.taxonomy = LabelTaxonomy::Parse(tax);
  HOTLINE_ENFORCE(m.taxonomy.Fingerprint() == header.at("taxonomy_fingerprint").get<std::string>(),
                  "model artifact taxonomy does not match its fingerprint");
  m.threshold = header.at("threshold").get<double>();
  m.params = HeadParameters::Zeros(m.head);
  const auto &arrays = header.at("arrays");
  HOTLINE_ENFORCE(arrays.size() == 4, "model artifact must hold 4 arrays");
  auto check = [&](int i, const char *name, Eigen::Index rows, Eigen::Index cols) {
    const json &a = arrays.at(i);
    HOTLINE_ENFORCE(a.at("name") == name, "array ", i, " should be ", name);
    const auto shape = a.at("shape").get<std::vector<Eigen::Index>>();
    const bool ok = cols < 0 ? shape == std::vector<Eigen::Index>{rows}
                             : shape == std::vector<Eigen::Index>{rows, cols};
    HOTLINE_ENFORCE(ok, "array ", name, " has a shape inconsistent with the head config");
  };
  check(0, "w1", m.head.hidden_dim, m.head.input_dim);
  check(1, "b1", m.head.hidden_dim, -1);
  check(2, "w2", m.head.NumOutputs(), m.head.hidden_dim);
  check(3, "b2", m.head.NumOutputs(), -1);
  GetArray(in, m.params.w1);
  GetArray(in, m.params.b1);
  GetArray(in, m.params.w2);
  GetArray(in, m.params.b2);
  HOTLINE_ENFORCE(m.params.AllFinite(), "model artifact holds non-finite parameters");
  return m;
}

void SaveModel(const std::filesystem::path &path, const Model &model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  HOTLINE_ENFORCE(out, "cannot open '", path.string(), "' for writing");
  WriteModel(out, model);
}

Model LoadModel(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  HOTLINE_ENFORCE(in, "cannot open model artifact '", path.string(), "'");
  return ReadModel(in);
}

}  // namespace hotline
