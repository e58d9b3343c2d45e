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

#include "hotline/encoding.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>

#include "hotline/error.h"

namespace hotline {

using nlohmann::json;

std::string ToString(PoolingOrder order) {
  return order == PoolingOrder::kMeanThenTanh ? "mean_then_tanh" : "tanh_then_mean";
}

PoolingOrder ParsePoolingOrder(const std::string &text) {
  if (text == "mean_then_tanh") return PoolingOrder::kMeanThenTanh;
  if (text == "tanh_then_mean") return PoolingOrder::kTanhThenMean;
  throw Error(MakeString("unknown pooling order '", text, "'"));
}

namespace {

struct PresetRow {
  const char *id;
  int dim;
  double window_s;
};

// Feature widths are the final hidden sizes of the public checkpoints. Encoders
// without a fixed input window get one long enough for any hotline utterance.
constexpr PresetRow kPresets[] = {
    {"wav2vec2-zh", 1024, 120.0},   {"hubert-base", 768, 120.0},    {"whisper-small", 768, 30.0},
    {"whisper-small-zh", 768, 30.0}, {"whisper-medium", 1024, 30.0}, {"whisper-large-v3", 1280, 30.0},
    {"mock", 64, 30.0},
};

}  // namespace

EncoderSpec EncoderSpec::Preset(const std::string &encoder_id) {
  for (const auto &row : kPresets)
    if (encoder_id == row.id) {
      EncoderSpec s;
      s.encoder_id = row.id;
      s.feature_dim = row.dim;
      s.max_window_s = row.window_s;
      return s;
    }
  throw Error(MakeString("unknown encoder preset '", encoder_id, "'"));
}

std::vector<std::string> EncoderSpec::PresetNames() {
  std::vector<std::string> out;
  for (const auto &row : kPresets) out.emplace_back(row.id);
  return out;
}

void EncoderSpec::Validate() const {
  HOTLINE_ENFORCE(!encoder_id.empty(), "encoder_id is empty");
  HOTLINE_ENFORCE(feature_dim >= 1, "feature_dim must be >= 1, got ", feature_dim);
  HOTLINE_ENFORCE(max_window_s > 0, "max_window_s must be positive, got ", max_window_s);
  HOTLINE_ENFORCE(target_sample_rate > 0, "target_sample_rate must be positive");
}

json EncoderSpec::ToJson() const {
  return {{"encoder_id", encoder_id},
          {"feature_dim", feature_dim},
          {"max_window_s", max_window_s},
          {"target_sample_rate", target_sample_rate},
          {"pooling", ToString(pooling)}};
}

EncoderSpec EncoderSpec::FromJson(const json &j) {
  EncoderSpec s;
  s.encoder_id = j.at("encoder_id").get<std::string>();
  s.feature_dim = j.at("feature_dim").get<int>();
  s.max_window_s = j.at("max_window_s").get<double>();
  s.target_sample_rate = j.at("target_sample_rate").get<int>();
  s.pooling = ParsePoolingOrder(j.at("pooling").get<std::string>());
  s.Validate();
  return s;
}

Waveform Preprocess(const Waveform &w, const EncoderSpec &spec) {
  HOTLINE_ENFORCE(w.sample_rate > 0 && w.channels > 0, "waveform has no sample rate or channels");
  const size_t frames = w.Frames();
  HOTLINE_ENFORCE(frames > 0, "cannot preprocess zero-length audio");

  std::vector<float> mono(frames);
  if (w.channels == 1) {
    mono.assign(w.samples.begin(), w.samples.begin() + static_cast<std::ptrdiff_t>(frames));
  } else {
    for (size_t i = 0; i < frames; ++i) {
      double acc = 0.0;
      for (int c = 0; c < w.channels; ++c) acc += w.samples[i * w.channels + c];
      mono[i] = static_cast<float>(acc / w.channels);
    }
  }

  Waveform out;
  out.channels = 1;
  out.sample_rate = spec.target_sample_rate;
  if (w.sample_rate == spec.target_sample_rate) {
    out.samples = std::move(mono);
    return out;
  }
  const double step = static_cast<double>(w.sample_rate) / spec.target_sample_rate;
  const auto n_out = std::max<size_t>(
      1, static_cast<size_t>(std::llround(static_cast<double>(frames) / step)));
  out.samples.resize(n_out);
  for (size_t i = 0; i < n_out; ++i) {
    const double pos = static_cast<double>(i) * step;
    const auto lo = std::min(static_cast<size_t>(pos), frames - 1);
    const size_t hi = std::min(lo + 1, frames - 1);
    const double frac = std::clamp(pos - static_cast<double>(lo), 0.0, 1.0);
    out.samples[i] = static_cast<float>((1.0 - frac) * mono[lo] + frac * mono[hi]);
  }
  return out;
}

namespace {

std::mutex &RegistryMutex() {
  static std::mutex m;
  return m;
}

std::map<std::string, EncoderFactory> &Registry() {
  static std::map<std::string, EncoderFactory> registry = {
      {"mock", [](const EncoderSpec &s) { return std::make_unique<MockEncoder>(s.feature_dim); }},
  };
  return registry;
}

}  // namespace

void RegisterEncoder(const std::string &encoder_id, EncoderFactory factory) {
  std::lock_guard lock(RegistryMutex());
  Registry()[encoder_id] = std::move(factory);
}

bool EncoderAvailable(const std::string &encoder_id) {
  std::lock_guard lock(RegistryMutex());
  return Registry().count(encoder_id) > 0;
}

std::unique_ptr<EncoderAdapter> CreateEncoder(const EncoderSpec &spec) {
  spec.Validate();
  EncoderFactory factory;
  {
    std::lock_guard lock(RegistryMutex());
    auto it = Registry().find(spec.encoder_id);
    if (it == Registry().end()) throw EncoderUnavailable(spec.encoder_id);
    factory = it->second;
  }
  auto adapter = factory(spec);
  if (!adapter) throw EncoderUnavailable(spec.encoder_id);
  HOTLINE_ENFORCE(adapter->feature_dim() == spec.feature_dim, "adapter '", spec.encoder_id,
                  "' produces ", adapter->feature_dim(), "-dim features, spec says ", spec.feature_dim);
  return adapter;
}

MockEncoder::MockEncoder(int feature_dim) : dim_(feature_dim) {
  HOTLINE_ENFORCE(feature_dim >= 1, "mock encoder needs feature_dim >= 1");
}

double MockEncoder::Feature(int t, double mean_amplitude, int d, int dim) {
  (void)dim;
  // Each dimension is a cosine of the amplitude with its own frequency and phase,
  // so distinct loudness levels map to near-orthogonal codes.
  const double u = std::fmod(0.6180339887498949 * (d + 1), 1.0);
  const double v = std::fmod(0.7548776662466927 * (d + 1), 1.0);
  const double freq = kMinFrequency + (kMaxFrequency - kMinFrequency) * u;
  return std::cos(freq * mean_amplitude + 2.0 * M_PI * v) + 0.05 * mean_amplitude * std::sin(0.1 * t + d);
}

Eigen::MatrixXd MockEncoder::EncodeWindow(std::span<const float> samples, int sample_rate) {
  HOTLINE_ENFORCE(!samples.empty(), "mock encoder got an empty window");
  const auto hop = std::max<size_t>(1, static_cast<size_t>(std::llround(kFrameHopS * sample_rate)));
  const size_t frames = (samples.size() + hop - 1) / hop;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(frames), dim_);
  for (size_t t = 0; t < frames; ++t) {
    const size_t lo = t * hop;
    const size_t hi = std::min(samples.size(), lo + hop);
    double acc = 0.0;
    for (size_t i = lo; i < hi; ++i) acc += std::fabs(samples[i]);
    const double m = acc / static_cast<double>(hi - lo);
    for (int d = 0; d < dim_; ++d) out(static_cast<Eigen::Index>(t), d) = Feature(static_cast<int>(t), m, d, dim_);
  }
  return out;
}

FrameFeatures Encode(const Waveform &w, const EncoderSpec &spec, EncoderAdapter &adapter) {
  spec.Validate();
  HOTLINE_ENFORCE(w.channels == 1 && w.sample_rate == spec.target_sample_rate,
                  "encoder input must be preprocessed to mono ", spec.target_sample_rate, " Hz");
  HOTLINE_ENFORCE(!w.samples.empty(), "cannot encode zero-length audio");
  const auto window = std::max<size_t>(1, static_cast<size_t>(std::llround(spec.max_window_s * w.sample_rate)));

  std::vector<Eigen::MatrixXd> parts;
  Eigen::Index total = 0;
  for (size_t lo = 0; lo < w.samples.size(); lo += window) {
    const size_t n = std::min(window, w.samples.size() - lo);
    parts.push_back(adapter.EncodeWindow(std::span<const float>(w.samples).subspan(lo, n), w.sample_rate));
    HOTLINE_ENFORCE(parts.back().rows() >= 1 && parts.back().cols() == spec.feature_dim, "encoder '",
                    spec.encoder_id, "' returned a ", parts.back().rows(), "x", parts.back().cols(),
                    " window, expected D = ", spec.feature_dim);
    total += parts.back().rows();
  }

  FrameFeatures f;
  f.frame_hop_s = adapter.frame_hop_s();
  f.frames.resize(total, spec.feature_dim);
  Eigen::Index row = 0;
  for (const auto &p : parts) {
    f.frames.middleRows(row, p.rows()) = p;
    row += p.rows();
  }
  HOTLINE_ENFORCE(f.frames.allFinite(), "encoder '", spec.encoder_id, "' produced non-finite features");
  return f;
}

PooledFeature Pool(const FrameFeatures &f, PoolingOrder order) {
  HOTLINE_ENFORCE(f.frames.rows() >= 1 && f.frames.cols() >= 1, "cannot pool an empty feature matrix");
  PooledFeature p;
  if (order == PoolingOrder::kMeanThenTanh)
    p.vector = f.frames.colwise().mean().transpose().array().tanh();
  else
    p.vector = f.frames.array().tanh().matrix().colwise().mean().transpose();
  return p;
}

Waveform WavAudioSource::Load(const Segment &segment) const {
  return ReadWav(segment.audio_path, segment.start_s, segment.end_s);
}

FeatureCache::FeatureCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

FeatureCache::~FeatureCache() {
  try {
    Flush();
  } catch (...) {
  }
}

std::filesystem::path FeatureCache::FileFor(const std::string &encoder_id) const {
  return dir_ / (encoder_id + ".features.jsonl");
}

FeatureCache::Table &FeatureCache::Load(const EncoderSpec &spec) {
  auto it = tables_.find(spec.encoder_id);
  if (it != tables_.end()) {
    if (specs_.at(spec.encoder_id) == spec) return it->second;
    // Same encoder id, different spec: start over.
    it->second = Table{true, {}};
    specs_[spec.encoder_id] = spec;
    return it->second;
  }
  Table table;
  std::ifstream in(FileFor(spec.encoder_id));
  std::string line;
  bool header_ok = false;
  if (in && std::getline(in, line)) header_ok = json::parse(line, nullptr, false) == spec.ToJson();
  if (header_ok) {
    while (std::getline(in, line)) {
      const json rec = json::parse(line, nullptr, false);
      if (rec.is_discarded() || !rec.contains("segment_id")) continue;
      const auto values = rec.at("vector").get<std::vector<double>>();
      table.vectors[rec["segment_id"].get<std::string>()] =
          Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
    }
  } else {
    table.dirty = in.is_open();
  }
  specs_[spec.encoder_id] = spec;
  return tables_[spec.encoder_id] = std::move(table);
}

std::optional<PooledFeature> FeatureCache::Find(const EncoderSpec &spec, const std::string &segment_id) {
  Table &t = Load(spec);
  auto it = t.vectors.find(segment_id);
  if (it == t.vectors.end()) return std::nullopt;
  return PooledFeature{it->second};
}

void FeatureCache::Put(const EncoderSpec &spec, const std::string &segment_id, const PooledFeature &f) {
  Table &t = Load(spec);
  t.vectors[segment_id] = f.vector;
  t.dirty = true;
}

void FeatureCache::Flush() {
  for (auto &[id, table] : tables_) {
    if (!table.dirty) continue;
    std::ofstream out(FileFor(id), std::ios::trunc);
    HOTLINE_ENFORCE(out, "cannot write feature cache '", FileFor(id).string(), "'");
    out << specs_.at(id).ToJson().dump() << '\n';
    for (const auto &[seg, v] : table.vectors)
      out << json{{"segment_id", seg}, {"vector", std::vector<double>(v.data(), v.data() + v.size())}}.dump()
          << '\n';
    table.dirty = false;
  }
}

FeatureExtractor::FeatureExtractor(EncoderSpec spec, const AudioSource &source, FeatureCache *cache)
    : spec_(std::move(spec)), source_(source), cache_(cache) {
  spec_.Validate();
}

PooledFeature FeatureExtractor::Extract(const Segment &segment) {
  if (auto it = memo_.find(segment.segment_id); it != memo_.end()) return PooledFeature{it->second};
  if (cache_) {
    if (auto hit = cache_->Find(spec_, segment.segment_id)) {
      memo_[segment.segment_id] = hit->vector;
      return *hit;
    }
  }
  if (!adapter_) adapter_ = CreateEncoder(spec_);
  const Waveform wave = Preprocess(source_.Load(segment), spec_);
  PooledFeature pooled = Pool(Encode(wave, spec_, *adapter_), spec_.pooling);
  memo_[segment.segment_id] = pooled.vector;
  if (cache_) cache_->Put(spec_, segment.segment_id, pooled);
  return pooled;
}

std::vector<PooledFeature> FeatureExtractor::ExtractAll(std::span<const Segment> segments) {
  std::vector<PooledFeature> out;
  out.reserve(segments.size());
  for (const auto &s : segments) out.push_back(Extract(s));
  return out;
}

}  // namespace hotline
