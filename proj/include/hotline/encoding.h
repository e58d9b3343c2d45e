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

#ifndef HOTLINE_ENCODING_H_
#define HOTLINE_ENCODING_H_

#include <Eigen/Dense>

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hotline/audio.h"
#include "hotline/corpus.h"
#include "json.hpp"

namespace hotline {

/// Order of the two pooling steps. kMeanThenTanh is the default; the other is kept for ablation.
enum class PoolingOrder { kMeanThenTanh, kTanhThenMean };

std::string ToString(PoolingOrder order);
PoolingOrder ParsePoolingOrder(const std::string &text);

struct EncoderSpec {
  std::string encoder_id = "mock";
  int feature_dim = 64;
  double max_window_s = 30.0;
  int target_sample_rate = 16000;
  PoolingOrder pooling = PoolingOrder::kMeanThenTanh;

  /// Known ids: wav2vec2-zh, hubert-base, whisper-small, whisper-small-zh,
  /// whisper-medium, whisper-large-v3, mock.
  static EncoderSpec Preset(const std::string &encoder_id);
  static std::vector<std::string> PresetNames();

  void Validate() const;
  nlohmann::json ToJson() const;
  static EncoderSpec FromJson(const nlohmann::json &j);
  bool operator==(const EncoderSpec &) const = default;
};

/// Encoder output for one utterance: T frames of D features.
struct FrameFeatures {
  Eigen::MatrixXd frames;  // T x D
  double frame_hop_s = 0.0;

  Eigen::Index NumFrames() const { return frames.rows(); }
  Eigen::Index Dim() const { return frames.cols(); }
};

/// Utterance embedding; entries lie in (-1, 1).
struct PooledFeature {
  Eigen::VectorXd vector;
};

/// Mono mix-down followed by linear-interpolation resampling to the target rate.
Waveform Preprocess(const Waveform &w, const EncoderSpec &spec);

/// One pre-trained encoder behind a uniform interface. Instances may keep
/// internal state: use one instance per worker.
class EncoderAdapter {
 public:
  virtual ~EncoderAdapter() = default;
  virtual std::string id() const = 0;
  virtual int feature_dim() const = 0;
  virtual double frame_hop_s() const = 0;
  /// Final hidden-state sequence for one window of mono audio.
  virtual Eigen::MatrixXd EncodeWindow(std::span<const float> samples, int sample_rate) = 0;
};

using EncoderFactory = std::function<std::unique_ptr<EncoderAdapter>(const EncoderSpec &)>;

/// Makes `encoder_id` resolvable by CreateEncoder. Replaces any earlier registration.
void RegisterEncoder(const std::string &encoder_id, EncoderFactory factory);
bool EncoderAvailable(const std::string &encoder_id);

/// Throws EncoderUnavailable when no adapter is registered for spec.encoder_id.
std::unique_ptr<EncoderAdapter> CreateEncoder(const EncoderSpec &spec);

/// Deterministic test double. Audio is cut into 20 ms frames; frame t depends only
/// on t and the mean absolute amplitude m of the frame:
///   f_d(t, m) = cos(w_d m + phi_d) + 0.05 m sin(0.1 t + d),
/// with w_d in [20, 80) and phi_d fixed per dimension by a low-discrepancy sequence.
class MockEncoder : public EncoderAdapter {
 public:
  static constexpr double kFrameHopS = 0.02;
  static constexpr double kMinFrequency = 20.0;
  static constexpr double kMaxFrequency = 80.0;

  explicit MockEncoder(int feature_dim);

  std::string id() const override { return "mock"; }
  int feature_dim() const override { return dim_; }
  double frame_hop_s() const override { return kFrameHopS; }
  Eigen::MatrixXd EncodeWindow(std::span<const float> samples, int sample_rate) override;

  static double Feature(int t, double mean_amplitude, int d, int dim);

 private:
  int dim_;
};

/// Encodes preprocessed audio. Audio longer than spec.max_window_s is cut into
/// consecutive non-overlapping windows whose frame sequences are concatenated.
FrameFeatures Encode(const Waveform &w, const EncoderSpec &spec, EncoderAdapter &adapter);

/// tanh of the temporal mean (or mean of tanh, per `order`).
PooledFeature Pool(const FrameFeatures &f, PoolingOrder order = PoolingOrder::kMeanThenTanh);

/// Where segment audio comes from.
class AudioSource {
 public:
  virtual ~AudioSource() = default;
  virtual Waveform Load(const Segment &segment) const = 0;
};

/// Reads [start_s, end_s) of the segment's audio_path.
class WavAudioSource : public AudioSource {
 public:
  Waveform Load(const Segment &segment) const override;
};

/// On-disk store of pooled vectors keyed by (segment_id, encoder_id). One file
/// per encoder id; a file written under a different EncoderSpec is ignored.
class FeatureCache {
 public:
  explicit FeatureCache(std::filesystem::path dir);
  ~FeatureCache();

  std::optional<PooledFeature> Find(const EncoderSpec &spec, const std::string &segment_id);
  void Put(const EncoderSpec &spec, const std::string &segment_id, const PooledFeature &f);
  void Flush();

 private:
  struct Table {
    bool dirty = false;
    std::map<std::string, Eigen::VectorXd> vectors;
  };
  Table &Load(const EncoderSpec &spec);
  std::filesystem::path FileFor(const std::string &encoder_id) const;

  std::filesystem::path dir_;
  std::map<std::string, Table> tables_;
  std::map<std::string, EncoderSpec> specs_;
};

/// audio -> preprocess -> encode -> pool, with optional caching.
class FeatureExtractor {
 public:
  FeatureExtractor(EncoderSpec spec, const AudioSource &source, FeatureCache *cache = nullptr);

  const EncoderSpec &spec() const { return spec_; }
  PooledFeature Extract(const Segment &segment);
  std::vector<PooledFeature> ExtractAll(std::span<const Segment> segments);

 private:
  EncoderSpec spec_;
  const AudioSource &source_;
  FeatureCache *cache_;
  std::unique_ptr<EncoderAdapter> adapter_;
  std::map<std::string, Eigen::VectorXd> memo_;
};

}  // namespace hotline

#endif  // HOTLINE_ENCODING_H_
