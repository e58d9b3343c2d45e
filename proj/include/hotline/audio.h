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

#ifndef HOTLINE_AUDIO_H_
#define HOTLINE_AUDIO_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace hotline {

/// Interleaved float samples in [-1, 1].
struct Waveform {
  std::vector<float> samples;
  int channels = 1;
  int sample_rate = 0;

  size_t Frames() const { return channels > 0 ? samples.size() / channels : 0; }
  double DurationSeconds() const {
    return sample_rate > 0 ? static_cast<double>(Frames()) / sample_rate : 0.0;
  }
};

struct WavInfo {
  int channels = 0;
  int sample_rate = 0;
  int bits_per_sample = 0;
  bool is_float = false;
  uint64_t frames = 0;

  double DurationSeconds() const { return sample_rate > 0 ? static_cast<double>(frames) / sample_rate : 0.0; }
};

/// Header-only probe. Supports PCM 8/16/24/32-bit and IEEE float 32-bit RIFF/WAVE.
WavInfo ProbeWav(const std::filesystem::path &path);

/// Reads [start_s, end_s) of a WAV file; a missing end reads to end of file.
/// The range is clipped to the file; an empty result is an error.
Waveform ReadWav(const std::filesystem::path &path, double start_s = 0.0,
                 std::optional<double> end_s = std::nullopt);

/// Writes 16-bit PCM.
void WriteWav(const std::filesystem::path &path, const Waveform &wave);

}  // namespace hotline

#endif  // HOTLINE_AUDIO_H_
