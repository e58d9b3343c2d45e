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

#include "hotline/audio.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "hotline/error.h"

namespace hotline {

namespace {

uint32_t ReadU32(const unsigned char *p) {
  return uint32_t(p[0]) | uint32_t(p[1]) << 8 | uint32_t(p[2]) << 16 | uint32_t(p[3]) << 24;
}
uint16_t ReadU16(const unsigned char *p) { return uint16_t(p[0] | p[1] << 8); }

void PutU32(std::ofstream &out, uint32_t v) {
  const char b[4] = {char(v), char(v >> 8), char(v >> 16), char(v >> 24)};
  out.write(b, 4);
}
void PutU16(std::ofstream &out, uint16_t v) {
  const char b[2] = {char(v), char(v >> 8)};
  out.write(b, 2);
}

struct WavLayout {
  WavInfo info;
  std::streamoff data_offset = 0;
};

WavLayout ParseLayout(std::ifstream &in, const std::filesystem::path &path) {
  unsigned char riff[12];
  in.read(reinterpret_cast<char *>(riff), 12);
  HOTLINE_ENFORCE(in && std::memcmp(riff, "RIFF", 4) == 0 && std::memcmp(riff + 8, "WAVE", 4) == 0,
                  "'", path.string(), "' is not a RIFF/WAVE file");
  WavLayout layout;
  bool have_fmt = false;
  uint16_t block_align = 0;
  while (true) {
    unsigned char hdr[8];
    in.read(reinterpret_cast<char *>(hdr), 8);
    HOTLINE_ENFORCE(in, "'", path.string(), "': no data chunk found");
    const uint32_t size = ReadU32(hdr + 4);
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      HOTLINE_ENFORCE(size >= 16, "'", path.string(), "': short fmt chunk");
      std::vector<unsigned char> fmt(size);
      in.read(reinterpret_cast<char *>(fmt.data()), size);
      uint16_t format = ReadU16(fmt.data());
      layout.info.channels = ReadU16(fmt.data() + 2);
      layout.info.sample_rate = static_cast<int>(ReadU32(fmt.data() + 4));
      block_align = ReadU16(fmt.data() + 12);
      layout.info.bits_per_sample = ReadU16(fmt.data() + 14);
      if (format == 0xFFFE && size >= 26) format = ReadU16(fmt.data() + 24);
      HOTLINE_ENFORCE(format == 1 || format == 3, "'", path.string(), "': unsupported WAV format ", format);
      layout.info.is_float = format == 3;
      const int bits = layout.info.bits_per_sample;
      HOTLINE_ENFORCE(layout.info.is_float ? bits == 32 : (bits == 8 || bits == 16 || bits == 24 || bits == 32),
                      "'", path.string(), "': unsupported bit depth ", bits);
      HOTLINE_ENFORCE(layout.info.channels > 0 && layout.info.sample_rate > 0, "'", path.string(),
                      "': bad channel count or sample rate");
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      HOTLINE_ENFORCE(have_fmt, "'", path.string(), "': data chunk precedes fmt chunk");
      layout.data_offset = in.tellg();
      const uint32_t frame_bytes = block_align ? block_align
                                               : layout.info.channels * layout.info.bits_per_sample / 8;
      layout.info.frames = size / frame_bytes;
      return layout;
    } else {
      in.seekg(size + (size & 1), std::ios::cur);
    }
  }
}

float DecodeSample(const unsigned char *p, int bits, bool is_float) {
  switch (bits) {
    case 8: return (static_cast<int>(p[0]) - 128) / 128.0f;
    case 16: return static_cast<int16_t>(ReadU16(p)) / 32768.0f;
    case 24: {
      int32_t v = int32_t(p[0]) | int32_t(p[1]) << 8 | int32_t(p[2]) << 16;
      if (v & 0x800000) v -= 0x1000000;
      return v / 8388608.0f;
    }
    default: {
      const uint32_t u = ReadU32(p);
      if (is_float) return std::bit_cast<float>(u);
      return static_cast<float>(static_cast<int32_t>(u) / 2147483648.0);
    }
  }
}

}  // namespace

WavInfo ProbeWav(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  HOTLINE_ENFORCE(in, "cannot open audio file '", path.string(), "'");
  return ParseLayout(in, path).info;
}

Waveform ReadWav(const std::filesystem::path &path, double start_s, std::optional<double> end_s) {
  std::ifstream in(path, std::ios::binary);
  HOTLINE_ENFORCE(in, "cannot open audio file '", path.string(), "'");
  const WavLayout layout = ParseLayout(in, path);
  const WavInfo &info = layout.info;
  const auto first = static_cast<uint64_t>(std::max(0.0, std::round(start_s * info.sample_rate)));
  uint64_t last = info.frames;
  if (end_s) last = std::min<uint64_t>(last, static_cast<uint64_t>(std::max(0.0, std::round(*end_s * info.sample_rate))));
  HOTLINE_ENFORCE(last > first, "'", path.string(), "': requested range [", start_s, ", ",
                  end_s.value_or(info.DurationSeconds()), ") s holds no audio (file is ",
                  info.DurationSeconds(), " s)");

  const int bytes = info.bits_per_sample / 8;
  const uint64_t frame_bytes = static_cast<uint64_t>(bytes) * info.channels;
  in.seekg(layout.data_offset + static_cast<std::streamoff>(first * frame_bytes));
  std::vector<unsigned char> raw((last - first) * frame_bytes);
  in.read(reinterpret_cast<char *>(raw.data()), static_cast<std::streamsize>(raw.size()));
  HOTLINE_ENFORCE(static_cast<size_t>(in.gcount()) == raw.size(), "'", path.string(), "': truncated data chunk");

  Waveform w;
  w.channels = info.channels;
  w.sample_rate = info.sample_rate;
  w.samples.resize(raw.size() / bytes);
  for (size_t i = 0; i < w.samples.size(); ++i)
    w.samples[i] = DecodeSample(raw.data() + i * bytes, info.bits_per_sample, info.is_float);
  return w;
}

void WriteWav(const std::filesystem::path &path, const Waveform &wave) {
  HOTLINE_ENFORCE(wave.channels > 0 && wave.sample_rate > 0, "cannot write a waveform without rate/channels");
  std::ofstream out(path, std::ios::binary);
  HOTLINE_ENFORCE(out, "cannot open '", path.string(), "' for writing");
  const uint32_t data_bytes = static_cast<uint32_t>(wave.samples.size() * 2);
  out.write("RIFF", 4);
  PutU32(out, 36 + data_bytes);
  out.write("WAVEfmt ", 8);
  PutU32(out, 16);
  PutU16(out, 1);
  PutU16(out, static_cast<uint16_t>(wave.channels));
  PutU32(out, static_cast<uint32_t>(wave.sample_rate));
  PutU32(out, static_cast<uint32_t>(wave.sample_rate * wave.channels * 2));
  PutU16(out, static_cast<uint16_t>(wave.channels * 2));
  PutU16(out, 16);
  out.write("data", 4);
  PutU32(out, data_bytes);
  std::vector<char> buf(data_bytes);
  for (size_t i = 0; i < wave.samples.size(); ++i) {
    const float s = std::clamp(wave.samples[i], -1.0f, 1.0f);
    const auto v = static_cast<int16_t>(std::lround(s * 32767.0f));
    buf[2 * i] = char(v & 0xff);
    buf[2 * i + 1] = char((v >> 8) & 0xff);
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  HOTLINE_ENFORCE(out, "failed writing '", path.string(), "'");
}

}  // namespace hotline
