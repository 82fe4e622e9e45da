// Copyright 2026 The Emorec Authors
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

#include "emorec/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "emorec/common.h"

namespace emorec {

namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] |
                                    (static_cast<std::uint16_t>(p[1]) << 8));
}

void write_u32(std::ofstream& out, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff),
                        static_cast<unsigned char>((v >> 16) & 0xff),
                        static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u16(std::ofstream& out, std::uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                        static_cast<unsigned char>((v >> 8) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 2);
}

}  // namespace

Waveform decode_wav(const std::string& path, int channel) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (data.size() < 44 || std::memcmp(data.data(), "RIFF", 4) != 0 ||
      std::memcmp(data.data() + 8, "WAVE", 4) != 0) {
    throw ParseError(path + ": not a RIFF/WAVE file");
  }

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* pcm = nullptr;
  std::size_t pcm_bytes = 0;

  // Walk chunks; ignore everything except fmt and data.
  std::size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const unsigned char* hdr = data.data() + pos;
    std::uint32_t size = read_u32(hdr + 4);
    std::size_t body = pos + 8;
    if (body + size > data.size()) {
      throw ParseError(path + ": truncated chunk");
    }
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (size < 16) throw ParseError(path + ": fmt chunk too small");
      format = read_u16(data.data() + body);
      channels = read_u16(data.data() + body + 2);
      rate = read_u32(data.data() + body + 4);
      bits = read_u16(data.data() + body + 14);
      if (format == kFormatExtensible && size >= 40) {
        // sub-format GUID starts with the effective format tag
        format = read_u16(data.data() + body + 24);
      }
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      pcm = data.data() + body;
      pcm_bytes = size;
    }
    pos = body + size + (size & 1);  // chunks are word-aligned
  }

  if (format == 0 || pcm == nullptr) {
    throw ParseError(path + ": missing fmt or data chunk");
  }
  if (format != kFormatPcm) {
    throw ParseError(path + ": unsupported WAV format tag " +
                     std::to_string(format) + " (only integer PCM)");
  }
  if (bits != 16 && bits != 24) {
    throw ParseError(path + ": unsupported bit depth " + std::to_string(bits) +
                     " (only 16 or 24)");
  }
  if (channels == 0) throw ParseError(path + ": zero channels");
  if (channels > 1 && channel < 0) {
    throw ValidationError(path + ": file has " + std::to_string(channels) +
                          " channels; select one with --channel");
  }
  if (channel >= channels) {
    throw ValidationError(path + ": channel " + std::to_string(channel) +
                          " out of range (file has " +
                          std::to_string(channels) + ")");
  }
  const int ch = channels == 1 ? 0 : channel;
  const std::size_t bytes_per_sample = bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * channels;
  const std::size_t n_frames = pcm_bytes / frame_bytes;

  Waveform w;
  w.sample_rate_hz = static_cast<int>(rate);
  w.source_bit_depth = bits;
  w.samples.resize(n_frames);
  for (std::size_t i = 0; i < n_frames; ++i) {
    const unsigned char* s = pcm + i * frame_bytes + ch * bytes_per_sample;
    if (bits == 16) {
      auto v = static_cast<std::int16_t>(s[0] | (s[1] << 8));
      w.samples[i] = static_cast<double>(v) / 32768.0;
    } else {
      std::int32_t v = s[0] | (s[1] << 8) | (s[2] << 16);
      if (v & 0x800000) v |= ~0xffffff;  // sign-extend
      w.samples[i] = static_cast<double>(v) / 8388608.0;
    }
  }
  return w;
}

void write_wav_16bit(const std::string& path, const Waveform& w) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path);
  const auto n = static_cast<std::uint32_t>(w.samples.size());
  const std::uint32_t data_bytes = n * 2;
  out.write("RIFF", 4);
  write_u32(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_u32(out, 16);
  write_u16(out, kFormatPcm);
  write_u16(out, 1);
  write_u32(out, static_cast<std::uint32_t>(w.sample_rate_hz));
  write_u32(out, static_cast<std::uint32_t>(w.sample_rate_hz) * 2);
  write_u16(out, 2);
  write_u16(out, 16);
  out.write("data", 4);
  write_u32(out, data_bytes);
  for (double x : w.samples) {
    double clipped = std::clamp(x, -1.0, 1.0);
    auto v = static_cast<std::int16_t>(
        std::clamp<long>(std::lround(clipped * 32768.0), -32768L, 32767L));
    unsigned char b[2] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 2);
  }
  if (!out.flush()) throw IoError("failed writing file: " + path);
}

}  // namespace emorec
