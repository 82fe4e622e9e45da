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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdint>
#include <fstream>

#include "doctest.h"
#include "emorec/audio.h"
#include "emorec/wav.h"
#include "test_util.h"

using namespace emorec;
using testutil::TempDir;

namespace {

// Hand-rolled WAV writer so decode_wav is tested against independent bytes.
void write_raw_wav(const std::string& path, int rate, int bits, int channels,
                   const std::vector<std::int32_t>& interleaved) {
  std::ofstream out(path, std::ios::binary);
  const int bytes = bits / 8;
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(interleaved.size() * bytes);
  auto u32 = [&](std::uint32_t v) {
    char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8),
                 static_cast<char>(v >> 16), static_cast<char>(v >> 24)};
    out.write(b, 4);
  };
  auto u16 = [&](std::uint16_t v) {
    char b[2] = {static_cast<char>(v), static_cast<char>(v >> 8)};
    out.write(b, 2);
  };
  out.write("RIFF", 4);
  u32(36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  u32(16);
  u16(1);  // PCM
  u16(static_cast<std::uint16_t>(channels));
  u32(static_cast<std::uint32_t>(rate));
  u32(static_cast<std::uint32_t>(rate * channels * bytes));
  u16(static_cast<std::uint16_t>(channels * bytes));
  u16(static_cast<std::uint16_t>(bits));
  out.write("data", 4);
  u32(data_bytes);
  for (std::int32_t v : interleaved) {
    for (int b = 0; b < bytes; ++b) out.put(static_cast<char>(v >> (8 * b)));
  }
}

}  // namespace

TEST_CASE("16-bit samples normalize by 1/32768") {
  TempDir dir("wav16");
  write_raw_wav(dir.file("a.wav"), 16000, 16, 1, {16384, -32768, 0});
  Waveform w = decode_wav(dir.file("a.wav"));
  REQUIRE(w.samples.size() == 3);
  CHECK(w.samples[0] == doctest::Approx(0.5));
  CHECK(w.samples[1] == doctest::Approx(-1.0));
  CHECK(w.samples[2] == doctest::Approx(0.0));
  CHECK(w.sample_rate_hz == 16000);
  CHECK(w.source_bit_depth == 16);
}

TEST_CASE("24-bit full scale reaches about 1.0") {
  TempDir dir("wav24");
  write_raw_wav(dir.file("a.wav"), 44100, 24, 1, {8388607, -8388608});
  Waveform w = decode_wav(dir.file("a.wav"));
  REQUIRE(w.samples.size() == 2);
  CHECK(w.samples[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(w.samples[1] == doctest::Approx(-1.0));
  CHECK(w.source_bit_depth == 24);
}

TEST_CASE("stereo input requires an explicit channel") {
  TempDir dir("stereo");
  write_raw_wav(dir.file("a.wav"), 16000, 16, 2, {100, 200, 300, 400});
  CHECK_THROWS_AS(decode_wav(dir.file("a.wav")), ValidationError);
  Waveform left = decode_wav(dir.file("a.wav"), 0);
  Waveform right = decode_wav(dir.file("a.wav"), 1);
  CHECK(left.samples[0] == doctest::Approx(100.0 / 32768.0));
  CHECK(right.samples[0] == doctest::Approx(200.0 / 32768.0));
  CHECK_THROWS_AS(decode_wav(dir.file("a.wav"), 2), ValidationError);
}

TEST_CASE("compressed formats and odd depths are rejected") {
  TempDir dir("badwav");
  // format tag 3 (IEEE float)
  std::ofstream out(dir.file("f.wav"), std::ios::binary);
  out.write("RIFF", 4);
  std::uint32_t sz = 36;
  out.write(reinterpret_cast<char*>(&sz), 4);
  out.write("WAVEfmt ", 8);
  std::uint32_t fmtsz = 16;
  out.write(reinterpret_cast<char*>(&fmtsz), 4);
  std::uint16_t tag = 3, ch = 1, ba = 4, bits = 32;
  std::uint32_t rate = 16000, byps = 64000;
  out.write(reinterpret_cast<char*>(&tag), 2);
  out.write(reinterpret_cast<char*>(&ch), 2);
  out.write(reinterpret_cast<char*>(&rate), 4);
  out.write(reinterpret_cast<char*>(&byps), 4);
  out.write(reinterpret_cast<char*>(&ba), 2);
  out.write(reinterpret_cast<char*>(&bits), 2);
  out.write("data", 4);
  std::uint32_t dsz = 0;
  out.write(reinterpret_cast<char*>(&dsz), 4);
  out.close();
  CHECK_THROWS_AS(decode_wav(dir.file("f.wav")), ParseError);

  CHECK_THROWS_AS(decode_wav(dir.file("missing.wav")), IoError);
}

TEST_CASE("wav write/decode round-trip") {
  TempDir dir("rt");
  Waveform w;
  w.sample_rate_hz = 16000;
  w.samples = testutil::sine(440.0, 0.7, 1600, 16000.0);
  write_wav_16bit(dir.file("a.wav"), w);
  Waveform back = decode_wav(dir.file("a.wav"));
  REQUIRE(back.samples.size() == w.samples.size());
  double max_err = 0.0;
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    max_err = std::max(max_err, std::fabs(back.samples[i] - w.samples[i]));
  }
  CHECK(max_err < 1.0 / 32000.0);  // quantization only
}

TEST_CASE("extract_window cuts 4160 samples from the onset") {
  Waveform w;
  w.sample_rate_hz = 16000;
  w.samples.resize(16000);
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    w.samples[i] = static_cast<double>(i) / 16000.0;
  }
  TokenWindow tw = extract_window(w, 0.0);
  REQUIRE(tw.samples.size() == 4160);
  CHECK(tw.padded_samples == 0);
  CHECK(tw.samples[0] == doctest::Approx(0.0));
  CHECK(tw.samples[4159] == doctest::Approx(4159.0 / 16000.0));
}

TEST_CASE("extract_window zero-pads past end of recording") {
  Waveform w;
  w.sample_rate_hz = 16000;
  w.samples.assign(16000, 0.25);
  TokenWindow tw = extract_window(w, 990.0);
  REQUIRE(tw.samples.size() == 4160);
  CHECK(tw.padded_samples == 4000);
  CHECK(tw.samples[159] == doctest::Approx(0.25));
  CHECK(tw.samples[160] == doctest::Approx(0.0));
  CHECK(tw.padding_fraction() == doctest::Approx(4000.0 / 4160.0));
}

TEST_CASE("onset beyond the recording is an error") {
  Waveform w;
  w.sample_rate_hz = 16000;
  w.samples.assign(16000, 0.0);
  CHECK_THROWS_AS(extract_window(w, 1200.0), ValidationError);
  CHECK_THROWS_AS(extract_window(w, 1000.0), ValidationError);  // first sample past end
  CHECK_NOTHROW(extract_window(w, 999.9));
}

TEST_CASE("frames tile the window at 50% overlap") {
  Waveform w;
  w.sample_rate_hz = 16000;
  w.samples.resize(16000);
  for (std::size_t i = 0; i < w.samples.size(); ++i) {
    w.samples[i] = std::sin(0.001 * static_cast<double>(i));
  }
  TokenWindow tw = extract_window(w, 100.0);
  auto frames = frame_signal(tw);
  REQUIRE(frames.size() == 12);
  CHECK(frames[0].index == 1);
  CHECK(frames[0].start_ms() == doctest::Approx(0.0));
  CHECK(frames[11].start_ms() == doctest::Approx(220.0));
  for (std::size_t n = 0; n < 12; ++n) {
    REQUIRE(frames[n].samples.size() == 640);
    for (std::size_t t = 0; t < 640; ++t) {
      CHECK(frames[n].samples[t] == tw.samples[n * 320 + t]);
    }
  }
  // concatenating the even-indexed frames reconstructs the window except
  // the final hop
  std::vector<double> rebuilt;
  for (std::size_t n = 0; n < 12; n += 2) {
    rebuilt.insert(rebuilt.end(), frames[n].samples.begin(),
                   frames[n].samples.end());
  }
  REQUIRE(rebuilt.size() == 3840);
  for (std::size_t t = 0; t < rebuilt.size(); ++t) {
    CHECK(rebuilt[t] == tw.samples[t]);
  }
}

TEST_CASE("all-zero window frames to 12 zero frames") {
  TokenWindow tw;
  tw.samples.assign(4160, 0.0);
  auto frames = frame_signal(tw);
  REQUIRE(frames.size() == 12);
  for (const auto& f : frames) {
    for (double v : f.samples) CHECK(v == 0.0);
  }
}

TEST_CASE("extraction is byte-stable across runs") {
  Waveform w;
  w.sample_rate_hz = 16000;
  w.samples = testutil::sine(133.0, 0.4, 16000, 16000.0);
  TokenWindow a = extract_window(w, 123.0);
  TokenWindow b = extract_window(w, 123.0);
  CHECK(a.samples == b.samples);
  CHECK(a.padded_samples == b.padded_samples);
}
