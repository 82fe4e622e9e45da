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
#include <random>

#include "doctest.h"
#include "emorec/resample.h"
#include "test_util.h"

using namespace emorec;

namespace {

Waveform make_44k(const std::vector<double>& samples) {
  Waveform w;
  w.sample_rate_hz = 44100;
  w.samples = samples;
  return w;
}

}  // namespace

TEST_CASE("16 kHz input passes through unchanged") {
  Waveform w;
  w.sample_rate_hz = 16000;
  w.samples = testutil::sine(500.0, 0.3, 4000, 16000.0);
  Waveform y = resample_16k(w);
  CHECK(y.sample_rate_hz == 16000);
  CHECK(y.samples == w.samples);
}

TEST_CASE("unsupported rates are rejected") {
  Waveform w;
  w.sample_rate_hz = 48000;
  w.samples.assign(100, 0.0);
  CHECK_THROWS_AS(resample_16k(w), ArgError);
}

TEST_CASE("1 kHz sine keeps its amplitude within 1% (single-bin DFT oracle)") {
  Waveform w = make_44k(testutil::sine(1000.0, 0.5, 44100, 44100.0));
  Waveform y = resample_16k(w);
  REQUIRE(y.samples.size() == 16000);
  // measure over an integer number of periods, away from the edges
  std::vector<double> mid(y.samples.begin() + 2000, y.samples.begin() + 10000);
  const double amp = testutil::dft_amplitude(mid, 1000.0, 16000.0);
  CHECK(amp == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("10 kHz sine is rejected to below 0.1% RMS (aliasing oracle)") {
  Waveform w = make_44k(testutil::sine(10000.0, 0.5, 44100, 44100.0));
  Waveform y = resample_16k(w);
  std::vector<double> mid(y.samples.begin() + 2000, y.samples.end() - 2000);
  const double rms_in = 0.5 / std::sqrt(2.0);
  CHECK(testutil::rms(mid) / rms_in <= 0.001);
}

TEST_CASE("passband ripple below 7 kHz is under 0.1 dB") {
  for (double f : {3000.0, 5000.0, 6500.0, 6900.0}) {
    Waveform w = make_44k(testutil::sine(f, 0.5, 44100, 44100.0));
    Waveform y = resample_16k(w);
    std::vector<double> mid(y.samples.begin() + 2000, y.samples.begin() + 10000);
    const double amp = testutil::dft_amplitude(mid, f, 16000.0);
    const double ripple_db = std::fabs(20.0 * std::log10(amp / 0.5));
    CHECK(ripple_db <= 0.1);
  }
}

TEST_CASE("resampling is linear to 1e-9") {
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  std::vector<double> xa(8820), xb(8820);
  for (std::size_t i = 0; i < xa.size(); ++i) {
    xa[i] = dist(gen);
    xb[i] = dist(gen);
  }
  const double a = 0.37, b = -1.21;
  std::vector<double> combo(xa.size());
  for (std::size_t i = 0; i < xa.size(); ++i) combo[i] = a * xa[i] + b * xb[i];

  Waveform ya = resample_16k(make_44k(xa));
  Waveform yb = resample_16k(make_44k(xb));
  Waveform yc = resample_16k(make_44k(combo));
  REQUIRE(ya.samples.size() == yc.samples.size());
  double max_err = 0.0;
  for (std::size_t i = 0; i < yc.samples.size(); ++i) {
    max_err = std::max(max_err, std::fabs(yc.samples[i] - a * ya.samples[i] -
                                          b * yb.samples[i]));
  }
  CHECK(max_err < 1e-9);
}

TEST_CASE("output length covers the input duration") {
  Waveform w = make_44k(std::vector<double>(441, 0.1));
  Waveform y = resample_16k(w);
  CHECK(y.samples.size() == 160);
  Waveform w2 = make_44k(std::vector<double>(442, 0.1));
  CHECK(resample_16k(w2).samples.size() == 161);
  Waveform empty = make_44k({});
  CHECK(resample_16k(empty).samples.empty());
}
