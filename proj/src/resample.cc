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

#include "emorec/resample.h"

#include <cmath>
#include <mutex>
#include <vector>

#include "emorec/common.h"

namespace emorec {

namespace {

// 44100 -> 16000 is the rational ratio 160/441.
constexpr int kUpFactor = 160;
constexpr int kDownFactor = 441;
constexpr int kSourceRateHz = 44100;

// Filter design targets: pass below 7 kHz, stop at 8 kHz, 70 dB.
constexpr double kCutoffHz = 7500.0;
constexpr double kTransitionHz = 1000.0;
constexpr double kStopbandDb = 70.0;

double bessel_i0(double x) {
  // Power series; converges quickly for the beta values used here.
  double sum = 1.0, term = 1.0;
  const double half_x = x / 2.0;
  for (int m = 1; m < 200; ++m) {
    term *= (half_x / m) * (half_x / m);
    sum += term;
    if (term < sum * 1e-21) break;
  }
  return sum;
}

struct Kernel {
  std::vector<double> taps;
  long long center = 0;
};

// Kaiser-windowed sinc prototype at the virtual rate 44100 * 160, scaled by
// the upsampling factor so passband gain is unity.
const Kernel& kernel() {
  static Kernel k;
  static std::once_flag once;
  std::call_once(once, [] {
    const double fs_up = static_cast<double>(kSourceRateHz) * kUpFactor;
    const double beta = 0.1102 * (kStopbandDb - 8.7);
    const double delta_omega = 2.0 * M_PI * kTransitionHz / fs_up;
    auto n = static_cast<long long>(
        std::ceil((kStopbandDb - 7.95) / (2.285 * delta_omega)));
    if (n % 2 == 0) ++n;  // symmetric, integer group delay
    k.center = (n - 1) / 2;
    k.taps.resize(static_cast<std::size_t>(n));
    const double i0_beta = bessel_i0(beta);
    const double scale = 2.0 * kCutoffHz / fs_up;
    for (long long i = 0; i < n; ++i) {
      const double t = static_cast<double>(i - k.center);
      const double x = scale * t;
      const double sinc = x == 0.0 ? 1.0 : std::sin(M_PI * x) / (M_PI * x);
      const double r = t / static_cast<double>(k.center);
      const double window = bessel_i0(beta * std::sqrt(1.0 - r * r)) / i0_beta;
      k.taps[static_cast<std::size_t>(i)] = kUpFactor * scale * sinc * window;
    }
  });
  return k;
}

}  // namespace

Waveform resample_16k(const Waveform& w) {
  if (w.sample_rate_hz == kAnalysisRateHz) return w;
  if (w.sample_rate_hz != kSourceRateHz) {
    throw ArgError("unsupported input sample rate " +
                   std::to_string(w.sample_rate_hz) +
                   " (expected 44100 or 16000)");
  }
  const Kernel& k = kernel();
  const auto n_in = static_cast<long long>(w.samples.size());
  const long long n_out =
      (n_in * kUpFactor + kDownFactor - 1) / kDownFactor;

  Waveform out;
  out.sample_rate_hz = kAnalysisRateHz;
  out.source_bit_depth = w.source_bit_depth;
  out.samples.resize(static_cast<std::size_t>(std::max<long long>(n_out, 0)));

  const auto n_taps = static_cast<long long>(k.taps.size());
  for (long long j = 0; j < n_out; ++j) {
    // Evaluate the interpolated signal at high-rate index j*M, with the
    // filter's group delay folded in so output stays time-aligned.
    const long long u = j * kDownFactor + k.center;
    const long long phase = u % kUpFactor;
    const long long base = u / kUpFactor;
    double acc = 0.0;
    for (long long tap = phase; tap < n_taps; tap += kUpFactor) {
      const long long src = base - (tap - phase) / kUpFactor;
      if (src < 0) break;  // taps walk src downward; done once below zero
      if (src >= n_in) continue;
      acc += k.taps[static_cast<std::size_t>(tap)] *
             w.samples[static_cast<std::size_t>(src)];
    }
    out.samples[static_cast<std::size_t>(j)] = acc;
  }
  return out;
}

}  // namespace emorec
