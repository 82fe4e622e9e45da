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

#include "emorec/pitch.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "emorec/fft.h"
#include "emorec/voice_quality.h"

namespace emorec {

namespace {

constexpr std::size_t kFftSize = 8192;
// Log-frequency grid resolution: steps per octave. At 120 Hz one step is
// about 0.05 Hz, far below the estimator's tolerance.
constexpr double kStepsPerOctave = 1536.0;
constexpr int kMaxShifts = 32;
// Candidate axis extends an octave below the search floor (to catch peaks
// sitting at half of a low pitch) and a bit above twice the ceiling (so the
// octave-up check works for candidates near the top of the range).
constexpr double kOctaveTolerance = 0.08;  // width of the octave-up window

struct Peak {
  int index = -1;
  double value = 0.0;
};

Peak max_in(const std::vector<double>& v, int lo, int hi) {
  Peak p;
  for (int i = std::max(lo, 0); i <= std::min(hi, (int)v.size() - 1); ++i) {
    if (p.index < 0 || v[static_cast<std::size_t>(i)] > p.value) {
      p.index = i;
      p.value = v[static_cast<std::size_t>(i)];
    }
  }
  return p;
}

}  // namespace

double estimate_f0_shr(std::span<const double> frame, int sample_rate_hz,
                       double voicing_threshold) {
  if (frame.empty()) return 0.0;
  if (periodicity(frame) < voicing_threshold) return 0.0;

  // Hann-windowed, DC-removed amplitude spectrum.
  const std::size_t n = frame.size();
  double mean = 0.0;
  for (double v : frame) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> x(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * M_PI * static_cast<double>(t) /
                                          static_cast<double>(n - 1));
    x[t] = (frame[t] - mean) * w;
  }
  const std::vector<double> amp = amplitude_spectrum(x, kFftSize);
  const double bin_hz = static_cast<double>(sample_rate_hz) / kFftSize;
  const double nyquist = sample_rate_hz / 2.0;

  // Resample the spectrum onto a uniform log2-frequency grid.
  const double step = 1.0 / kStepsPerOctave;
  const double q_min = std::log2(kMinF0Hz / 2.0);
  const double q_max = std::log2(nyquist);
  const int grid_size = static_cast<int>((q_max - q_min) / step);
  std::vector<double> log_amp(static_cast<std::size_t>(grid_size), 0.0);
  for (int i = 0; i < grid_size; ++i) {
    const double f = std::exp2(q_min + i * step);
    const double pos = f / bin_hz;
    const auto k = static_cast<std::size_t>(pos);
    if (k + 1 >= amp.size()) break;
    const double frac = pos - static_cast<double>(k);
    log_amp[static_cast<std::size_t>(i)] =
        (1.0 - frac) * amp[k] + frac * amp[k + 1];
  }

  // Difference of harmonic and subharmonic comb sums on the log axis.
  // Candidates run from kMinF0Hz/2 up to ~2.1 * kMaxF0Hz so both octave
  // candidates of any in-range pitch are visible.
  const int cand_hi =
      static_cast<int>((std::log2(2.0 * kMaxF0Hz * 1.06) - q_min) / step);
  std::vector<double> da(static_cast<std::size_t>(
                             std::min(cand_hi + 1, grid_size)),
                         0.0);
  std::array<int, kMaxShifts> harm_off{};
  std::array<int, kMaxShifts> sub_off{};
  for (int h = 1; h <= kMaxShifts; ++h) {
    harm_off[static_cast<std::size_t>(h - 1)] =
        static_cast<int>(std::lround(std::log2(static_cast<double>(h)) / step));
    sub_off[static_cast<std::size_t>(h - 1)] =
        static_cast<int>(std::lround(std::log2(h - 0.5) / step));
  }
  for (int i = 0; i < static_cast<int>(da.size()); ++i) {
    double acc = 0.0;
    for (int h = 1; h <= kMaxShifts; ++h) {
      const int harm = i + harm_off[static_cast<std::size_t>(h - 1)];
      if (harm >= grid_size) break;  // harmonic beyond Nyquist
      acc += log_amp[static_cast<std::size_t>(harm)];
      const int sub = i + sub_off[static_cast<std::size_t>(h - 1)];
      if (sub >= 0 && sub < grid_size) {
        acc -= log_amp[static_cast<std::size_t>(sub)];
      }
    }
    da[static_cast<std::size_t>(i)] = acc;
  }

  // Global peak over [kMinF0Hz/2, kMaxF0Hz], then the local peak one octave
  // above it.
  const int search_hi = static_cast<int>((std::log2(kMaxF0Hz) - q_min) / step);
  const Peak p1 = max_in(da, 0, search_hi);
  if (p1.index < 0 || p1.value <= 0.0) return 0.0;

  const int octave = static_cast<int>(std::lround(1.0 / step));
  const int guard = static_cast<int>(std::lround(kOctaveTolerance / step));
  const Peak p2 = max_in(da, p1.index + octave - guard, p1.index + octave + guard);

  auto freq_at = [&](int idx) { return std::exp2(q_min + idx * step); };
  const double f_low = freq_at(p1.index);

  double f0;
  if (p2.index < 0 || p2.value <= 0.0) {
    f0 = f_low;
  } else {
    const double shr = (p1.value - p2.value) / (p1.value + p2.value);
    f0 = shr <= kShrThreshold ? freq_at(p2.index) : f_low;
  }
  // A winning half-pitch position below the search floor stands in for its
  // octave-up candidate.
  if (f0 < kMinF0Hz) f0 *= 2.0;
  if (f0 < kMinF0Hz || f0 > kMaxF0Hz) return 0.0;
  return f0;
}

}  // namespace emorec
