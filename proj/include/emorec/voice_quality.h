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

#ifndef EMOREC_VOICE_QUALITY_H_
#define EMOREC_VOICE_QUALITY_H_

#include <span>
#include <vector>

namespace emorec {

// Pitch-period lag range at 16 kHz, covering 66..400 Hz.
inline constexpr int kMinPitchLag = 40;
inline constexpr int kMaxPitchLag = 242;

// Maximum of the normalized autocorrelation over lags [40, 242]. The
// normalization is the Cauchy-Schwarz one, r(tau) / sqrt(e0(tau) e1(tau))
// with e0/e1 the energies of the two overlapping segments, so the value is
// always in [-1, 1] and reaches 1 exactly for a frame that repeats with a
// period inside the lag range. An all-zero frame reports 0.
double periodicity(std::span<const double> frame);

// Largest absolute sample value of a frame.
double peak_amplitude(std::span<const double> frame);

// Per-pair values plus their mean for jitter/shimmer.
struct VariationSeries {
  std::vector<double> values;
  double mean = 0.0;
};

// Frame-to-frame F0 variation: |P_n - P_{n-1}| over the mean F0, computed
// for consecutive voiced pairs only (P > 0), with the mean taken over
// voiced frames. Fewer than two voiced frames yields an empty series with
// mean 0.
VariationSeries jitter(std::span<const double> f0_per_frame);

// Frame-to-frame peak-amplitude variation: |A_n - A_{n-1}| over the mean
// peak amplitude of all frames, for n = 2..N. All-zero amplitudes yield
// mean 0.
VariationSeries shimmer(std::span<const double> peak_per_frame);

}  // namespace emorec

#endif  // EMOREC_VOICE_QUALITY_H_
