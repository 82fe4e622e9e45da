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

#ifndef EMOREC_PITCH_H_
#define EMOREC_PITCH_H_

#include <span>

namespace emorec {

inline constexpr double kMinF0Hz = 66.0;
inline constexpr double kMaxF0Hz = 400.0;
inline constexpr double kDefaultVoicingThreshold = 0.4;
inline constexpr double kShrThreshold = 0.4;

// Fundamental frequency of a 640-sample frame by the subharmonic-to-
// harmonic ratio method, searched over [66, 400] Hz. A frame whose
// periodicity falls below `voicing_threshold`, or whose spectrum offers no
// positive harmonic evidence, is reported unvoiced as 0.
//
// The method sums the log-frequency amplitude spectrum at harmonic
// positions (shifts of log2 n) and at subharmonic positions (shifts of
// log2(n - 1/2)). The difference of the two sums peaks at the pitch and,
// when subharmonics are present, one octave below it. The amplitude ratio
// of the two peaks decides between the octave candidates: a strong
// subharmonic sum selects the lower octave.
double estimate_f0_shr(std::span<const double> frame,
                       int sample_rate_hz = 16000,
                       double voicing_threshold = kDefaultVoicingThreshold);

}  // namespace emorec

#endif  // EMOREC_PITCH_H_
