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

#ifndef EMOREC_AUDIO_H_
#define EMOREC_AUDIO_H_

#include <span>
#include <string>
#include <vector>

#include "emorec/common.h"

namespace emorec {

inline constexpr int kAnalysisRateHz = 16000;
inline constexpr int kFrameSamples = 640;   // 40 ms at 16 kHz
inline constexpr int kFrameHopSamples = 320;  // 20 ms shift
inline constexpr int kDefaultWindowMs = 240;

struct Waveform {
  std::vector<double> samples;  // amplitudes in [-1, 1]
  int sample_rate_hz = kAnalysisRateHz;
  int source_bit_depth = 0;  // 0 when synthesized / not file-backed

  double duration_ms() const {
    return 1000.0 * static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

// One per-token analysis window cut from a 16 kHz waveform. For the default
// 240 ms setting the window reads 260 ms (4160 samples) so that 12 full
// 40 ms frames at a 20 ms hop fit.
struct TokenWindow {
  std::string token_id;
  std::vector<double> samples;
  int padded_samples = 0;  // trailing zeros appended past end of recording

  double padding_fraction() const {
    return samples.empty() ? 0.0
                           : static_cast<double>(padded_samples) /
                                 static_cast<double>(samples.size());
  }
};

// A 40 ms view into a TokenWindow; index is 1-based, start_ms = 20*(n-1).
struct Frame {
  int index = 1;
  std::span<const double> samples;

  double start_ms() const { return 20.0 * (index - 1); }
};

// Number of samples a window of `window_ms` reads: window + one extra hop,
// so the final frame has its full 40 ms.
int window_read_samples(int window_ms);

// Number of 40 ms frames in such a window (12 for the default 240 ms).
int window_frame_count(int window_ms);

// Cuts the analysis window starting at round(onset_ms * 16). Throws
// ValidationError if the onset lies beyond the end of the recording;
// shortfall at the end is zero-padded and recorded in padded_samples.
TokenWindow extract_window(const Waveform& w, double onset_ms,
                           int window_ms = kDefaultWindowMs,
                           const std::string& token_id = "");

// Splits the window into 50%-overlapping 640-sample frames. Frame n covers
// samples [320*(n-1), 320*(n-1) + 640).
std::vector<Frame> frame_signal(const TokenWindow& tw);

}  // namespace emorec

#endif  // EMOREC_AUDIO_H_
