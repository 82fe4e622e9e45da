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

#include "emorec/audio.h"

#include <cmath>

#include "emorec/common.h"

namespace emorec {

int window_read_samples(int window_ms) {
  if (window_ms <= 0 || window_ms % 20 != 0) {
    throw ArgError("window_ms must be a positive multiple of 20");
  }
  return (window_ms + 20) * (kAnalysisRateHz / 1000);
}

int window_frame_count(int window_ms) {
  return (window_read_samples(window_ms) - kFrameSamples) / kFrameHopSamples +
         1;
}

TokenWindow extract_window(const Waveform& w, double onset_ms, int window_ms,
                           const std::string& token_id) {
  if (w.sample_rate_hz != kAnalysisRateHz) {
    throw ArgError("extract_window requires a 16 kHz waveform");
  }
  const int length = window_read_samples(window_ms);
  const auto start = static_cast<long long>(
      std::llround(onset_ms * (kAnalysisRateHz / 1000.0)));
  const auto n = static_cast<long long>(w.samples.size());
  if (start < 0 || start >= n) {
    throw ValidationError("onset " + format_g9(onset_ms) +
                          " ms lies beyond the end of the recording (" +
                          format_g9(w.duration_ms()) + " ms)");
  }
  TokenWindow tw;
  tw.token_id = token_id;
  tw.samples.resize(length, 0.0);
  const long long available = std::min<long long>(length, n - start);
  for (long long i = 0; i < available; ++i) {
    tw.samples[static_cast<std::size_t>(i)] =
        w.samples[static_cast<std::size_t>(start + i)];
  }
  tw.padded_samples = static_cast<int>(length - available);
  return tw;
}

std::vector<Frame> frame_signal(const TokenWindow& tw) {
  const auto n = static_cast<int>(tw.samples.size());
  if (n < kFrameSamples || (n - kFrameSamples) % kFrameHopSamples != 0) {
    throw ArgError("token window length is not frame-aligned");
  }
  const int count = (n - kFrameSamples) / kFrameHopSamples + 1;
  std::vector<Frame> frames;
  frames.reserve(count);
  for (int k = 0; k < count; ++k) {
    Frame f;
    f.index = k + 1;
    f.samples = std::span<const double>(tw.samples)
                    .subspan(static_cast<std::size_t>(k) * kFrameHopSamples,
                             kFrameSamples);
    frames.push_back(f);
  }
  return frames;
}

}  // namespace emorec
