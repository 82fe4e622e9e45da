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

#ifndef EMOREC_GAMMATONE_H_
#define EMOREC_GAMMATONE_H_

#include <array>
#include <span>
#include <vector>

#include "emorec/common.h"

namespace emorec {

inline constexpr int kNumBands = 16;

// Bank of 16 fourth-order gammatone band-pass filters with centers spaced
// on the ERB-rate scale across [50, 8000] Hz. Each filter is realized as a
// cascade of four second-order sections with unit gain at its center
// frequency. The bank itself is immutable and shareable; filtering carries
// its state in locals, so one bank can serve many threads.
class GammatoneBank {
 public:
  explicit GammatoneBank(int sample_rate_hz = 16000);

  int sample_rate_hz() const { return sample_rate_hz_; }

  // Center frequencies in ascending order; first >= 50, last <= 8000.
  const std::array<double, kNumBands>& center_freqs_hz() const {
    return centers_;
  }

  // ERB bandwidth in Hz of each filter (Glasberg-Moore).
  const std::array<double, kNumBands>& bandwidths_hz() const {
    return bandwidths_;
  }

  // Runs band `band` over the whole signal from zero state. Filters run
  // continuously across a token window; frame energies are then read from
  // the one output, so frame boundaries see no restart transients.
  std::vector<double> filter_band(int band, std::span<const double> x) const;

 private:
  // One second-order section: y[t] = b0 x[t] + b1 x[t-1] + b2 x[t-2]
  //                                  - a1 y[t-1] - a2 y[t-2]
  struct Biquad {
    double b0 = 0, b1 = 0, b2 = 0, a1 = 0, a2 = 0;
  };

  int sample_rate_hz_;
  std::array<double, kNumBands> centers_{};
  std::array<double, kNumBands> bandwidths_{};
  std::array<std::array<Biquad, 4>, kNumBands> sections_{};
};

// ERB in Hz at frequency f (Glasberg & Moore): 24.7 * (4.37 f / 1000 + 1).
double erb_hz(double freq_hz);

}  // namespace emorec

#endif  // EMOREC_GAMMATONE_H_
