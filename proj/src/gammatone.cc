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

#include "emorec/gammatone.h"

#include <algorithm>
#include <cmath>
#include <complex>

#include "emorec/common.h"

namespace emorec {

namespace {

// Glasberg-Moore constants on the ERB-rate scale.
constexpr double kEarQ = 9.26449;
constexpr double kMinBw = 24.7;
constexpr double kLowHz = 50.0;
constexpr double kHighHz = 8000.0;

// Digital 4th-order gammatone realized as four second-order sections, after
// the impulse-invariant design of Slaney's auditory filter bank. The four
// sections share the denominator; the numerators differ in their zero
// placement (the +/- sqrt(3 +/- 2^1.5) terms below).
struct Design {
  double a11, a12, a13, a14;  // per-section first numerator coefficient
  double b1, b2;              // shared denominator
  double t;                   // sample period (leading numerator coefficient)
  double gain;                // normalizes peak response at cf to unity
};

Design design_filter(double cf, double fs) {
  const double t = 1.0 / fs;
  const double b = 1.019 * 2.0 * M_PI * erb_hz(cf);
  const double theta = 2.0 * cf * M_PI * t;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double e_bt = std::exp(b * t);
  const double k_plus = std::sqrt(3.0 + std::pow(2.0, 1.5));
  const double k_minus = std::sqrt(3.0 - std::pow(2.0, 1.5));

  Design d;
  d.t = t;
  d.b1 = -2.0 * cos_t / e_bt;
  d.b2 = std::exp(-2.0 * b * t);
  d.a11 = -(2.0 * t * cos_t / e_bt + 2.0 * k_plus * t * sin_t / e_bt) / 2.0;
  d.a12 = -(2.0 * t * cos_t / e_bt - 2.0 * k_plus * t * sin_t / e_bt) / 2.0;
  d.a13 = -(2.0 * t * cos_t / e_bt + 2.0 * k_minus * t * sin_t / e_bt) / 2.0;
  d.a14 = -(2.0 * t * cos_t / e_bt - 2.0 * k_minus * t * sin_t / e_bt) / 2.0;

  // theta = 2 cf pi T, so exp(4 i cf pi T) = exp(2 i theta) and
  // exp(2 i cf pi T) = exp(i theta).
  const std::complex<double> i(0.0, 1.0);
  const std::complex<double> e4 = std::exp(2.0 * i * theta);
  const std::complex<double> em = std::exp(-b * t + i * theta);
  auto factor = [&](double kk) {
    return -2.0 * e4 * t + 2.0 * em * t * (cos_t + kk * sin_t);
  };
  const std::complex<double> numer = factor(-k_minus) * factor(k_minus) *
                                     factor(-k_plus) * factor(k_plus);
  const std::complex<double> denom = std::pow(
      -2.0 / std::exp(2.0 * b * t) - 2.0 * e4 + 2.0 * (1.0 + e4) / e_bt, 4.0);
  d.gain = std::abs(numer / denom);
  return d;
}

}  // namespace

double erb_hz(double freq_hz) { return kMinBw * (freq_hz / (kEarQ * kMinBw) + 1.0); }

GammatoneBank::GammatoneBank(int sample_rate_hz)
    : sample_rate_hz_(sample_rate_hz) {
  if (sample_rate_hz != 16000) {
    throw ArgError("gammatone bank expects the 16 kHz analysis rate");
  }
  // Centers equally spaced on the ERB-rate scale; index 0 lands exactly on
  // kLowHz and the top filter sits below kHighHz.
  const double c = kEarQ * kMinBw;
  const double span = -std::log(kHighHz + c) + std::log(kLowHz + c);
  for (int j = 0; j < kNumBands; ++j) {
    const int i = kNumBands - j;  // ascending order
    centers_[j] = -c + std::exp(i * span / kNumBands) * (kHighHz + c);
    // the bottom center is exactly kLowHz up to rounding; keep the invariant
    centers_[j] = std::clamp(centers_[j], kLowHz, kHighHz);
    bandwidths_[j] = erb_hz(centers_[j]);
  }
  const double fs = static_cast<double>(sample_rate_hz_);
  for (int bnd = 0; bnd < kNumBands; ++bnd) {
    const Design d = design_filter(centers_[bnd], fs);
    const double a1s[4] = {d.a11, d.a12, d.a13, d.a14};
    for (int s = 0; s < 4; ++s) {
      Biquad q;
      q.b0 = d.t;
      q.b1 = a1s[s];
      q.b2 = 0.0;
      q.a1 = d.b1;
      q.a2 = d.b2;
      if (s == 0) {  // fold the overall gain into the first section
        q.b0 /= d.gain;
        q.b1 /= d.gain;
      }
      sections_[bnd][s] = q;
    }
  }
}

std::vector<double> GammatoneBank::filter_band(int band,
                                               std::span<const double> x) const {
  if (band < 0 || band >= kNumBands) throw ArgError("band index out of range");
  std::vector<double> y(x.begin(), x.end());
  for (const Biquad& q : sections_[band]) {
    double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
    for (double& v : y) {
      const double x0 = v;
      const double y0 = q.b0 * x0 + q.b1 * x1 + q.b2 * x2 - q.a1 * y1 - q.a2 * y2;
      x2 = x1;
      x1 = x0;
      y2 = y1;
      y1 = y0;
      v = y0;
    }
  }
  return y;
}

}  // namespace emorec
