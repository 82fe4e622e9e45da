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

#include "emorec/voice_quality.h"

#include <algorithm>
#include <cmath>
#include <vector>

namespace emorec {

double periodicity(std::span<const double> frame) {
  const auto n = static_cast<int>(frame.size());
  if (n <= kMinPitchLag) return 0.0;
  double best = 0.0;
  bool any = false;
  const int max_lag = std::min(kMaxPitchLag, n - 1);
  // prefix energies let each lag's segment energies be O(1)
  std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
  for (int t = 0; t < n; ++t) {
    prefix[static_cast<std::size_t>(t) + 1] =
        prefix[static_cast<std::size_t>(t)] + frame[t] * frame[t];
  }
  if (prefix[static_cast<std::size_t>(n)] <= 0.0) return 0.0;
  for (int lag = kMinPitchLag; lag <= max_lag; ++lag) {
    double cross = 0.0;
    for (int t = 0; t + lag < n; ++t) cross += frame[t] * frame[t + lag];
    const double e0 = prefix[static_cast<std::size_t>(n - lag)];
    const double e1 = prefix[static_cast<std::size_t>(n)] -
                      prefix[static_cast<std::size_t>(lag)];
    if (e0 <= 0.0 || e1 <= 0.0) continue;
    const double r = cross / std::sqrt(e0 * e1);
    if (!any || r > best) {
      best = r;
      any = true;
    }
  }
  return any ? best : 0.0;
}

double peak_amplitude(std::span<const double> frame) {
  double peak = 0.0;
  for (double v : frame) peak = std::max(peak, std::fabs(v));
  return peak;
}

VariationSeries jitter(std::span<const double> f0_per_frame) {
  VariationSeries out;
  double sum = 0.0;
  int voiced = 0;
  for (double p : f0_per_frame) {
    if (p > 0.0) {
      sum += p;
      ++voiced;
    }
  }
  if (voiced < 2) return out;
  const double denom = sum / voiced;
  for (std::size_t i = 1; i < f0_per_frame.size(); ++i) {
    if (f0_per_frame[i] > 0.0 && f0_per_frame[i - 1] > 0.0) {
      out.values.push_back(std::fabs(f0_per_frame[i] - f0_per_frame[i - 1]) /
                           denom);
    }
  }
  if (out.values.empty()) return out;
  double total = 0.0;
  for (double v : out.values) total += v;
  out.mean = total / static_cast<double>(out.values.size());
  return out;
}

VariationSeries shimmer(std::span<const double> peak_per_frame) {
  VariationSeries out;
  const std::size_t n = peak_per_frame.size();
  if (n < 2) return out;
  double sum = 0.0;
  for (double a : peak_per_frame) sum += a;
  if (sum <= 0.0) return out;
  const double denom = sum / static_cast<double>(n);
  out.values.reserve(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    out.values.push_back(std::fabs(peak_per_frame[i] - peak_per_frame[i - 1]) /
                         denom);
  }
  double total = 0.0;
  for (double v : out.values) total += v;
  out.mean = total / static_cast<double>(out.values.size());
  return out;
}

}  // namespace emorec
