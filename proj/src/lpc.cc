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

#include "emorec/lpc.h"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "emorec/common.h"

namespace emorec {

namespace {

constexpr int kLpcOrder = 18;        // 2 + fs/1000 at 16 kHz
constexpr double kPreEmphasis = 0.97;
constexpr double kMaxBandwidthHz = 400.0;
constexpr double kFreqMarginHz = 90.0;

std::vector<std::complex<double>> polynomial_roots(
    const std::vector<double>& a) {
  // a holds [1, a1, .., ap]; trim exact trailing zeros (roots at z = 0
  // carry no formant information).
  std::size_t degree = a.size() - 1;
  while (degree > 0 && a[degree] == 0.0) --degree;
  if (degree == 0) return {};
  Eigen::MatrixXd companion =
      Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(degree),
                            static_cast<Eigen::Index>(degree));
  for (std::size_t i = 0; i < degree; ++i) {
    companion(0, static_cast<Eigen::Index>(i)) = -a[i + 1] / a[0];
  }
  for (std::size_t i = 1; i < degree; ++i) {
    companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) =
        1.0;
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  std::vector<std::complex<double>> roots(degree);
  for (std::size_t i = 0; i < degree; ++i) {
    roots[i] = solver.eigenvalues()(static_cast<Eigen::Index>(i));
  }
  return roots;
}

}  // namespace

std::vector<double> levinson_durbin(std::span<const double> r, int order) {
  std::vector<double> a(static_cast<std::size_t>(order) + 1, 0.0);
  a[0] = 1.0;
  if (static_cast<int>(r.size()) < order + 1) {
    throw ArgError("levinson_durbin needs order+1 autocorrelation values");
  }
  if (r[0] <= 0.0) return a;
  double err = r[0];
  for (int i = 1; i <= order; ++i) {
    double acc = r[static_cast<std::size_t>(i)];
    for (int j = 1; j < i; ++j) {
      acc += a[static_cast<std::size_t>(j)] * r[static_cast<std::size_t>(i - j)];
    }
    const double k = -acc / err;
    for (int j = 1; j <= i / 2; ++j) {
      const double tmp = a[static_cast<std::size_t>(j)] +
                         k * a[static_cast<std::size_t>(i - j)];
      a[static_cast<std::size_t>(i - j)] += k * a[static_cast<std::size_t>(j)];
      a[static_cast<std::size_t>(j)] = tmp;
    }
    a[static_cast<std::size_t>(i)] = k;
    err *= (1.0 - k * k);
    if (err <= 0.0) break;  // perfectly predictable; stop at this order
  }
  return a;
}

Formants lpc_formants(std::span<const double> frame, int sample_rate_hz) {
  const std::size_t n = frame.size();
  Formants out;
  if (n == 0) return out;

  std::vector<double> x(n);
  x[0] = frame[0];
  for (std::size_t t = 1; t < n; ++t) {
    x[t] = frame[t] - kPreEmphasis * frame[t - 1];
  }
  for (std::size_t t = 0; t < n; ++t) {
    const double w =
        0.54 - 0.46 * std::cos(2.0 * M_PI * static_cast<double>(t) /
                               static_cast<double>(n - 1));
    x[t] *= w;
  }

  std::vector<double> r(kLpcOrder + 1, 0.0);
  for (int lag = 0; lag <= kLpcOrder; ++lag) {
    double acc = 0.0;
    for (std::size_t t = lag; t < n; ++t) acc += x[t] * x[t - lag];
    r[static_cast<std::size_t>(lag)] = acc;
  }
  if (r[0] <= 0.0) return out;  // degenerate frame
  r[0] *= 1.0 + 1e-9;           // guards near-singular autocorrelation

  const std::vector<double> a = levinson_durbin(r, kLpcOrder);
  const double fs = static_cast<double>(sample_rate_hz);
  std::vector<double> freqs;
  for (const auto& root : polynomial_roots(a)) {
    if (root.imag() <= 0.0) continue;
    const double mag = std::abs(root);
    if (mag <= 0.0) continue;
    const double freq = std::atan2(root.imag(), root.real()) * fs / (2.0 * M_PI);
    const double bw = -fs / M_PI * std::log(mag);
    if (freq > kFreqMarginHz && freq < fs / 2.0 - kFreqMarginHz &&
        bw < kMaxBandwidthHz) {
      freqs.push_back(freq);
    }
  }
  std::sort(freqs.begin(), freqs.end());
  if (freqs.size() > 0) out.f1_hz = freqs[0];
  if (freqs.size() > 1) out.f2_hz = freqs[1];
  if (freqs.size() > 2) out.f3_hz = freqs[2];
  return out;
}

}  // namespace emorec
