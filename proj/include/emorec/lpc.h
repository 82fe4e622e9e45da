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

#ifndef EMOREC_LPC_H_
#define EMOREC_LPC_H_

#include <span>
#include <vector>

namespace emorec {

struct Formants {
  double f1_hz = 0.0;
  double f2_hz = 0.0;
  double f3_hz = 0.0;
};

// Levinson-Durbin on autocorrelation values r[0..order]. Returns the
// prediction polynomial A(z) = 1 + a[1] z^-1 + ... + a[order] z^-order as
// coefficients a[0..order] with a[0] = 1. r[0] <= 0 yields the trivial
// polynomial (all-zero input).
std::vector<double> levinson_durbin(std::span<const double> r, int order);

// First three formants of a 640-sample frame: pre-emphasis 0.97, Hamming
// window, order-18 autocorrelation LPC, polynomial roots; roots with
// positive angle, 90 Hz < f < fs/2 - 90, and bandwidth < 400 Hz qualify,
// sorted ascending. Missing formants are reported as 0.
Formants lpc_formants(std::span<const double> frame, int sample_rate_hz = 16000);

}  // namespace emorec

#endif  // EMOREC_LPC_H_
