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

#ifndef EMOREC_FFT_H_
#define EMOREC_FFT_H_

#include <complex>
#include <span>
#include <vector>

namespace emorec {

// In-place iterative radix-2 FFT. data.size() must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& data, bool inverse = false);

// Amplitude spectrum |X[k]| for k = 0..n/2 of the zero-padded input.
// n must be a power of two >= x.size().
std::vector<double> amplitude_spectrum(std::span<const double> x, std::size_t n);

}  // namespace emorec

#endif  // EMOREC_FFT_H_
