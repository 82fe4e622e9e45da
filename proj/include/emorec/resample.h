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

#ifndef EMOREC_RESAMPLE_H_
#define EMOREC_RESAMPLE_H_

#include "emorec/audio.h"

namespace emorec {

// Converts a 44.1 kHz waveform to 16 kHz with a Kaiser-windowed polyphase
// sinc filter (passband ripple < 0.01 dB below 7 kHz, stopband >= 70 dB at
// 8 kHz and above, group delay compensated). 16 kHz input is returned
// unchanged; any other rate throws ArgError.
Waveform resample_16k(const Waveform& w);

}  // namespace emorec

#endif  // EMOREC_RESAMPLE_H_
