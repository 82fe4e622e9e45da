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

#ifndef EMOREC_WAV_H_
#define EMOREC_WAV_H_

#include <string>

#include "emorec/audio.h"

namespace emorec {

// Decodes a PCM RIFF/WAVE file (16- or 24-bit). `channel` selects one
// channel of a multi-channel file (0-based); pass -1 for mono input.
// A multi-channel file with channel < 0 is rejected as ambiguous.
// 16-bit samples normalize by 1/32768, 24-bit by 1/8388608.
Waveform decode_wav(const std::string& path, int channel = -1);

// Writes mono 16-bit PCM. Samples are clipped to [-1, 1] and rounded.
void write_wav_16bit(const std::string& path, const Waveform& w);

}  // namespace emorec

#endif  // EMOREC_WAV_H_
