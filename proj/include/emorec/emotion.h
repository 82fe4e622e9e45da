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

#ifndef EMOREC_EMOTION_H_
#define EMOREC_EMOTION_H_

#include <array>
#include <string>

namespace emorec {

// Canonical label order; used for table columns, vote tie-breaks and any
// other place that needs a stable ordering of the classes.
enum class Emotion { kJoy = 0, kSadness, kTension, kAnger, kNeutral };

enum class Intensity { kLow = 0, kMedium, kHigh, kUnspecified };

inline constexpr int kNumEmotions = 5;

inline constexpr std::array<Emotion, kNumEmotions> kAllEmotions = {
    Emotion::kJoy, Emotion::kSadness, Emotion::kTension, Emotion::kAnger,
    Emotion::kNeutral};

const std::string& emotion_name(Emotion e);
const std::string& intensity_name(Intensity i);

// Throw ParseError on unknown labels.
Emotion parse_emotion(const std::string& name);
Intensity parse_intensity(const std::string& name);

}  // namespace emorec

#endif  // EMOREC_EMOTION_H_
