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

#include "emorec/emotion.h"

#include "emorec/common.h"

namespace emorec {

namespace {
const std::array<std::string, kNumEmotions> kEmotionNames = {
    "Joy", "Sadness", "Tension", "Anger", "Neutral"};
const std::array<std::string, 4> kIntensityNames = {"Low", "Medium", "High",
                                                    "Unspecified"};
}  // namespace

const std::string& emotion_name(Emotion e) {
  return kEmotionNames[static_cast<int>(e)];
}

const std::string& intensity_name(Intensity i) {
  return kIntensityNames[static_cast<int>(i)];
}

Emotion parse_emotion(const std::string& name) {
  for (int i = 0; i < kNumEmotions; ++i) {
    if (kEmotionNames[i] == name) return static_cast<Emotion>(i);
  }
  throw ParseError("unknown emotion label: \"" + name +
                   "\" (expected Joy, Sadness, Tension, Anger or Neutral)");
}

Intensity parse_intensity(const std::string& name) {
  for (std::size_t i = 0; i < kIntensityNames.size(); ++i) {
    if (kIntensityNames[i] == name) return static_cast<Intensity>(i);
  }
  throw ParseError("unknown intensity label: \"" + name +
                   "\" (expected Low, Medium, High or Unspecified)");
}

}  // namespace emorec
