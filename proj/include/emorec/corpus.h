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

#ifndef EMOREC_CORPUS_H_
#define EMOREC_CORPUS_H_

#include <map>
#include <string>
#include <vector>

#include "emorec/common.h"
#include "emorec/emotion.h"

namespace emorec {

// A transcribed word with its onset time in the session recording.
struct WordOnset {
  std::string speaker_id;
  std::string session_id;
  std::string word;
  double onset_ms = 0.0;
};

// A coder-supplied emotion interval [t0, t1). Intervals never overlap for
// one speaker within one session.
struct EmotionInterval {
  std::string speaker_id;
  std::string session_id;
  double t0_ms = 0.0;
  double t1_ms = 0.0;
  Emotion emotion = Emotion::kNeutral;
  Intensity intensity = Intensity::kUnspecified;
};

// A word token carrying exactly one emotion label. duration_ms is the gap
// to the next word from the same speaker in the same session; -1 for the
// last word, where no next onset exists.
struct EmotionToken {
  std::string token_id;
  std::string speaker_id;
  std::string session_id;
  std::string word;
  double onset_ms = 0.0;
  double duration_ms = -1.0;
  Emotion emotion = Emotion::kNeutral;
  Intensity intensity = Intensity::kUnspecified;
};

// Duration histogram plus per-emotion counts over a token list.
struct TokenStats {
  int bin_ms = 0;
  std::vector<long long> histogram;  // bin k counts durations in [k*bin, (k+1)*bin)
  std::map<std::string, std::map<Emotion, long long>> counts_by_speaker;
  std::map<Emotion, long long> counts_total;
  long long n_tokens = 0;
  long long n_with_duration = 0;  // tokens with duration >= 0
  double fraction_le_240ms = 0.0; // of tokens with defined duration
};

// Reads a transcript CSV (header: speaker_id,session_id,word,onset_ms).
// Onsets must be strictly increasing per speaker within a session.
std::vector<WordOnset> parse_transcript(const std::string& path);

// Reads an emotion-code CSV (header: speaker_id,session_id,t0_ms,t1_ms,
// emotion[,intensity]). A missing intensity column reads as Unspecified.
// Intervals are validated for per-speaker/per-session non-overlap.
std::vector<EmotionInterval> parse_emotion_codes(const std::string& path);

// Labels every word with exactly one emotion. Intervals are half-open
// [t0, t1); a word whose onset matches no interval is Neutral. Tokens keep
// the input word order. token_id is <session_id>:<speaker_id>:<ordinal>,
// ordinal 1-based and zero-padded to 6 digits.
std::vector<EmotionToken> assign_emotions(
    const std::vector<WordOnset>& words,
    const std::vector<EmotionInterval>& codes);

TokenStats token_stats(const std::vector<EmotionToken>& tokens, int bin_ms);

// Words whose onset falls outside every coded interval (they default to
// Neutral); reported in output metadata.
long long count_words_outside_intervals(
    const std::vector<WordOnset>& words,
    const std::vector<EmotionInterval>& codes);

// Token CSV round-trip (header: token_id,speaker_id,session_id,word,
// onset_ms,duration_ms,emotion,intensity).
void write_tokens_csv(const std::vector<EmotionToken>& tokens,
                      const std::string& path);
std::vector<EmotionToken> read_tokens_csv(const std::string& path);

}  // namespace emorec

#endif  // EMOREC_CORPUS_H_
