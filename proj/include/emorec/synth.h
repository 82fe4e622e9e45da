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

#ifndef EMOREC_SYNTH_H_
#define EMOREC_SYNTH_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "emorec/audio.h"
#include "emorec/emotion.h"

namespace emorec {

// Source-filter voice synthesis: an impulse train with controllable
// cycle-to-cycle period and amplitude perturbation drives a cascade of
// second-order resonators. Ground truth for the F0, formant, jitter and
// shimmer estimators is therefore known by construction.

struct ResonatorSpec {
  double freq_hz = 0.0;
  double bandwidth_hz = 100.0;
};

struct VoiceSpec {
  double f0_hz = 120.0;              // must sit in [66, 400]
  double f0_jitter_frac = 0.0;       // cycle-to-cycle period perturbation
  double amp = 0.5;                  // target peak amplitude
  double amp_shimmer_frac = 0.0;     // cycle-to-cycle amplitude perturbation
  std::vector<ResonatorSpec> formants;  // up to 3
  std::optional<double> noise_snr_db;   // absent = no noise
  double duration_ms = 280.0;
  std::uint64_t seed = 0;
};

// Deterministic per seed. The resonators warm up on a discarded lead-in so
// the returned signal is in steady state from its first sample.
Waveform gen_voiced(const VoiceSpec& spec);

struct ClassSpec {
  Emotion label = Emotion::kNeutral;
  long long count = 1;
  double f0_low_hz = 110.0;   // per-token F0 drawn uniformly from this range
  double f0_high_hz = 130.0;
  double f0_jitter_frac = 0.0;
  double amp = 0.5;
  double amp_shimmer_frac = 0.0;
  std::vector<ResonatorSpec> formants;
  std::optional<double> noise_snr_db;
  double duration_ms = 280.0;
};

struct SessionSpec {
  int count = 1;
  std::vector<double> gain_db_offset;   // additive batch effect, per session
  std::vector<double> gain_std_mult;    // multiplicative batch effect
  double gain_std_db = 1.0;             // base per-token gain spread
};

struct CorpusSpec {
  std::vector<ClassSpec> classes;
  SessionSpec sessions;
  std::string speaker_id = "S";
  std::uint64_t seed = 0;
};

struct CorpusFiles {
  std::vector<std::string> wav_paths;
  std::string transcript_path;
  std::string codes_path;
  long long n_tokens = 0;
};

// Emits per-session WAVs (16-bit PCM, 16 kHz, named <session>.wav) plus
// matching transcript.csv and codes.csv into out_dir. Word onsets sit every
// 300 ms so 260 ms analysis windows never overlap the next token.
CorpusFiles gen_corpus(const CorpusSpec& spec, const std::string& out_dir);

// CorpusSpec JSON round-trip (the synth CLI input format).
CorpusSpec corpus_spec_from_json(const std::string& text);
CorpusSpec read_corpus_spec(const std::string& path);

}  // namespace emorec

#endif  // EMOREC_SYNTH_H_
