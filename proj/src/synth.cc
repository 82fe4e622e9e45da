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

#include "emorec/synth.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "emorec/common.h"
#include "emorec/csv.h"
#include "emorec/wav.h"
#include "json.hpp"

namespace emorec {

namespace {

constexpr double kLeadInMs = 100.0;   // resonator warm-up, discarded
constexpr double kTokenSpacingMs = 300.0;
constexpr double kSessionTailMs = 400.0;

void apply_resonator(std::vector<double>& x, const ResonatorSpec& res,
                     double fs) {
  const double r = std::exp(-M_PI * res.bandwidth_hz / fs);
  const double theta = 2.0 * M_PI * res.freq_hz / fs;
  const double a1 = 2.0 * r * std::cos(theta);
  const double a2 = -r * r;
  // unity gain at the resonance frequency
  const double gain =
      (1.0 - r) * std::sqrt(1.0 - 2.0 * r * std::cos(2.0 * theta) + r * r);
  double y1 = 0.0, y2 = 0.0;
  for (double& v : x) {
    const double y0 = gain * v + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = y0;
    v = y0;
  }
}

}  // namespace

Waveform gen_voiced(const VoiceSpec& spec) {
  if (spec.f0_hz < 66.0 || spec.f0_hz > 400.0) {
    throw ArgError("voice f0 must lie in [66, 400] Hz");
  }
  if (spec.f0_jitter_frac < 0.0 || spec.f0_jitter_frac > 0.2 ||
      spec.amp_shimmer_frac < 0.0 || spec.amp_shimmer_frac > 0.2) {
    throw ArgError("perturbation fractions must lie in [0, 0.2]");
  }
  const double fs = kAnalysisRateHz;
  const auto lead = static_cast<std::size_t>(kLeadInMs / 1000.0 * fs);
  const auto keep = static_cast<std::size_t>(spec.duration_ms / 1000.0 * fs);
  const std::size_t total = lead + keep;

  Rng rng(spec.seed);
  std::vector<double> x(total, 0.0);
  double pos = 0.0;
  const double base_period = fs / spec.f0_hz;
  while (pos < static_cast<double>(total)) {
    const double a = 1.0 + spec.amp_shimmer_frac * rng.next_symmetric();
    const auto idx = static_cast<std::size_t>(std::llround(pos));
    if (idx < total) x[idx] += a;
    pos += base_period * (1.0 + spec.f0_jitter_frac * rng.next_symmetric());
  }
  for (const auto& res : spec.formants) apply_resonator(x, res, fs);

  Waveform w;
  w.sample_rate_hz = kAnalysisRateHz;
  w.samples.assign(x.begin() + static_cast<std::ptrdiff_t>(lead), x.end());

  double peak = 0.0;
  for (double v : w.samples) peak = std::max(peak, std::fabs(v));
  if (peak > 0.0) {
    const double scale = spec.amp / peak;
    for (double& v : w.samples) v *= scale;
  }
  if (spec.noise_snr_db) {
    double rms = 0.0;
    for (double v : w.samples) rms += v * v;
    rms = std::sqrt(rms / static_cast<double>(w.samples.size()));
    const double noise_std = rms * std::pow(10.0, -*spec.noise_snr_db / 20.0);
    for (double& v : w.samples) v += noise_std * rng.next_gaussian();
  }
  for (double& v : w.samples) v = std::clamp(v, -1.0, 1.0);
  return w;
}

CorpusFiles gen_corpus(const CorpusSpec& spec, const std::string& out_dir) {
  if (spec.classes.empty()) throw ArgError("corpus spec has no classes");
  if (spec.sessions.count < 1) throw ArgError("corpus needs >= 1 session");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create directory: " + out_dir);

  const int n_sessions = spec.sessions.count;
  auto offset_db = [&](int s) {
    return s < static_cast<int>(spec.sessions.gain_db_offset.size())
               ? spec.sessions.gain_db_offset[static_cast<std::size_t>(s)]
               : 0.0;
  };
  auto std_mult = [&](int s) {
    return s < static_cast<int>(spec.sessions.gain_std_mult.size())
               ? spec.sessions.gain_std_mult[static_cast<std::size_t>(s)]
               : 1.0;
  };

  struct Token {
    int session = 0;
    double onset_ms = 0.0;
    Emotion label = Emotion::kNeutral;
    Waveform audio;
  };

  // Round-robin assignment of each class's tokens across sessions keeps
  // every batch populated with every class.
  std::vector<std::vector<Token>> by_session(
      static_cast<std::size_t>(n_sessions));
  Rng rng(spec.seed);
  std::uint64_t token_index = 0;
  for (const auto& cls : spec.classes) {
    if (cls.count < 1) throw ArgError("class counts must be >= 1");
    for (long long i = 0; i < cls.count; ++i, ++token_index) {
      const int s = static_cast<int>(token_index % n_sessions);
      VoiceSpec vs;
      vs.f0_hz = cls.f0_low_hz +
                 (cls.f0_high_hz - cls.f0_low_hz) * rng.next_unit();
      vs.f0_jitter_frac = cls.f0_jitter_frac;
      vs.amp_shimmer_frac = cls.amp_shimmer_frac;
      vs.formants = cls.formants;
      vs.noise_snr_db = cls.noise_snr_db;
      vs.duration_ms = cls.duration_ms;
      vs.seed = derive_seed(spec.seed, token_index + 1);
      const double gain_db = offset_db(s) + spec.sessions.gain_std_db *
                                                std_mult(s) *
                                                rng.next_gaussian();
      vs.amp = std::min(0.98, cls.amp * std::pow(10.0, gain_db / 20.0));
      Token tok;
      tok.session = s;
      tok.label = cls.label;
      tok.audio = gen_voiced(vs);
      by_session[static_cast<std::size_t>(s)].push_back(std::move(tok));
    }
  }

  CorpusFiles files;
  files.transcript_path =
      (std::filesystem::path(out_dir) / "transcript.csv").string();
  files.codes_path = (std::filesystem::path(out_dir) / "codes.csv").string();
  std::ofstream transcript(files.transcript_path);
  std::ofstream codes(files.codes_path);
  if (!transcript || !codes) {
    throw IoError("cannot write corpus CSVs in " + out_dir);
  }
  transcript << "speaker_id,session_id,word,onset_ms\n";
  codes << "speaker_id,session_id,t0_ms,t1_ms,emotion,intensity\n";

  long long word_counter = 0;
  for (int s = 0; s < n_sessions; ++s) {
    auto& tokens = by_session[static_cast<std::size_t>(s)];
    const std::string session_id = "s" + std::to_string(s + 1);
    const double session_ms =
        kTokenSpacingMs * static_cast<double>(tokens.size()) + kSessionTailMs;
    Waveform session_audio;
    session_audio.sample_rate_hz = kAnalysisRateHz;
    session_audio.samples.assign(
        static_cast<std::size_t>(session_ms / 1000.0 * kAnalysisRateHz), 0.0);

    for (std::size_t k = 0; k < tokens.size(); ++k) {
      Token& tok = tokens[k];
      tok.onset_ms = kTokenSpacingMs * static_cast<double>(k);
      const auto start = static_cast<std::size_t>(tok.onset_ms / 1000.0 *
                                                  kAnalysisRateHz);
      for (std::size_t i = 0; i < tok.audio.samples.size(); ++i) {
        session_audio.samples[start + i] += tok.audio.samples[i];
      }
      ++word_counter;
      transcript << spec.speaker_id << ',' << session_id << ",w"
                 << word_counter << ',' << format_g9(tok.onset_ms) << "\n";
      codes << spec.speaker_id << ',' << session_id << ','
            << format_g9(tok.onset_ms) << ','
            << format_g9(tok.onset_ms + kTokenSpacingMs) << ','
            << emotion_name(tok.label) << ",Medium\n";
      ++files.n_tokens;
    }
    const std::string wav_path =
        (std::filesystem::path(out_dir) / (session_id + ".wav")).string();
    write_wav_16bit(wav_path, session_audio);
    files.wav_paths.push_back(wav_path);
  }
  if (!transcript.flush() || !codes.flush()) {
    throw IoError("failed writing corpus CSVs in " + out_dir);
  }
  return files;
}

CorpusSpec corpus_spec_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("corpus spec: ") + e.what());
  }
  CorpusSpec spec;
  spec.seed = j.value("seed", 0ULL);
  spec.speaker_id = j.value("speaker_id", "S");
  if (j.contains("sessions")) {
    const auto& s = j.at("sessions");
    spec.sessions.count = s.value("count", 1);
    spec.sessions.gain_db_offset =
        s.value("gain_db_offset", std::vector<double>{});
    spec.sessions.gain_std_mult =
        s.value("gain_std_mult", std::vector<double>{});
    spec.sessions.gain_std_db = s.value("gain_std_db", 1.0);
  }
  if (!j.contains("classes")) throw ParseError("corpus spec: missing classes");
  for (const auto& c : j.at("classes")) {
    ClassSpec cls;
    cls.label = parse_emotion(c.at("label").get<std::string>());
    cls.count = c.at("count").get<long long>();
    if (c.contains("f0_hz")) {
      if (c.at("f0_hz").is_array()) {
        cls.f0_low_hz = c.at("f0_hz").at(0).get<double>();
        cls.f0_high_hz = c.at("f0_hz").at(1).get<double>();
      } else {
        cls.f0_low_hz = cls.f0_high_hz = c.at("f0_hz").get<double>();
      }
    }
    cls.f0_jitter_frac = c.value("f0_jitter_frac", 0.0);
    cls.amp = c.value("amp", 0.5);
    cls.amp_shimmer_frac = c.value("amp_shimmer_frac", 0.0);
    if (c.contains("formants")) {
      for (const auto& f : c.at("formants")) {
        ResonatorSpec res;
        res.freq_hz = f.at(0).get<double>();
        res.bandwidth_hz = f.at(1).get<double>();
        cls.formants.push_back(res);
      }
    }
    if (c.contains("noise_snr_db") && !c.at("noise_snr_db").is_null()) {
      cls.noise_snr_db = c.at("noise_snr_db").get<double>();
    }
    cls.duration_ms = c.value("duration_ms", 280.0);
    spec.classes.push_back(std::move(cls));
  }
  return spec;
}

CorpusSpec read_corpus_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  try {
    return corpus_spec_from_json(text);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace emorec
