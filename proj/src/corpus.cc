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

#include "emorec/corpus.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "emorec/common.h"
#include "emorec/csv.h"

namespace emorec {

namespace {

const char kTranscriptHeader[] = "speaker_id,session_id,word,onset_ms";
const char kCodesHeaderFull[] =
    "speaker_id,session_id,t0_ms,t1_ms,emotion,intensity";
const char kCodesHeaderNoIntensity[] =
    "speaker_id,session_id,t0_ms,t1_ms,emotion";
const char kTokensHeader[] =
    "token_id,speaker_id,session_id,word,onset_ms,duration_ms,emotion,"
    "intensity";

std::string join_fields(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += fields[i];
  }
  return out;
}

std::string location(const CsvReader& r) {
  return r.path() + ":" + std::to_string(r.line_number());
}

}  // namespace

std::vector<WordOnset> parse_transcript(const std::string& path) {
  CsvReader reader(path);
  std::vector<std::string> fields;
  std::vector<WordOnset> words;
  if (!reader.next(&fields)) return words;  // empty file -> empty list
  if (join_fields(fields) != kTranscriptHeader) {
    throw ParseError(location(reader) + ": expected header '" +
                     kTranscriptHeader + "'");
  }
  // last onset per (speaker, session), for the monotonicity check
  std::map<std::pair<std::string, std::string>, double> last_onset;
  while (reader.next(&fields)) {
    if (fields.size() != 4) {
      throw ParseError(location(reader) + ": expected 4 fields, got " +
                       std::to_string(fields.size()));
    }
    WordOnset w;
    w.speaker_id = fields[0];
    w.session_id = fields[1];
    w.word = fields[2];
    w.onset_ms = parse_double_field(fields[3], reader.path(),
                                    reader.line_number(), "onset_ms");
    if (w.speaker_id.empty() || w.session_id.empty()) {
      throw ParseError(location(reader) + ": empty speaker_id or session_id");
    }
    if (w.word.empty()) {
      throw ParseError(location(reader) + ": empty word");
    }
    if (w.onset_ms < 0.0 || !std::isfinite(w.onset_ms)) {
      throw ParseError(location(reader) + ": onset_ms must be >= 0");
    }
    auto key = std::make_pair(w.speaker_id, w.session_id);
    auto it = last_onset.find(key);
    if (it != last_onset.end() && w.onset_ms <= it->second) {
      throw ValidationError(
          location(reader) + ": onsets for speaker '" + w.speaker_id +
          "' in session '" + w.session_id + "' must be strictly increasing (" +
          format_g9(w.onset_ms) + " after " + format_g9(it->second) + ")");
    }
    last_onset[key] = w.onset_ms;
    words.push_back(std::move(w));
  }
  return words;
}

std::vector<EmotionInterval> parse_emotion_codes(const std::string& path) {
  CsvReader reader(path);
  std::vector<std::string> fields;
  std::vector<EmotionInterval> codes;
  if (!reader.next(&fields)) return codes;
  bool has_intensity;
  std::string header = join_fields(fields);
  if (header == kCodesHeaderFull) {
    has_intensity = true;
  } else if (header == kCodesHeaderNoIntensity) {
    has_intensity = false;
  } else {
    throw ParseError(location(reader) + ": expected header '" +
                     kCodesHeaderFull + "' (intensity column optional)");
  }
  std::size_t n_fields = has_intensity ? 6 : 5;
  while (reader.next(&fields)) {
    if (fields.size() != n_fields) {
      throw ParseError(location(reader) + ": expected " +
                       std::to_string(n_fields) + " fields, got " +
                       std::to_string(fields.size()));
    }
    EmotionInterval iv;
    iv.speaker_id = fields[0];
    iv.session_id = fields[1];
    iv.t0_ms = parse_double_field(fields[2], reader.path(),
                                  reader.line_number(), "t0_ms");
    iv.t1_ms = parse_double_field(fields[3], reader.path(),
                                  reader.line_number(), "t1_ms");
    try {
      iv.emotion = parse_emotion(fields[4]);
      iv.intensity = has_intensity ? parse_intensity(fields[5])
                                   : Intensity::kUnspecified;
    } catch (const ParseError& e) {
      throw ParseError(location(reader) + ": " + e.what());
    }
    if (!(iv.t0_ms < iv.t1_ms)) {
      throw ValidationError(location(reader) + ": requires t0_ms < t1_ms");
    }
    codes.push_back(std::move(iv));
  }

  // Non-overlap check per speaker/session: sort copies by t0 and compare
  // neighbours. Half-open intervals, so touching endpoints are fine.
  std::map<std::pair<std::string, std::string>, std::vector<const EmotionInterval*>>
      groups;
  for (const auto& iv : codes) {
    groups[{iv.speaker_id, iv.session_id}].push_back(&iv);
  }
  for (auto& [key, group] : groups) {
    std::sort(group.begin(), group.end(),
              [](const EmotionInterval* a, const EmotionInterval* b) {
                return a->t0_ms < b->t0_ms;
              });
    for (std::size_t i = 1; i < group.size(); ++i) {
      if (group[i]->t0_ms < group[i - 1]->t1_ms) {
        throw ValidationError(
            path + ": overlapping emotion intervals for speaker '" +
            key.first + "' in session '" + key.second + "': [" +
            format_g9(group[i - 1]->t0_ms) + "," +
            format_g9(group[i - 1]->t1_ms) + ") and [" +
            format_g9(group[i]->t0_ms) + "," + format_g9(group[i]->t1_ms) +
            ")");
      }
    }
  }
  return codes;
}

std::vector<EmotionToken> assign_emotions(
    const std::vector<WordOnset>& words,
    const std::vector<EmotionInterval>& codes) {
  using Key = std::pair<std::string, std::string>;

  // Sorted interval index per (speaker, session); lookups are independent
  // of the order codes arrived in.
  std::map<Key, std::vector<const EmotionInterval*>> intervals;
  for (const auto& iv : codes) {
    intervals[{iv.speaker_id, iv.session_id}].push_back(&iv);
  }
  for (auto& [key, group] : intervals) {
    std::sort(group.begin(), group.end(),
              [](const EmotionInterval* a, const EmotionInterval* b) {
                return a->t0_ms < b->t0_ms;
              });
  }

  // Next same-speaker onset within the session, for durations.
  std::map<Key, std::vector<std::size_t>> word_rows;
  for (std::size_t i = 0; i < words.size(); ++i) {
    word_rows[{words[i].speaker_id, words[i].session_id}].push_back(i);
  }

  std::vector<EmotionToken> tokens(words.size());
  for (auto& [key, rows] : word_rows) {
    const auto* group = intervals.count(key) ? &intervals.at(key) : nullptr;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const WordOnset& w = words[rows[k]];
      EmotionToken t;
      t.speaker_id = w.speaker_id;
      t.session_id = w.session_id;
      t.word = w.word;
      t.onset_ms = w.onset_ms;
      char ordinal[16];
      std::snprintf(ordinal, sizeof(ordinal), "%06zu", k + 1);
      t.token_id = w.session_id + ":" + w.speaker_id + ":" + ordinal;
      t.duration_ms = (k + 1 < rows.size())
                          ? words[rows[k + 1]].onset_ms - w.onset_ms
                          : -1.0;
      t.emotion = Emotion::kNeutral;
      t.intensity = Intensity::kUnspecified;
      if (group) {
        // Last interval with t0 <= onset; hit if onset < its t1.
        auto it = std::upper_bound(
            group->begin(), group->end(), w.onset_ms,
            [](double onset, const EmotionInterval* iv) {
              return onset < iv->t0_ms;
            });
        if (it != group->begin()) {
          const EmotionInterval* iv = *(it - 1);
          if (w.onset_ms < iv->t1_ms) {
            t.emotion = iv->emotion;
            t.intensity = iv->intensity;
          }
        }
      }
      tokens[rows[k]] = std::move(t);
    }
  }
  return tokens;
}

long long count_words_outside_intervals(
    const std::vector<WordOnset>& words,
    const std::vector<EmotionInterval>& codes) {
  std::map<std::pair<std::string, std::string>,
           std::vector<std::pair<double, double>>>
      spans;
  for (const auto& iv : codes) {
    spans[{iv.speaker_id, iv.session_id}].emplace_back(iv.t0_ms, iv.t1_ms);
  }
  for (auto& [key, group] : spans) std::sort(group.begin(), group.end());
  long long outside = 0;
  for (const auto& w : words) {
    auto it = spans.find({w.speaker_id, w.session_id});
    bool hit = false;
    if (it != spans.end()) {
      const auto& group = it->second;
      auto pos = std::upper_bound(
          group.begin(), group.end(), std::make_pair(w.onset_ms, 1e300));
      if (pos != group.begin()) {
        const auto& span = *(pos - 1);
        hit = w.onset_ms < span.second;
      }
    }
    if (!hit) ++outside;
  }
  return outside;
}

TokenStats token_stats(const std::vector<EmotionToken>& tokens, int bin_ms) {
  if (bin_ms <= 0) throw ArgError("bin_ms must be positive");
  if (tokens.empty()) throw ArgError("token_stats requires a non-empty list");
  TokenStats s;
  s.bin_ms = bin_ms;
  s.n_tokens = static_cast<long long>(tokens.size());
  long long n_le_240 = 0;
  for (const auto& t : tokens) {
    s.counts_by_speaker[t.speaker_id][t.emotion] += 1;
    s.counts_total[t.emotion] += 1;
    if (t.duration_ms < 0) continue;
    ++s.n_with_duration;
    if (t.duration_ms <= 240.0) ++n_le_240;
    auto bin = static_cast<std::size_t>(t.duration_ms / bin_ms);
    if (s.histogram.size() <= bin) s.histogram.resize(bin + 1, 0);
    s.histogram[bin] += 1;
  }
  s.fraction_le_240ms =
      s.n_with_duration > 0
          ? static_cast<double>(n_le_240) / static_cast<double>(s.n_with_duration)
          : 0.0;
  return s;
}

void write_tokens_csv(const std::vector<EmotionToken>& tokens,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path);
  out << kTokensHeader << "\n";
  for (const auto& t : tokens) {
    out << csv_escape(t.token_id) << ',' << csv_escape(t.speaker_id) << ','
        << csv_escape(t.session_id) << ',' << csv_escape(t.word) << ','
        << format_g9(t.onset_ms) << ',' << format_g9(t.duration_ms) << ','
        << emotion_name(t.emotion) << ',' << intensity_name(t.intensity)
        << "\n";
  }
  if (!out.flush()) throw IoError("failed writing file: " + path);
}

std::vector<EmotionToken> read_tokens_csv(const std::string& path) {
  CsvReader reader(path);
  std::vector<std::string> fields;
  std::vector<EmotionToken> tokens;
  if (!reader.next(&fields)) return tokens;
  if (join_fields(fields) != kTokensHeader) {
    throw ParseError(location(reader) + ": expected header '" + kTokensHeader +
                     "'");
  }
  while (reader.next(&fields)) {
    if (fields.size() != 8) {
      throw ParseError(location(reader) + ": expected 8 fields, got " +
                       std::to_string(fields.size()));
    }
    EmotionToken t;
    t.token_id = fields[0];
    t.speaker_id = fields[1];
    t.session_id = fields[2];
    t.word = fields[3];
    t.onset_ms = parse_double_field(fields[4], reader.path(),
                                    reader.line_number(), "onset_ms");
    t.duration_ms = parse_double_field(fields[5], reader.path(),
                                       reader.line_number(), "duration_ms");
    try {
      t.emotion = parse_emotion(fields[6]);
      t.intensity = parse_intensity(fields[7]);
    } catch (const ParseError& e) {
      throw ParseError(location(reader) + ": " + e.what());
    }
    tokens.push_back(std::move(t));
  }
  return tokens;
}

}  // namespace emorec
