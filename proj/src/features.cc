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

#include "emorec/features.h"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "emorec/common.h"
#include "emorec/csv.h"
#include "emorec/lpc.h"
#include "emorec/voice_quality.h"
#include "json.hpp"

namespace emorec {

namespace {

constexpr double kLfpcFloor = 1e-12;

const std::array<std::string, 4> kGroupNames = {"FB", "F", "VQ", "ALL"};

}  // namespace

const std::string& feature_group_name(FeatureGroup g) {
  return kGroupNames[static_cast<int>(g)];
}

FeatureGroup parse_feature_group(const std::string& name) {
  for (std::size_t i = 0; i < kGroupNames.size(); ++i) {
    if (kGroupNames[i] == name) return static_cast<FeatureGroup>(i);
  }
  throw ArgError("unknown feature group '" + name +
                 "' (valid groups: FB, F, VQ, ALL)");
}

int feature_group_size(FeatureGroup g) {
  switch (g) {
    case FeatureGroup::kFilterBank: return kFbVars;
    case FeatureGroup::kFrequency: return kFreqVars;
    case FeatureGroup::kVoiceQuality: return kVqVars;
    case FeatureGroup::kAll: return kAllVars;
  }
  return 0;
}

double lfpc_from_band_output(std::span<const double> band_frame,
                             double bandwidth_hz) {
  double energy = 0.0;
  for (double y : band_frame) energy += y * y;
  energy /= static_cast<double>(band_frame.size());
  return 10.0 * std::log10(energy / bandwidth_hz + kLfpcFloor);
}

FrameMatrix extract_frame_matrix(const TokenWindow& tw,
                                 const GammatoneBank& bank,
                                 const FeatureConfig& config) {
  if (static_cast<int>(tw.samples.size()) !=
      window_read_samples(config.window_ms)) {
    throw ArgError("token window does not match the configured window_ms");
  }
  const std::vector<Frame> frames = frame_signal(tw);
  if (static_cast<int>(frames.size()) != kFramesPerToken) {
    throw ArgError("expected a 12-frame token window");
  }

  FrameMatrix fm;
  fm.token_id = tw.token_id;

  for (int b = 0; b < kNumBands; ++b) {
    const std::vector<double> y = bank.filter_band(b, tw.samples);
    for (int n = 0; n < kFramesPerToken; ++n) {
      const std::size_t start =
          static_cast<std::size_t>(n) * kFrameHopSamples;
      fm.frames[static_cast<std::size_t>(n)].lfpc[static_cast<std::size_t>(b)] =
          lfpc_from_band_output(
              std::span<const double>(y).subspan(start, kFrameSamples),
              bank.bandwidths_hz()[static_cast<std::size_t>(b)]);
    }
  }

  std::array<double, kFramesPerToken> f0s{};
  std::array<double, kFramesPerToken> peaks{};
  double per_sum = 0.0;
  for (int n = 0; n < kFramesPerToken; ++n) {
    auto& ff = fm.frames[static_cast<std::size_t>(n)];
    const auto& samples = frames[static_cast<std::size_t>(n)].samples;
    ff.periodicity = periodicity(samples);
    ff.peak_amp = peak_amplitude(samples);
    ff.f0_hz = estimate_f0_shr(samples, bank.sample_rate_hz(),
                               config.voicing_threshold);
    const Formants fmt = lpc_formants(samples, bank.sample_rate_hz());
    ff.f1_hz = fmt.f1_hz;
    ff.f2_hz = fmt.f2_hz;
    ff.f3_hz = fmt.f3_hz;
    f0s[static_cast<std::size_t>(n)] = ff.f0_hz;
    peaks[static_cast<std::size_t>(n)] = ff.peak_amp;
    per_sum += ff.periodicity;
  }
  fm.mean_periodicity = per_sum / kFramesPerToken;
  fm.mean_jitter = jitter(f0s).mean;
  fm.mean_shimmer = shimmer(peaks).mean;
  return fm;
}

std::vector<double> assemble_vector(const FrameMatrix& fm, FeatureGroup g) {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(feature_group_size(g)));
  const bool fb = g == FeatureGroup::kFilterBank || g == FeatureGroup::kAll;
  const bool fr = g == FeatureGroup::kFrequency || g == FeatureGroup::kAll;
  const bool vq = g == FeatureGroup::kVoiceQuality || g == FeatureGroup::kAll;
  if (fb) {
    for (const auto& frame : fm.frames) {
      for (double x : frame.lfpc) v.push_back(x);
    }
  }
  if (fr) {
    for (const auto& frame : fm.frames) {
      v.push_back(frame.f0_hz);
      v.push_back(frame.f1_hz);
      v.push_back(frame.f2_hz);
      v.push_back(frame.f3_hz);
    }
  }
  if (vq) {
    v.push_back(fm.mean_periodicity);
    v.push_back(fm.mean_jitter);
    v.push_back(fm.mean_shimmer);
  }
  return v;
}

VariableLocation describe_variable(int all_index) {
  if (all_index < 0 || all_index >= kAllVars) {
    throw ArgError("variable index out of range");
  }
  VariableLocation loc;
  char buf[16];
  if (all_index < kFbVars) {
    loc.frame = all_index / kNumBands + 1;
    std::snprintf(buf, sizeof(buf), "lfpc%02d", all_index % kNumBands + 1);
    loc.feature = buf;
  } else if (all_index < kFbVars + kFreqVars) {
    const int rel = all_index - kFbVars;
    loc.frame = rel / 4 + 1;
    loc.feature = "f" + std::to_string(rel % 4);
  } else {
    loc.frame = 0;
    const int rel = all_index - kFbVars - kFreqVars;
    loc.feature = rel == 0   ? "mean_periodicity"
                  : rel == 1 ? "mean_jitter"
                             : "mean_shimmer";
  }
  return loc;
}

std::pair<int, int> FeatureTable::group_columns(FeatureGroup g) const {
  if (g == group) return {0, static_cast<int>(var_names.size())};
  if (group != FeatureGroup::kAll) {
    throw ArgError("feature table holds group " + feature_group_name(group) +
                   "; cannot select " + feature_group_name(g));
  }
  switch (g) {
    case FeatureGroup::kFilterBank: return {0, kFbVars};
    case FeatureGroup::kFrequency: return {kFbVars, kFbVars + kFreqVars};
    case FeatureGroup::kVoiceQuality: return {kFbVars + kFreqVars, kAllVars};
    case FeatureGroup::kAll: return {0, kAllVars};
  }
  return {0, 0};
}

std::vector<std::string> make_var_names(int count) {
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(count));
  char buf[16];
  for (int i = 1; i <= count; ++i) {
    std::snprintf(buf, sizeof(buf), "v%03d", i);
    names.emplace_back(buf);
  }
  return names;
}

void write_feature_csv(const FeatureTable& table, const std::string& path,
                       const FeatureSidecar& sidecar) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path);
  out << "token_id,session_id,speaker_id,emotion";
  for (const auto& name : table.var_names) out << ',' << name;
  out << "\n";
  for (std::size_t i = 0; i < table.n_rows(); ++i) {
    out << csv_escape(table.token_ids[i]) << ','
        << csv_escape(table.session_ids[i]) << ','
        << csv_escape(table.speaker_ids[i]) << ','
        << emotion_name(table.emotions[i]);
    for (int j = 0; j < table.values.cols(); ++j) {
      out << ',' << format_g9(table.values(static_cast<Eigen::Index>(i), j));
    }
    out << "\n";
  }
  if (!out.flush()) throw IoError("failed writing file: " + path);

  nlohmann::ordered_json meta;
  meta["group"] = sidecar.group;
  meta["ordering_version"] = sidecar.ordering_version;
  meta["window_ms"] = sidecar.window_ms;
  meta["voicing_threshold"] = sidecar.voicing_threshold;
  meta["pad_exclude_threshold"] = sidecar.pad_exclude_threshold;
  meta["tokens_excluded_padding"] = sidecar.tokens_excluded_padding;
  meta["unlabeled_word_default"] = sidecar.unlabeled_word_default;
  std::ofstream meta_out(path + ".meta.json");
  if (!meta_out) throw IoError("cannot write file: " + path + ".meta.json");
  meta_out << meta.dump(2) << "\n";
}

FeatureTable read_feature_csv(const std::string& path) {
  CsvReader reader(path);
  std::vector<std::string> fields;
  if (!reader.next(&fields)) throw ParseError(path + ": empty feature file");
  if (fields.size() < 5 || fields[0] != "token_id" ||
      fields[1] != "session_id" || fields[2] != "speaker_id" ||
      fields[3] != "emotion") {
    throw ParseError(path + ":1: expected feature header "
                     "token_id,session_id,speaker_id,emotion,v001..");
  }
  FeatureTable table;
  table.var_names.assign(fields.begin() + 4, fields.end());
  const auto n_vars = static_cast<int>(table.var_names.size());
  const auto expected = make_var_names(n_vars);
  for (int i = 0; i < n_vars; ++i) {
    if (table.var_names[static_cast<std::size_t>(i)] !=
        expected[static_cast<std::size_t>(i)]) {
      throw ParseError(path + ":1: variable columns must be named v001..v" +
                       std::to_string(n_vars));
    }
  }
  if (n_vars == kAllVars) table.group = FeatureGroup::kAll;
  else if (n_vars == kFbVars) table.group = FeatureGroup::kFilterBank;
  else if (n_vars == kFreqVars) table.group = FeatureGroup::kFrequency;
  else if (n_vars == kVqVars) table.group = FeatureGroup::kVoiceQuality;
  else {
    throw ParseError(path + ": unexpected variable count " +
                     std::to_string(n_vars) +
                     " (expected 243, 192, 48 or 3)");
  }
  // Honor an explicit sidecar group when present (an ALL-sized table could
  // in principle be something else; today sizes are unambiguous).
  if (auto sidecar = read_feature_sidecar(path)) {
    table.group = parse_feature_group(sidecar->group);
  }

  std::vector<std::vector<double>> rows;
  while (reader.next(&fields)) {
    if (static_cast<int>(fields.size()) != 4 + n_vars) {
      throw ParseError(path + ":" + std::to_string(reader.line_number()) +
                       ": expected " + std::to_string(4 + n_vars) +
                       " fields, got " + std::to_string(fields.size()));
    }
    table.token_ids.push_back(fields[0]);
    table.session_ids.push_back(fields[1]);
    table.speaker_ids.push_back(fields[2]);
    try {
      table.emotions.push_back(parse_emotion(fields[3]));
    } catch (const ParseError& e) {
      throw ParseError(path + ":" + std::to_string(reader.line_number()) +
                       ": " + e.what());
    }
    std::vector<double> row(static_cast<std::size_t>(n_vars));
    for (int j = 0; j < n_vars; ++j) {
      row[static_cast<std::size_t>(j)] = parse_double_field(
          fields[static_cast<std::size_t>(4 + j)], path, reader.line_number(),
          table.var_names[static_cast<std::size_t>(j)]);
    }
    rows.push_back(std::move(row));
  }
  table.values.resize(static_cast<Eigen::Index>(rows.size()), n_vars);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (int j = 0; j < n_vars; ++j) {
      table.values(static_cast<Eigen::Index>(i), j) =
          rows[i][static_cast<std::size_t>(j)];
    }
  }
  return table;
}

std::optional<FeatureSidecar> read_feature_sidecar(const std::string& csv_path) {
  std::ifstream in(csv_path + ".meta.json");
  if (!in) return std::nullopt;
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(csv_path + ".meta.json: " + e.what());
  }
  FeatureSidecar s;
  s.group = j.value("group", "ALL");
  s.ordering_version = j.value("ordering_version", kFeatureOrderingVersion);
  s.window_ms = j.value("window_ms", kDefaultWindowMs);
  s.voicing_threshold = j.value("voicing_threshold", kDefaultVoicingThreshold);
  s.pad_exclude_threshold = j.value("pad_exclude_threshold", 0.5);
  s.tokens_excluded_padding = j.value("tokens_excluded_padding", 0LL);
  s.unlabeled_word_default = j.value("unlabeled_word_default", "Neutral");
  return s;
}

}  // namespace emorec
