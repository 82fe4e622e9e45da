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

#ifndef EMOREC_FEATURES_H_
#define EMOREC_FEATURES_H_

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "emorec/audio.h"
#include "emorec/emotion.h"
#include "emorec/gammatone.h"
#include "emorec/pitch.h"

namespace emorec {

// Version stamp for the variable ordering below; echoed in sidecars and
// reports so results can be traced to the layout that produced them.
inline constexpr const char* kFeatureOrderingVersion = "v1";

enum class FeatureGroup { kFilterBank, kFrequency, kVoiceQuality, kAll };

constexpr int kFramesPerToken = 12;
constexpr int kFbVars = kNumBands * kFramesPerToken;        // 192
constexpr int kFreqVars = 4 * kFramesPerToken;              // 48
constexpr int kVqVars = 3;
constexpr int kAllVars = kFbVars + kFreqVars + kVqVars;     // 243

const std::string& feature_group_name(FeatureGroup g);
FeatureGroup parse_feature_group(const std::string& name);
int feature_group_size(FeatureGroup g);

// Per-frame measurements.
struct FrameFeatures {
  std::array<double, kNumBands> lfpc{};  // dB
  double f0_hz = 0.0;                    // 0 = unvoiced
  double f1_hz = 0.0, f2_hz = 0.0, f3_hz = 0.0;  // 0 = missing
  double periodicity = 0.0;
  double peak_amp = 0.0;
};

// All measurements for one token: 12 frames plus the token-level means.
struct FrameMatrix {
  std::string token_id;
  std::array<FrameFeatures, kFramesPerToken> frames;
  double mean_periodicity = 0.0;
  double mean_jitter = 0.0;
  double mean_shimmer = 0.0;
};

struct FeatureConfig {
  int window_ms = kDefaultWindowMs;
  double voicing_threshold = kDefaultVoicingThreshold;
  double pad_exclude_threshold = 0.5;  // drop tokens padded more than this
};

// LFPC of one frame given the filter output already computed over the whole
// window: 10*log10(mean(y^2)/bandwidth + 1e-12).
double lfpc_from_band_output(std::span<const double> band_frame,
                             double bandwidth_hz);

// Runs all estimators over a 12-frame token window. The gammatone filters
// run once over the whole window; frame energies are read from the
// continuous output.
FrameMatrix extract_frame_matrix(const TokenWindow& tw,
                                 const GammatoneBank& bank,
                                 const FeatureConfig& config = {});

// Flattens a FrameMatrix into the fixed variable ordering:
//   FB block   index (n-1)*16 + b             (192 vars)
//   F block    index (n-1)*4 + {F0,F1,F2,F3}  (48 vars)
//   VQ block   [mean_periodicity, mean_jitter, mean_shimmer]
// ALL is FB then F then VQ (243 vars); other groups select their block.
std::vector<double> assemble_vector(const FrameMatrix& fm, FeatureGroup g);

// Inverse of the ordering: which (frame, feature) a flat ALL index means.
// frame is 1-based; feature names: lfpc01..lfpc16, f0..f3, and the three
// token-level means (frame 0).
struct VariableLocation {
  int frame = 0;
  std::string feature;
};
VariableLocation describe_variable(int all_index);

// N tokens by F variables with metadata, the unit the classifier and the
// batch adjustment consume.
struct FeatureTable {
  std::vector<std::string> token_ids;
  std::vector<std::string> session_ids;
  std::vector<std::string> speaker_ids;
  std::vector<Emotion> emotions;
  std::vector<std::string> var_names;  // v001..vNNN
  Eigen::MatrixXd values;              // rows = tokens
  FeatureGroup group = FeatureGroup::kAll;

  std::size_t n_rows() const { return token_ids.size(); }

  // Column range [begin, end) of `g` inside this table. The requested group
  // must equal the table's group or the table must be ALL.
  std::pair<int, int> group_columns(FeatureGroup g) const;
};

struct FeatureSidecar {
  std::string group;
  std::string ordering_version = kFeatureOrderingVersion;
  int window_ms = kDefaultWindowMs;
  double voicing_threshold = kDefaultVoicingThreshold;
  double pad_exclude_threshold = 0.5;
  long long tokens_excluded_padding = 0;
  std::string unlabeled_word_default = "Neutral";
};

// CSV header: token_id,session_id,speaker_id,emotion,v001.. with values at
// 9 significant digits. The sidecar is written next to the CSV as
// <path>.meta.json.
void write_feature_csv(const FeatureTable& table, const std::string& path,
                       const FeatureSidecar& sidecar);
FeatureTable read_feature_csv(const std::string& path);
std::optional<FeatureSidecar> read_feature_sidecar(const std::string& csv_path);

std::vector<std::string> make_var_names(int count);

}  // namespace emorec

#endif  // EMOREC_FEATURES_H_
