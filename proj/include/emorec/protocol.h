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

#ifndef EMOREC_PROTOCOL_H_
#define EMOREC_PROTOCOL_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "emorec/features.h"
#include "emorec/forest.h"

namespace emorec {

// Class-size gates: multiclass training drops classes under 100
// observations and caps per-class bootstrap draws at min(floor(0.8 n), 500);
// a pairwise run sizes both classes at floor(0.8 min(n_a, n_b)) and is
// skipped entirely if either class has fewer than 200.
inline constexpr long long kMulticlassMinCount = 100;
inline constexpr long long kMulticlassCap = 500;
inline constexpr long long kPairwiseMinCount = 200;
inline constexpr double kTrainFraction = 0.8;

struct DroppedClass {
  std::string label;
  std::string reason;
};

struct SamplingPlan {
  enum class Mode { kMulticlass, kPairwise };
  Mode mode = Mode::kMulticlass;
  std::vector<std::string> included;        // canonical order
  std::vector<long long> bootstrap_sizes;   // aligned with included
  std::vector<DroppedClass> dropped;
  bool skipped = false;                     // pairwise only
  std::string skip_reason;
};

// Multiclass plan from per-class counts. Throws ValidationError when fewer
// than 2 classes survive the gate.
SamplingPlan plan_multiclass(const std::map<std::string, long long>& counts);

// Pairwise plan; returns a skipped plan (with reason) instead of throwing.
SamplingPlan plan_pairwise(const std::string& label_a, long long n_a,
                           const std::string& label_b, long long n_b);

struct EvaluationReport {
  std::string speaker_id;
  FeatureGroup group = FeatureGroup::kAll;
  std::vector<std::string> classes;
  std::vector<DroppedClass> dropped;
  double rate = 0.0;
  ConfusionMatrix confusion;
  std::vector<std::vector<double>> conditional;
  std::map<std::string, long long> class_counts;  // scored-table counts
  std::vector<std::pair<std::string, double>> importance_top;  // best first
  std::uint64_t seed = 0;
  ForestConfig forest_config;
  long long rows_never_oob = 0;
  std::map<std::string, std::string> config_echo;  // run flags, verbatim
};

struct PairwiseCell {
  std::string emotion_a;
  std::string emotion_b;
  std::optional<double> rate;
  bool skipped = false;
  std::string reason;
};

struct ProtocolOptions {
  ForestConfig forest;
  int importance_top_k = 20;
  bool compute_importance = true;
};

// Balanced multiclass run over the `group` block of the table: plan, train,
// OOB-score, report. The table must contain a single speaker (filter first).
EvaluationReport run_multiclass(const FeatureTable& table, FeatureGroup group,
                                const ProtocolOptions& options);

// One balanced forest per unordered pair of emotions passing the >= 200
// gate; cells for skipped pairs carry the reason.
std::vector<PairwiseCell> run_pairwise_grid(const FeatureTable& table,
                                            FeatureGroup group,
                                            const ProtocolOptions& options);

// Report JSON matching the documented schema; byte-identical for identical
// inputs and seed.
std::string report_to_json(const EvaluationReport& report);
void write_report_json(const EvaluationReport& report, const std::string& path);

// Conditional-probability table rendered with 2-decimal entries, one row
// per expressed emotion plus its observation count.
std::string render_conditional_table(const EvaluationReport& report);

// Grid CSV: emotion_a,emotion_b,rate,skipped,reason
void write_pairwise_grid_csv(const std::vector<PairwiseCell>& grid,
                             const std::string& path);
std::string render_pairwise_grid(const std::vector<PairwiseCell>& grid);

// Restricts a table to one speaker (or validates single-speaker when the
// filter is empty). Returns selected row indices.
std::vector<std::size_t> select_speaker_rows(const FeatureTable& table,
                                             const std::string& speaker);
FeatureTable subset_rows(const FeatureTable& table,
                         const std::vector<std::size_t>& rows);

}  // namespace emorec

#endif  // EMOREC_PROTOCOL_H_
