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

#include "emorec/protocol.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "emorec/csv.h"
#include "json.hpp"

namespace emorec {

namespace {

// Known emotion labels in canonical order first, then anything else
// lexicographically.
std::vector<std::string> ordered_labels(
    const std::map<std::string, long long>& counts) {
  std::vector<std::string> out;
  for (Emotion e : kAllEmotions) {
    if (counts.count(emotion_name(e))) out.push_back(emotion_name(e));
  }
  for (const auto& [label, n] : counts) {
    (void)n;
    if (std::find(out.begin(), out.end(), label) == out.end()) {
      out.push_back(label);
    }
  }
  return out;
}

std::map<std::string, long long> count_classes(const FeatureTable& table) {
  std::map<std::string, long long> counts;
  for (Emotion e : table.emotions) ++counts[emotion_name(e)];
  return counts;
}

struct LabeledSubset {
  Eigen::MatrixXd values;
  std::vector<int> labels;
};

LabeledSubset gather_rows(const FeatureTable& table, FeatureGroup group,
                          const std::vector<std::string>& classes) {
  const auto [begin, end] = table.group_columns(group);
  std::map<std::string, int> class_index;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    class_index[classes[c]] = static_cast<int>(c);
  }
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < table.n_rows(); ++i) {
    if (class_index.count(emotion_name(table.emotions[i]))) rows.push_back(i);
  }
  LabeledSubset subset;
  subset.values.resize(static_cast<Eigen::Index>(rows.size()), end - begin);
  subset.labels.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    subset.values.row(static_cast<Eigen::Index>(r)) =
        table.values.row(static_cast<Eigen::Index>(rows[r]))
            .segment(begin, end - begin);
    subset.labels.push_back(
        class_index.at(emotion_name(table.emotions[rows[r]])));
  }
  return subset;
}

}  // namespace

SamplingPlan plan_multiclass(const std::map<std::string, long long>& counts) {
  SamplingPlan plan;
  plan.mode = SamplingPlan::Mode::kMulticlass;
  for (const std::string& label : ordered_labels(counts)) {
    const long long n = counts.at(label);
    if (n < kMulticlassMinCount) {
      plan.dropped.push_back(
          {label, "fewer than 100 observations (n=" + std::to_string(n) + ")"});
      continue;
    }
    plan.included.push_back(label);
    plan.bootstrap_sizes.push_back(std::min(
        static_cast<long long>(std::floor(kTrainFraction * static_cast<double>(n))),
        kMulticlassCap));
  }
  if (plan.included.size() < 2) {
    throw ValidationError(
        "fewer than 2 classes have at least 100 observations; "
        "nothing to classify");
  }
  return plan;
}

SamplingPlan plan_pairwise(const std::string& label_a, long long n_a,
                           const std::string& label_b, long long n_b) {
  SamplingPlan plan;
  plan.mode = SamplingPlan::Mode::kPairwise;
  std::string reason;
  if (n_a < kPairwiseMinCount) {
    reason = label_a + " has fewer than 200 observations (n=" +
             std::to_string(n_a) + ")";
  }
  if (n_b < kPairwiseMinCount) {
    if (!reason.empty()) reason += "; ";
    reason += label_b + " has fewer than 200 observations (n=" +
              std::to_string(n_b) + ")";
  }
  if (!reason.empty()) {
    plan.skipped = true;
    plan.skip_reason = reason;
    return plan;
  }
  const auto size = static_cast<long long>(
      std::floor(kTrainFraction * static_cast<double>(std::min(n_a, n_b))));
  plan.included = {label_a, label_b};
  plan.bootstrap_sizes = {size, size};
  return plan;
}

std::vector<std::size_t> select_speaker_rows(const FeatureTable& table,
                                             const std::string& speaker) {
  std::set<std::string> speakers(table.speaker_ids.begin(),
                                 table.speaker_ids.end());
  std::string wanted = speaker;
  if (wanted.empty()) {
    if (speakers.size() > 1) {
      std::string list;
      for (const auto& s : speakers) {
        if (!list.empty()) list += ", ";
        list += s;
      }
      throw ValidationError("feature table has multiple speakers (" + list +
                            "); select one with --speaker");
    }
    if (speakers.empty()) throw ValidationError("feature table is empty");
    wanted = *speakers.begin();
  }
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < table.n_rows(); ++i) {
    if (table.speaker_ids[i] == wanted) rows.push_back(i);
  }
  if (rows.empty()) {
    throw ValidationError("no rows for speaker '" + wanted + "'");
  }
  return rows;
}

FeatureTable subset_rows(const FeatureTable& table,
                         const std::vector<std::size_t>& rows) {
  FeatureTable out;
  out.var_names = table.var_names;
  out.group = table.group;
  out.values.resize(static_cast<Eigen::Index>(rows.size()),
                    table.values.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.token_ids.push_back(table.token_ids[rows[r]]);
    out.session_ids.push_back(table.session_ids[rows[r]]);
    out.speaker_ids.push_back(table.speaker_ids[rows[r]]);
    out.emotions.push_back(table.emotions[rows[r]]);
    out.values.row(static_cast<Eigen::Index>(r)) =
        table.values.row(static_cast<Eigen::Index>(rows[r]));
  }
  return out;
}

EvaluationReport run_multiclass(const FeatureTable& table, FeatureGroup group,
                                const ProtocolOptions& options) {
  std::set<std::string> speakers(table.speaker_ids.begin(),
                                 table.speaker_ids.end());
  if (speakers.size() != 1) {
    throw ValidationError("run_multiclass expects a single-speaker table");
  }
  const auto counts = count_classes(table);
  SamplingPlan plan = plan_multiclass(counts);

  LabeledSubset subset = gather_rows(table, group, plan.included);
  ForestModel model =
      train_forest(subset.values, subset.labels, plan.included,
                   plan.bootstrap_sizes, options.forest);
  OobEstimate est = oob_estimate(model, subset.values, subset.labels);

  EvaluationReport report;
  report.speaker_id = *speakers.begin();
  report.group = group;
  report.classes = plan.included;
  report.dropped = plan.dropped;
  report.rate = est.rate;
  report.confusion = est.confusion;
  report.conditional = est.confusion.conditional();
  report.class_counts = counts;
  report.seed = options.forest.seed;
  report.forest_config = options.forest;
  report.forest_config.mtry = model.mtry;  // echo the resolved value
  report.rows_never_oob = est.rows_never_oob;

  if (options.compute_importance) {
    const auto [begin, end] = table.group_columns(group);
    (void)end;
    ImportanceResult imp = importance(model, subset.values, subset.labels,
                                      options.forest.seed, options.forest.threads);
    const int k = std::min<int>(options.importance_top_k,
                                static_cast<int>(imp.ranking.size()));
    for (int i = 0; i < k; ++i) {
      const int f = imp.ranking[static_cast<std::size_t>(i)];
      report.importance_top.emplace_back(
          table.var_names[static_cast<std::size_t>(begin + f)],
          imp.scores[static_cast<std::size_t>(f)]);
    }
  }
  return report;
}

std::vector<PairwiseCell> run_pairwise_grid(const FeatureTable& table,
                                            FeatureGroup group,
                                            const ProtocolOptions& options) {
  std::set<std::string> speakers(table.speaker_ids.begin(),
                                 table.speaker_ids.end());
  if (speakers.size() != 1) {
    throw ValidationError("run_pairwise_grid expects a single-speaker table");
  }
  const auto counts = count_classes(table);
  auto count_of = [&](Emotion e) {
    auto it = counts.find(emotion_name(e));
    return it == counts.end() ? 0LL : it->second;
  };

  std::vector<PairwiseCell> grid;
  for (int a = 0; a < kNumEmotions; ++a) {
    for (int b = a + 1; b < kNumEmotions; ++b) {
      const std::string label_a = emotion_name(kAllEmotions[static_cast<std::size_t>(a)]);
      const std::string label_b = emotion_name(kAllEmotions[static_cast<std::size_t>(b)]);
      PairwiseCell cell;
      cell.emotion_a = label_a;
      cell.emotion_b = label_b;
      SamplingPlan plan =
          plan_pairwise(label_a, count_of(kAllEmotions[static_cast<std::size_t>(a)]),
                        label_b, count_of(kAllEmotions[static_cast<std::size_t>(b)]));
      if (plan.skipped) {
        cell.skipped = true;
        cell.reason = plan.skip_reason;
        grid.push_back(std::move(cell));
        continue;
      }
      LabeledSubset subset = gather_rows(table, group, plan.included);
      ForestModel model =
          train_forest(subset.values, subset.labels, plan.included,
                       plan.bootstrap_sizes, options.forest);
      OobEstimate est = oob_estimate(model, subset.values, subset.labels);
      cell.rate = est.rate;
      grid.push_back(std::move(cell));
    }
  }
  return grid;
}

std::string report_to_json(const EvaluationReport& report) {
  nlohmann::ordered_json j;
  j["speaker"] = report.speaker_id;
  j["group"] = feature_group_name(report.group);
  j["classes"] = report.classes;
  nlohmann::ordered_json dropped = nlohmann::ordered_json::array();
  for (const auto& d : report.dropped) {
    dropped.push_back({{"class", d.label}, {"reason", d.reason}});
  }
  j["dropped"] = dropped;
  j["rate"] = report.rate;
  j["confusion"] = report.confusion.counts;
  j["conditional"] = report.conditional;
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (const auto& [label, n] : report.class_counts) counts[label] = n;
  j["counts"] = counts;
  nlohmann::ordered_json imp = nlohmann::ordered_json::array();
  for (const auto& [var, score] : report.importance_top) {
    imp.push_back({{"var", var}, {"score", score}});
  }
  j["importance"] = imp;
  j["seed"] = report.seed;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  config["trees"] = report.forest_config.n_trees;
  config["mtry"] = report.forest_config.mtry;
  config["threads"] = report.forest_config.threads;
  config["rows_never_oob"] = report.rows_never_oob;
  for (const auto& [key, value] : report.config_echo) config[key] = value;
  j["config"] = config;
  return j.dump(2);
}

void write_report_json(const EvaluationReport& report,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path);
  out << report_to_json(report) << "\n";
  if (!out.flush()) throw IoError("failed writing file: " + path);
}

std::string render_conditional_table(const EvaluationReport& report) {
  std::ostringstream out;
  std::size_t label_width = 8;
  for (const auto& c : report.classes) {
    label_width = std::max(label_width, c.size() + 1);
  }
  out << std::string(label_width, ' ');
  char buf[64];
  for (const auto& c : report.classes) {
    std::snprintf(buf, sizeof(buf), "%9s", c.c_str());
    out << buf;
  }
  out << "  No. of Observations\n";
  for (std::size_t i = 0; i < report.classes.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%-*s", static_cast<int>(label_width),
                  report.classes[i].c_str());
    out << buf;
    for (std::size_t jcol = 0; jcol < report.classes.size(); ++jcol) {
      std::snprintf(buf, sizeof(buf), "%9.2f", report.conditional[i][jcol]);
      out << buf;
    }
    long long row_sum = 0;
    for (long long c : report.confusion.counts[i]) row_sum += c;
    std::snprintf(buf, sizeof(buf), "%21lld", row_sum);
    out << buf << "\n";
  }
  return out.str();
}

void write_pairwise_grid_csv(const std::vector<PairwiseCell>& grid,
                             const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path);
  out << "emotion_a,emotion_b,rate,skipped,reason\n";
  char buf[32];
  for (const auto& cell : grid) {
    out << cell.emotion_a << ',' << cell.emotion_b << ',';
    if (cell.rate) {
      std::snprintf(buf, sizeof(buf), "%.6f", *cell.rate);
      out << buf;
    }
    out << ',' << (cell.skipped ? "true" : "false") << ','
        << csv_escape(cell.reason) << "\n";
  }
  if (!out.flush()) throw IoError("failed writing file: " + path);
}

std::string render_pairwise_grid(const std::vector<PairwiseCell>& grid) {
  std::ostringstream out;
  char buf[64];
  for (const auto& cell : grid) {
    std::snprintf(buf, sizeof(buf), "%-8s vs %-8s  ", cell.emotion_a.c_str(),
                  cell.emotion_b.c_str());
    out << buf;
    if (cell.skipped) {
      out << "skipped: " << cell.reason;
    } else {
      std::snprintf(buf, sizeof(buf), "%5.1f%%", 100.0 * cell.rate.value());
      out << buf;
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace emorec
