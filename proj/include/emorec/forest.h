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

#ifndef EMOREC_FOREST_H_
#define EMOREC_FOREST_H_

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "emorec/common.h"

namespace emorec {

// Random forest of unpruned CART-style trees trained on stratified
// bootstrap samples. Per-tree RNG streams derive from the master seed, so
// training is deterministic and independent of thread count.

struct TreeNode {
  // feature < 0 marks a leaf.
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<long long> class_counts;  // leaf only
  int majority = 0;                     // leaf only; tie -> lowest class index
};

struct DecisionTree {
  std::vector<TreeNode> nodes;  // node 0 is the root
  std::vector<int> bootstrap;   // training row indices, with repeats

  int predict_leaf(const Eigen::RowVectorXd& row) const;
};

struct ForestConfig {
  int n_trees = 500;
  int mtry = 0;  // 0 = floor(sqrt(M))
  std::uint64_t seed = 0;
  int threads = 1;
};

struct ForestModel {
  int n_features = 0;
  int mtry = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> class_labels;  // canonical order; vote tie-break
  std::vector<DecisionTree> trees;
  std::vector<std::vector<int>> oob_rows;  // per tree, ascending

  int n_trees() const { return static_cast<int>(trees.size()); }
};

struct Prediction {
  int class_index = 0;
  std::vector<double> vote_share;  // per class, sums to 1
};

struct ConfusionMatrix {
  std::vector<std::string> class_labels;
  std::vector<std::vector<long long>> counts;  // counts[true][predicted]

  long long total() const;
  long long diagonal() const;
  double rate() const;  // sum of the diagonal over the total
  // Row-normalized conditional probabilities; all-zero rows stay zero.
  std::vector<std::vector<double>> conditional() const;
};

struct OobEstimate {
  double rate = 0.0;
  ConfusionMatrix confusion;
  long long rows_never_oob = 0;  // excluded from scoring
};

struct ImportanceResult {
  std::vector<double> scores;       // mean per-tree OOB accuracy drop
  std::vector<double> stderrs;      // standard error of the per-tree drops
  std::vector<int> ranking;         // feature indices, best first
};

// Grows one unpruned tree: at each node, `mtry` distinct features are drawn
// uniformly, candidate thresholds are midpoints of consecutive distinct
// sorted values, and the split minimizing weighted Gini impurity wins (ties
// to the lowest feature index, then the lowest threshold). Growth stops on
// purity or when no candidate reduces impurity.
DecisionTree train_tree(const Eigen::MatrixXd& rows,
                        const std::vector<int>& labels, int n_classes,
                        const std::vector<int>& bootstrap, int mtry, Rng& rng);

// Trains K trees, each on an independent stratified bootstrap that draws,
// with replacement, bootstrap_sizes[c] rows from class c. Rows absent from
// a tree's bootstrap form its OOB set.
ForestModel train_forest(const Eigen::MatrixXd& rows,
                         const std::vector<int>& labels,
                         const std::vector<std::string>& class_labels,
                         const std::vector<long long>& bootstrap_sizes,
                         const ForestConfig& config);

Prediction predict(const ForestModel& model, const Eigen::RowVectorXd& row);

// Scores every row by majority vote over only the trees where the row is
// out of bag. Rows in every bootstrap are excluded and counted.
OobEstimate oob_estimate(const ForestModel& model, const Eigen::MatrixXd& rows,
                         const std::vector<int>& labels);

// Permutation importance: per feature, mean decrease in per-tree OOB
// accuracy when that feature's values are shuffled among the OOB rows.
ImportanceResult importance(const ForestModel& model,
                            const Eigen::MatrixXd& rows,
                            const std::vector<int>& labels,
                            std::uint64_t seed, int threads = 1);

// Versioned JSON serialization; byte-identical for identical models.
std::string forest_to_json(const ForestModel& model);
ForestModel forest_from_json(const std::string& text);
void write_forest_json(const ForestModel& model, const std::string& path);
ForestModel read_forest_json(const std::string& path);

}  // namespace emorec

#endif  // EMOREC_FOREST_H_
