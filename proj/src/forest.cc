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

#include "emorec/forest.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "json.hpp"

namespace emorec {

namespace {

double gini(const std::vector<long long>& counts, long long n) {
  if (n == 0) return 0.0;
  double sum_sq = 0.0;
  for (long long c : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(n);
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

struct BestSplit {
  bool found = false;
  double impurity = 0.0;  // weighted child impurity
  int feature = -1;
  double threshold = 0.0;

  bool better_than(const BestSplit& other) const {
    if (!other.found) return true;
    if (impurity != other.impurity) return impurity < other.impurity;
    if (feature != other.feature) return feature < other.feature;
    return threshold < other.threshold;
  }
};

// Run-length encoding of a sorted unique index list as [start, length]
// pairs of consecutive runs.
nlohmann::ordered_json rle_encode(const std::vector<int>& sorted_unique) {
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  std::size_t i = 0;
  while (i < sorted_unique.size()) {
    std::size_t j = i + 1;
    while (j < sorted_unique.size() &&
           sorted_unique[j] == sorted_unique[j - 1] + 1) {
      ++j;
    }
    runs.push_back({sorted_unique[i], static_cast<int>(j - i)});
    i = j;
  }
  return runs;
}

std::vector<int> rle_decode(const nlohmann::json& runs) {
  std::vector<int> out;
  for (const auto& run : runs) {
    const int start = run.at(0).get<int>();
    const int len = run.at(1).get<int>();
    for (int k = 0; k < len; ++k) out.push_back(start + k);
  }
  return out;
}

std::vector<int> sorted_unique(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

int DecisionTree::predict_leaf(const Eigen::RowVectorXd& row) const {
  int node = 0;
  while (nodes[static_cast<std::size_t>(node)].feature >= 0) {
    const TreeNode& nd = nodes[static_cast<std::size_t>(node)];
    node = row(nd.feature) < nd.threshold ? nd.left : nd.right;
  }
  return nodes[static_cast<std::size_t>(node)].majority;
}

DecisionTree train_tree(const Eigen::MatrixXd& rows,
                        const std::vector<int>& labels, int n_classes,
                        const std::vector<int>& bootstrap, int mtry, Rng& rng) {
  const int n_features = static_cast<int>(rows.cols());
  mtry = std::clamp(mtry, 1, n_features);

  DecisionTree tree;
  tree.bootstrap = bootstrap;

  std::vector<int> feature_pool(static_cast<std::size_t>(n_features));
  std::iota(feature_pool.begin(), feature_pool.end(), 0);
  std::vector<std::pair<double, int>> scratch;  // (value, label)

  struct Work {
    int node;
    std::vector<int> members;  // bootstrap row indices, with repeats
  };
  std::vector<Work> stack;
  tree.nodes.emplace_back();
  stack.push_back({0, bootstrap});

  while (!stack.empty()) {
    Work work = std::move(stack.back());
    stack.pop_back();

    std::vector<long long> counts(static_cast<std::size_t>(n_classes), 0);
    for (int r : work.members) ++counts[static_cast<std::size_t>(labels[static_cast<std::size_t>(r)])];
    const auto n = static_cast<long long>(work.members.size());
    const double node_impurity = gini(counts, n);

    auto make_leaf = [&]() {
      TreeNode& leaf = tree.nodes[static_cast<std::size_t>(work.node)];
      leaf.feature = -1;
      leaf.class_counts = counts;
      leaf.majority = 0;
      for (int c = 1; c < n_classes; ++c) {
        if (counts[static_cast<std::size_t>(c)] >
            counts[static_cast<std::size_t>(leaf.majority)]) {
          leaf.majority = c;
        }
      }
    };

    if (node_impurity <= 0.0) {
      make_leaf();
      continue;
    }

    // Fresh uniform draw of mtry distinct features for this node.
    for (int j = 0; j < mtry; ++j) {
      const auto pick = static_cast<int>(
          rng.next_index(static_cast<std::uint64_t>(n_features - j)));
      std::swap(feature_pool[static_cast<std::size_t>(j)],
                feature_pool[static_cast<std::size_t>(j + pick)]);
    }

    BestSplit best;
    for (int j = 0; j < mtry; ++j) {
      const int f = feature_pool[static_cast<std::size_t>(j)];
      scratch.clear();
      scratch.reserve(work.members.size());
      for (int r : work.members) {
        scratch.emplace_back(rows(r, f), labels[static_cast<std::size_t>(r)]);
      }
      std::sort(scratch.begin(), scratch.end());

      std::vector<long long> left(static_cast<std::size_t>(n_classes), 0);
      long long n_left = 0;
      for (std::size_t i = 0; i + 1 < scratch.size(); ++i) {
        ++left[static_cast<std::size_t>(scratch[i].second)];
        ++n_left;
        if (scratch[i].first == scratch[i + 1].first) continue;
        double threshold = (scratch[i].first + scratch[i + 1].first) / 2.0;
        if (threshold <= scratch[i].first) threshold = scratch[i + 1].first;
        std::vector<long long> right(static_cast<std::size_t>(n_classes), 0);
        for (int c = 0; c < n_classes; ++c) {
          right[static_cast<std::size_t>(c)] =
              counts[static_cast<std::size_t>(c)] -
              left[static_cast<std::size_t>(c)];
        }
        const long long n_right = n - n_left;
        const double weighted =
            (static_cast<double>(n_left) * gini(left, n_left) +
             static_cast<double>(n_right) * gini(right, n_right)) /
            static_cast<double>(n);
        BestSplit cand{true, weighted, f, threshold};
        if (cand.better_than(best)) best = cand;
      }
    }

    if (!best.found || best.impurity >= node_impurity) {
      make_leaf();
      continue;
    }

    std::vector<int> left_members, right_members;
    for (int r : work.members) {
      if (rows(r, best.feature) < best.threshold) left_members.push_back(r);
      else right_members.push_back(r);
    }
    // midpoints of distinct values always route at least one row each way
    TreeNode& node = tree.nodes[static_cast<std::size_t>(work.node)];
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.left = static_cast<int>(tree.nodes.size());
    node.right = node.left + 1;
    tree.nodes.emplace_back();
    tree.nodes.emplace_back();
    const int left_id = node.left;
    const int right_id = node.right;
    stack.push_back({right_id, std::move(right_members)});
    stack.push_back({left_id, std::move(left_members)});
  }
  return tree;
}

ForestModel train_forest(const Eigen::MatrixXd& rows,
                         const std::vector<int>& labels,
                         const std::vector<std::string>& class_labels,
                         const std::vector<long long>& bootstrap_sizes,
                         const ForestConfig& config) {
  const auto n_rows = static_cast<int>(rows.rows());
  const auto n_classes = static_cast<int>(class_labels.size());
  if (n_rows == 0) throw ArgError("cannot train a forest on zero rows");
  if (static_cast<int>(labels.size()) != n_rows) {
    throw ArgError("labels do not match row count");
  }
  if (static_cast<int>(bootstrap_sizes.size()) != n_classes) {
    throw ArgError("bootstrap sizes do not match the class count");
  }
  if (config.n_trees < 1) throw ArgError("forest needs at least one tree");

  std::vector<std::vector<int>> rows_by_class(
      static_cast<std::size_t>(n_classes));
  for (int i = 0; i < n_rows; ++i) {
    const int c = labels[static_cast<std::size_t>(i)];
    if (c < 0 || c >= n_classes) throw ArgError("label out of range");
    rows_by_class[static_cast<std::size_t>(c)].push_back(i);
  }
  for (int c = 0; c < n_classes; ++c) {
    if (bootstrap_sizes[static_cast<std::size_t>(c)] > 0 &&
        rows_by_class[static_cast<std::size_t>(c)].empty()) {
      throw ValidationError("class '" + class_labels[static_cast<std::size_t>(c)] +
                            "' has a bootstrap size but no rows");
    }
  }

  ForestModel model;
  model.n_features = static_cast<int>(rows.cols());
  model.mtry = config.mtry > 0
                   ? config.mtry
                   : std::max(1, static_cast<int>(std::floor(
                                     std::sqrt(model.n_features))));
  model.seed = config.seed;
  model.class_labels = class_labels;
  model.trees.resize(static_cast<std::size_t>(config.n_trees));
  model.oob_rows.resize(static_cast<std::size_t>(config.n_trees));

  parallel_for(static_cast<std::size_t>(config.n_trees), config.threads,
               [&](std::size_t k) {
                 Rng rng(derive_seed(config.seed, k));
                 std::vector<int> bootstrap;
                 for (int c = 0; c < n_classes; ++c) {
                   const auto& pool = rows_by_class[static_cast<std::size_t>(c)];
                   const long long size =
                       bootstrap_sizes[static_cast<std::size_t>(c)];
                   for (long long i = 0; i < size; ++i) {
                     bootstrap.push_back(
                         pool[rng.next_index(pool.size())]);
                   }
                 }
                 model.trees[k] = train_tree(rows, labels, n_classes,
                                             bootstrap, model.mtry, rng);
                 std::vector<bool> in_bag(static_cast<std::size_t>(n_rows),
                                          false);
                 for (int r : bootstrap) in_bag[static_cast<std::size_t>(r)] = true;
                 for (int i = 0; i < n_rows; ++i) {
                   if (!in_bag[static_cast<std::size_t>(i)]) {
                     model.oob_rows[k].push_back(i);
                   }
                 }
               });
  return model;
}

Prediction predict(const ForestModel& model, const Eigen::RowVectorXd& row) {
  if (row.size() != model.n_features) {
    throw ArgError("row has " + std::to_string(row.size()) +
                   " features; model expects " +
                   std::to_string(model.n_features));
  }
  const auto n_classes = static_cast<int>(model.class_labels.size());
  std::vector<long long> votes(static_cast<std::size_t>(n_classes), 0);
  for (const auto& tree : model.trees) {
    ++votes[static_cast<std::size_t>(tree.predict_leaf(row))];
  }
  Prediction pred;
  pred.vote_share.resize(static_cast<std::size_t>(n_classes));
  for (int c = 0; c < n_classes; ++c) {
    pred.vote_share[static_cast<std::size_t>(c)] =
        static_cast<double>(votes[static_cast<std::size_t>(c)]) /
        static_cast<double>(model.trees.size());
    if (votes[static_cast<std::size_t>(c)] >
        votes[static_cast<std::size_t>(pred.class_index)]) {
      pred.class_index = c;
    }
  }
  return pred;
}

long long ConfusionMatrix::total() const {
  long long t = 0;
  for (const auto& row : counts) {
    for (long long c : row) t += c;
  }
  return t;
}

long long ConfusionMatrix::diagonal() const {
  long long t = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) t += counts[i][i];
  return t;
}

double ConfusionMatrix::rate() const {
  const long long t = total();
  return t > 0 ? static_cast<double>(diagonal()) / static_cast<double>(t) : 0.0;
}

std::vector<std::vector<double>> ConfusionMatrix::conditional() const {
  std::vector<std::vector<double>> out(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    out[i].resize(counts[i].size(), 0.0);
    long long row_sum = 0;
    for (long long c : counts[i]) row_sum += c;
    if (row_sum == 0) continue;
    for (std::size_t j = 0; j < counts[i].size(); ++j) {
      out[i][j] = static_cast<double>(counts[i][j]) /
                  static_cast<double>(row_sum);
    }
  }
  return out;
}

OobEstimate oob_estimate(const ForestModel& model, const Eigen::MatrixXd& rows,
                         const std::vector<int>& labels) {
  const auto n_rows = static_cast<int>(rows.rows());
  const auto n_classes = static_cast<int>(model.class_labels.size());
  std::vector<std::vector<long long>> votes(
      static_cast<std::size_t>(n_rows),
      std::vector<long long>(static_cast<std::size_t>(n_classes), 0));
  std::vector<long long> n_votes(static_cast<std::size_t>(n_rows), 0);
  for (std::size_t k = 0; k < model.trees.size(); ++k) {
    for (int i : model.oob_rows[k]) {
      if (i >= n_rows) continue;
      const int c = model.trees[k].predict_leaf(rows.row(i));
      ++votes[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
      ++n_votes[static_cast<std::size_t>(i)];
    }
  }
  OobEstimate est;
  est.confusion.class_labels = model.class_labels;
  est.confusion.counts.assign(
      static_cast<std::size_t>(n_classes),
      std::vector<long long>(static_cast<std::size_t>(n_classes), 0));
  for (int i = 0; i < n_rows; ++i) {
    if (n_votes[static_cast<std::size_t>(i)] == 0) {
      ++est.rows_never_oob;
      continue;
    }
    int best = 0;
    for (int c = 1; c < n_classes; ++c) {
      if (votes[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] >
          votes[static_cast<std::size_t>(i)][static_cast<std::size_t>(best)]) {
        best = c;
      }
    }
    ++est.confusion.counts[static_cast<std::size_t>(
        labels[static_cast<std::size_t>(i)])][static_cast<std::size_t>(best)];
  }
  est.rate = est.confusion.rate();
  return est;
}

ImportanceResult importance(const ForestModel& model,
                            const Eigen::MatrixXd& rows,
                            const std::vector<int>& labels,
                            std::uint64_t seed, int threads) {
  const auto n_features = model.n_features;
  const auto n_trees = model.trees.size();
  // per-tree accuracy drops, features x trees
  std::vector<std::vector<double>> drops(
      static_cast<std::size_t>(n_features),
      std::vector<double>(n_trees, 0.0));

  parallel_for(n_trees, threads, [&](std::size_t k) {
    const auto& oob = model.oob_rows[k];
    if (oob.empty()) return;
    const auto n_oob = static_cast<int>(oob.size());
    Eigen::MatrixXd local(n_oob, n_features);
    std::vector<int> truth(static_cast<std::size_t>(n_oob));
    for (int i = 0; i < n_oob; ++i) {
      local.row(i) = rows.row(oob[static_cast<std::size_t>(i)]);
      truth[static_cast<std::size_t>(i)] =
          labels[static_cast<std::size_t>(oob[static_cast<std::size_t>(i)])];
    }
    long long baseline = 0;
    for (int i = 0; i < n_oob; ++i) {
      if (model.trees[k].predict_leaf(local.row(i)) ==
          truth[static_cast<std::size_t>(i)]) {
        ++baseline;
      }
    }
    Eigen::VectorXd saved(n_oob);
    for (int f = 0; f < n_features; ++f) {
      saved = local.col(f);
      Rng rng(derive_seed(derive_seed(seed, k), static_cast<std::uint64_t>(f)));
      for (int i = n_oob - 1; i > 0; --i) {
        const auto j = static_cast<int>(
            rng.next_index(static_cast<std::uint64_t>(i) + 1));
        std::swap(local(i, f), local(j, f));
      }
      long long correct = 0;
      for (int i = 0; i < n_oob; ++i) {
        if (model.trees[k].predict_leaf(local.row(i)) ==
            truth[static_cast<std::size_t>(i)]) {
          ++correct;
        }
      }
      drops[static_cast<std::size_t>(f)][k] =
          static_cast<double>(baseline - correct) / static_cast<double>(n_oob);
      local.col(f) = saved;
    }
  });

  ImportanceResult result;
  result.scores.resize(static_cast<std::size_t>(n_features));
  result.stderrs.resize(static_cast<std::size_t>(n_features));
  for (int f = 0; f < n_features; ++f) {
    const auto& d = drops[static_cast<std::size_t>(f)];
    double mean = 0.0;
    for (double v : d) mean += v;
    mean /= static_cast<double>(d.size());
    double ss = 0.0;
    for (double v : d) ss += (v - mean) * (v - mean);
    const double var = d.size() > 1 ? ss / static_cast<double>(d.size() - 1) : 0.0;
    result.scores[static_cast<std::size_t>(f)] = mean;
    result.stderrs[static_cast<std::size_t>(f)] =
        std::sqrt(var / static_cast<double>(d.size()));
  }
  result.ranking.resize(static_cast<std::size_t>(n_features));
  std::iota(result.ranking.begin(), result.ranking.end(), 0);
  std::stable_sort(result.ranking.begin(), result.ranking.end(),
                   [&](int a, int b) {
                     return result.scores[static_cast<std::size_t>(a)] >
                            result.scores[static_cast<std::size_t>(b)];
                   });
  return result;
}

std::string forest_to_json(const ForestModel& model) {
  nlohmann::ordered_json j;
  j["schema"] = "emorec-forest";
  j["version"] = 1;
  j["n_features"] = model.n_features;
  j["mtry"] = model.mtry;
  j["seed"] = model.seed;
  j["classes"] = model.class_labels;
  // OOB sets are reconstructed from membership, so record the row count.
  int n_rows = 0;
  for (const auto& oob : model.oob_rows) {
    for (int r : oob) n_rows = std::max(n_rows, r + 1);
  }
  for (const auto& tree : model.trees) {
    for (int r : tree.bootstrap) n_rows = std::max(n_rows, r + 1);
  }
  j["n_rows"] = n_rows;
  nlohmann::ordered_json trees = nlohmann::ordered_json::array();
  for (const auto& tree : model.trees) {
    nlohmann::ordered_json tj;
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (const auto& nd : tree.nodes) {
      if (nd.feature >= 0) {
        nodes.push_back({nd.feature, nd.threshold, nd.left, nd.right});
      } else {
        nodes.push_back({-1, nd.majority, nd.class_counts});
      }
    }
    tj["nodes"] = nodes;
    tj["bootstrap_rle"] = rle_encode(sorted_unique(tree.bootstrap));
    trees.push_back(tj);
  }
  j["trees"] = trees;
  return j.dump();
}

ForestModel forest_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (j.value("schema", "") != "emorec-forest" || j.value("version", 0) != 1) {
    throw ParseError("not an emorec forest model (schema/version mismatch)");
  }
  ForestModel model;
  model.n_features = j.at("n_features").get<int>();
  model.mtry = j.at("mtry").get<int>();
  model.seed = j.at("seed").get<std::uint64_t>();
  model.class_labels = j.at("classes").get<std::vector<std::string>>();
  const int n_rows = j.at("n_rows").get<int>();
  for (const auto& tj : j.at("trees")) {
    DecisionTree tree;
    for (const auto& nj : tj.at("nodes")) {
      TreeNode nd;
      const int first = nj.at(0).get<int>();
      if (first >= 0) {
        nd.feature = first;
        nd.threshold = nj.at(1).get<double>();
        nd.left = nj.at(2).get<int>();
        nd.right = nj.at(3).get<int>();
      } else {
        nd.feature = -1;
        nd.majority = nj.at(1).get<int>();
        nd.class_counts = nj.at(2).get<std::vector<long long>>();
      }
      tree.nodes.push_back(std::move(nd));
    }
    // membership multiplicities are not preserved on disk
    tree.bootstrap = rle_decode(tj.at("bootstrap_rle"));
    std::vector<bool> in_bag(static_cast<std::size_t>(n_rows), false);
    for (int r : tree.bootstrap) in_bag[static_cast<std::size_t>(r)] = true;
    std::vector<int> oob;
    for (int i = 0; i < n_rows; ++i) {
      if (!in_bag[static_cast<std::size_t>(i)]) oob.push_back(i);
    }
    model.oob_rows.push_back(std::move(oob));
    model.trees.push_back(std::move(tree));
  }
  return model;
}

void write_forest_json(const ForestModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path);
  out << forest_to_json(model) << "\n";
  if (!out.flush()) throw IoError("failed writing file: " + path);
}

ForestModel read_forest_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return forest_from_json(text);
}

}  // namespace emorec
