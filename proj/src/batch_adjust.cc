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

#include "emorec/batch_adjust.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "emorec/common.h"
#include "json.hpp"

namespace emorec {

namespace {

struct DesignInfo {
  Eigen::MatrixXd x;  // n x p, one-hot emotions minus a reference level
  std::vector<std::string> column_names;
};

DesignInfo build_design(const std::vector<Emotion>& emotions,
                        DesignMode mode) {
  DesignInfo info;
  const auto n = static_cast<Eigen::Index>(emotions.size());
  if (mode == DesignMode::kNone) {
    info.x.resize(n, 0);
    return info;
  }
  std::set<Emotion> present(emotions.begin(), emotions.end());
  std::vector<Emotion> levels;
  for (Emotion e : kAllEmotions) {
    if (present.count(e)) levels.push_back(e);
  }
  // first present level is the reference, absorbed into alpha
  info.x.resize(n, static_cast<Eigen::Index>(levels.size()) - 1);
  info.x.setZero();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (std::size_t c = 1; c < levels.size(); ++c) {
      if (emotions[static_cast<std::size_t>(i)] == levels[c]) {
        info.x(i, static_cast<Eigen::Index>(c - 1)) = 1.0;
      }
    }
  }
  for (std::size_t c = 1; c < levels.size(); ++c) {
    info.column_names.push_back("emotion:" + emotion_name(levels[c]));
  }
  return info;
}

}  // namespace

BatchModel standardize(const Eigen::MatrixXd& y,
                       const std::vector<std::string>& batch_of_row,
                       const std::vector<Emotion>& emotions,
                       const BatchAdjustOptions& options) {
  const auto n = y.rows();
  const auto n_features = y.cols();
  if (static_cast<Eigen::Index>(batch_of_row.size()) != n ||
      (options.design == DesignMode::kEmotion &&
       static_cast<Eigen::Index>(emotions.size()) != n)) {
    throw ArgError("row metadata does not match the data matrix");
  }

  BatchModel model;
  model.design = options.design;

  // Batches in order of first appearance.
  std::map<std::string, int> batch_index;
  model.batch_of_row.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::string& b = batch_of_row[static_cast<std::size_t>(i)];
    auto it = batch_index.find(b);
    if (it == batch_index.end()) {
      it = batch_index.emplace(b, static_cast<int>(model.batch_ids.size()))
               .first;
      model.batch_ids.push_back(b);
    }
    model.batch_of_row[static_cast<std::size_t>(i)] = it->second;
  }
  const auto m = static_cast<Eigen::Index>(model.batch_ids.size());
  if (m < 2) {
    throw ValidationError(
        "batch adjustment needs at least 2 batches (got " +
        std::to_string(m) + "); nothing to adjust");
  }
  Eigen::VectorXd batch_sizes = Eigen::VectorXd::Zero(m);
  for (int b : model.batch_of_row) batch_sizes(b) += 1.0;
  for (Eigen::Index b = 0; b < m; ++b) {
    if (batch_sizes(b) < 2) {
      throw ValidationError("batch '" + model.batch_ids[static_cast<std::size_t>(b)] +
                            "' has fewer than 2 observations");
    }
  }

  DesignInfo design = build_design(
      emotions, options.design);
  model.design_columns = design.column_names;
  const Eigen::Index p = design.x.cols();

  Eigen::MatrixXd d(n, m + p);
  d.setZero();
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, model.batch_of_row[static_cast<std::size_t>(i)]) = 1.0;
  }
  if (p > 0) d.rightCols(p) = design.x;

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(d);
  if (qr.rank() < m + p) {
    std::vector<std::string> names;
    for (const auto& b : model.batch_ids) names.push_back("batch:" + b);
    for (const auto& c : design.column_names) names.push_back(c);
    std::string collinear;
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index k = qr.rank(); k < m + p; ++k) {
      if (!collinear.empty()) collinear += ", ";
      collinear += names[static_cast<std::size_t>(perm(k))];
    }
    throw ValidationError(
        "singular design matrix; collinear columns: " + collinear);
  }

  const Eigen::MatrixXd theta = qr.solve(y);  // (m+p) x F
  const Eigen::MatrixXd gamma_raw = theta.topRows(m);
  model.beta = theta.bottomRows(p);

  model.alpha = Eigen::VectorXd::Zero(n_features);
  for (Eigen::Index b = 0; b < m; ++b) {
    model.alpha += (batch_sizes(b) / static_cast<double>(n)) *
                   gamma_raw.row(b).transpose();
  }

  const Eigen::MatrixXd resid = y - d * theta;
  model.sigma2 =
      resid.array().square().colwise().sum().transpose() / static_cast<double>(n);

  // Z leaves the batch effect in place: (Y - alpha - X beta) / sigma.
  model.z.resize(n, n_features);
  Eigen::MatrixXd fitted_design =
      p > 0 ? (design.x * model.beta).eval() : Eigen::MatrixXd::Zero(n, n_features);
  for (Eigen::Index f = 0; f < n_features; ++f) {
    if (model.sigma2(f) <= 0.0) {
      model.skipped_features.push_back(static_cast<int>(f));
      model.z.col(f).setZero();
      model.warnings.push_back("feature " + std::to_string(f) +
                               " has zero variance; passed through unadjusted");
      continue;
    }
    const double sigma = std::sqrt(model.sigma2(f));
    model.z.col(f) =
        (y.col(f).array() - model.alpha(f) - fitted_design.col(f).array()) /
        sigma;
  }
  return model;
}

void estimate_priors(BatchModel* model) {
  const auto n_features = model->z.cols();
  const auto m = static_cast<int>(model->batch_ids.size());
  model->priors.assign(static_cast<std::size_t>(m), BatchPriors{});

  std::set<int> skipped(model->skipped_features.begin(),
                        model->skipped_features.end());

  for (int b = 0; b < m; ++b) {
    BatchPriors& pr = model->priors[static_cast<std::size_t>(b)];
    pr.batch_id = model->batch_ids[static_cast<std::size_t>(b)];
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < model->batch_of_row.size(); ++i) {
      if (model->batch_of_row[i] == b) rows.push_back(static_cast<Eigen::Index>(i));
    }
    pr.n = static_cast<int>(rows.size());
    pr.gamma_hat = Eigen::VectorXd::Zero(n_features);
    pr.delta2_hat = Eigen::VectorXd::Zero(n_features);
    for (Eigen::Index f = 0; f < n_features; ++f) {
      double sum = 0.0;
      for (Eigen::Index i : rows) sum += model->z(i, f);
      const double mean = sum / pr.n;
      double ss = 0.0;
      for (Eigen::Index i : rows) {
        const double dzf = model->z(i, f) - mean;
        ss += dzf * dzf;
      }
      pr.gamma_hat(f) = mean;
      pr.delta2_hat(f) = ss / (pr.n - 1);
    }

    // Moments across features, excluding pass-through columns.
    double g_sum = 0.0, g_ss = 0.0, d_sum = 0.0, d_ss = 0.0;
    int count = 0;
    for (Eigen::Index f = 0; f < n_features; ++f) {
      if (skipped.count(static_cast<int>(f))) continue;
      g_sum += pr.gamma_hat(f);
      d_sum += pr.delta2_hat(f);
      ++count;
    }
    if (count == 0) {
      pr.degenerate = true;
      pr.gamma_star = pr.gamma_hat;
      pr.delta2_star = pr.delta2_hat;
      continue;
    }
    const double g_mean = g_sum / count;
    const double d_mean = d_sum / count;
    for (Eigen::Index f = 0; f < n_features; ++f) {
      if (skipped.count(static_cast<int>(f))) continue;
      g_ss += (pr.gamma_hat(f) - g_mean) * (pr.gamma_hat(f) - g_mean);
      d_ss += (pr.delta2_hat(f) - d_mean) * (pr.delta2_hat(f) - d_mean);
    }
    pr.gamma_bar = g_mean;
    pr.tau2 = count > 1 ? g_ss / (count - 1) : 0.0;
    const double s2 = count > 1 ? d_ss / (count - 1) : 0.0;
    if (s2 <= 0.0) {
      // Inverse-gamma moment matching needs spread in the batch variances.
      pr.degenerate = true;
      pr.gamma_star = pr.gamma_hat;
      pr.delta2_star = pr.delta2_hat;
      model->warnings.push_back(
          "batch '" + pr.batch_id +
          "': variance of delta2 across features is zero; EB shrinkage skipped");
      continue;
    }
    pr.lambda = (d_mean * d_mean + 2.0 * s2) / s2;
    pr.theta = (d_mean * d_mean * d_mean + d_mean * s2) / s2;
    pr.gamma_star = pr.gamma_hat;
    pr.delta2_star = pr.delta2_hat;
  }
}

void posterior_adjust(BatchModel* model, const BatchAdjustOptions& options) {
  const auto n_features = model->z.cols();
  std::set<int> skipped(model->skipped_features.begin(),
                        model->skipped_features.end());

  for (auto& pr : model->priors) {
    if (pr.degenerate) continue;
    const int b = static_cast<int>(&pr - model->priors.data());
    // Per-feature sums over the batch rows make the residual sum O(1)
    // inside the fixed-point loop.
    Eigen::VectorXd z_sum = Eigen::VectorXd::Zero(n_features);
    Eigen::VectorXd z_sq = Eigen::VectorXd::Zero(n_features);
    for (std::size_t i = 0; i < model->batch_of_row.size(); ++i) {
      if (model->batch_of_row[i] != b) continue;
      const auto row = static_cast<Eigen::Index>(i);
      z_sum += model->z.row(row).transpose();
      z_sq += model->z.row(row).transpose().cwiseProduct(
          model->z.row(row).transpose());
    }
    const double n_i = pr.n;
    for (Eigen::Index f = 0; f < n_features; ++f) {
      if (skipped.count(static_cast<int>(f))) continue;
      double g = pr.gamma_hat(f);
      double d2 = pr.delta2_hat(f);
      bool converged = false;
      for (int it = 0; it < options.max_iterations; ++it) {
        const double g_new = (n_i * pr.tau2 * pr.gamma_hat(f) + d2 * pr.gamma_bar) /
                             (n_i * pr.tau2 + d2);
        const double ss =
            z_sq(f) - 2.0 * g_new * z_sum(f) + n_i * g_new * g_new;
        const double d2_new =
            (pr.theta + 0.5 * ss) / (n_i / 2.0 + pr.lambda - 1.0);
        const double change = std::max(
            std::fabs(g_new - g) / (std::fabs(g) + 1e-30),
            std::fabs(d2_new - d2) / (std::fabs(d2) + 1e-30));
        g = g_new;
        d2 = d2_new;
        if (change < options.convergence) {
          converged = true;
          break;
        }
      }
      if (!converged) {
        pr.converged = false;
      }
      pr.gamma_star(f) = g;
      pr.delta2_star(f) = d2;
    }
    if (!pr.converged) {
      model->warnings.push_back("batch '" + pr.batch_id +
                                "': posterior fixed point hit the iteration cap;"
                                " using the last iterate");
    }
  }
}

Eigen::MatrixXd reconstruct(const BatchModel& model,
                            const Eigen::MatrixXd& original) {
  Eigen::MatrixXd out = original;
  const auto n = original.rows();
  const auto n_features = original.cols();
  std::set<int> skipped(model.skipped_features.begin(),
                        model.skipped_features.end());

  // Rebuild the per-row design contribution from stored coefficients.
  Eigen::MatrixXd fitted_design = Eigen::MatrixXd::Zero(n, n_features);
  if (model.beta.rows() > 0) {
    // Z already has alpha + X beta removed; recover X beta per row as
    // (Y - alpha - sigma Z) restricted to non-skipped features.
    for (Eigen::Index f = 0; f < n_features; ++f) {
      if (skipped.count(static_cast<int>(f))) continue;
      const double sigma = std::sqrt(model.sigma2(f));
      fitted_design.col(f) = original.col(f).array() - model.alpha(f) -
                             sigma * model.z.col(f).array();
    }
  }

  for (Eigen::Index f = 0; f < n_features; ++f) {
    if (skipped.count(static_cast<int>(f))) continue;
    const double sigma = std::sqrt(model.sigma2(f));
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& pr =
          model.priors[static_cast<std::size_t>(
              model.batch_of_row[static_cast<std::size_t>(i)])];
      const double dstar = std::sqrt(pr.delta2_star(f));
      out(i, f) = sigma / dstar * (model.z(i, f) - pr.gamma_star(f)) +
                  model.alpha(f) + fitted_design(i, f);
    }
  }
  return out;
}

AdjustResult adjust_feature_table(const FeatureTable& table,
                                  const std::string& batch_column,
                                  const BatchAdjustOptions& options,
                                  bool allow_single_batch) {
  const std::vector<std::string>* batches = nullptr;
  if (batch_column == "session_id") {
    batches = &table.session_ids;
  } else if (batch_column == "speaker_id") {
    batches = &table.speaker_ids;
  } else {
    throw ArgError("unsupported batch column '" + batch_column +
                   "' (use session_id or speaker_id)");
  }
  if (table.group == FeatureGroup::kFrequency ||
      table.group == FeatureGroup::kVoiceQuality) {
    throw ValidationError(
        "feature table holds no energy-band (FB) variables to adjust");
  }

  AdjustResult result;
  result.table = table;

  std::set<std::string> distinct(batches->begin(), batches->end());
  if (distinct.size() < 2) {
    if (!allow_single_batch) {
      throw ValidationError(
          "batch adjustment needs at least 2 batches (got " +
          std::to_string(distinct.size()) + "); nothing to adjust");
    }
    result.model.bypassed = true;
    if (!distinct.empty()) result.model.batch_ids = {*distinct.begin()};
    return result;  // identity: output equals input exactly
  }

  const auto [fb_begin, fb_end] = table.group_columns(FeatureGroup::kFilterBank);
  const Eigen::MatrixXd y =
      table.values.middleCols(fb_begin, fb_end - fb_begin);
  result.model = standardize(y, *batches, table.emotions, options);
  estimate_priors(&result.model);
  posterior_adjust(&result.model, options);
  result.table.values.middleCols(fb_begin, fb_end - fb_begin) =
      reconstruct(result.model, y);
  return result;
}

void write_batch_model_json(const BatchModel& model, const std::string& path) {
  nlohmann::ordered_json j;
  j["schema"] = "emorec-batch-model";
  j["version"] = 1;
  j["bypassed"] = model.bypassed;
  j["design"] = model.design == DesignMode::kEmotion ? "emotion" : "none";
  j["design_columns"] = model.design_columns;
  j["batches"] = model.batch_ids;
  auto vec = [](const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  if (!model.bypassed) {
    j["alpha"] = vec(model.alpha);
    j["sigma2"] = vec(model.sigma2);
    nlohmann::ordered_json beta = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < model.beta.rows(); ++r) {
      beta.push_back(vec(model.beta.row(r).transpose()));
    }
    j["beta"] = beta;
    nlohmann::ordered_json batches = nlohmann::ordered_json::array();
    for (const auto& pr : model.priors) {
      nlohmann::ordered_json pj;
      pj["batch"] = pr.batch_id;
      pj["n"] = pr.n;
      pj["gamma_bar"] = pr.gamma_bar;
      pj["tau2"] = pr.tau2;
      pj["lambda"] = pr.lambda;
      pj["theta"] = pr.theta;
      pj["degenerate"] = pr.degenerate;
      pj["converged"] = pr.converged;
      pj["gamma_hat"] = vec(pr.gamma_hat);
      pj["delta2_hat"] = vec(pr.delta2_hat);
      pj["gamma_star"] = vec(pr.gamma_star);
      pj["delta2_star"] = vec(pr.delta2_star);
      batches.push_back(pj);
    }
    j["batch_estimates"] = batches;
    j["skipped_features"] = model.skipped_features;
  }
  j["warnings"] = model.warnings;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write file: " + path);
  out << j.dump(2) << "\n";
  if (!out.flush()) throw IoError("failed writing file: " + path);
}

}  // namespace emorec
