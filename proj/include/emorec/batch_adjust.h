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

#ifndef EMOREC_BATCH_ADJUST_H_
#define EMOREC_BATCH_ADJUST_H_

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "emorec/features.h"

namespace emorec {

// Session-level additive and multiplicative effects on the energy-band
// variables, removed with the parametric empirical-Bayes location-scale
// model: Y_ijf = alpha_f + X beta_f + gamma_if + delta_if E_ijf. Additive
// effects get a normal prior, squared multiplicative effects an inverse
// gamma prior; the posterior means replace the per-batch estimates.

enum class DesignMode { kEmotion, kNone };

struct BatchAdjustOptions {
  DesignMode design = DesignMode::kEmotion;
  double convergence = 1e-4;
  int max_iterations = 100;
};

struct BatchPriors {
  std::string batch_id;
  int n = 0;                        // observations in the batch
  Eigen::VectorXd gamma_hat;        // per-feature batch mean of Z
  Eigen::VectorXd delta2_hat;       // per-feature batch variance of Z
  double gamma_bar = 0.0;           // mean of gamma_hat across features
  double tau2 = 0.0;                // variance of gamma_hat across features
  double lambda = 0.0;              // inverse-gamma shape (moment-matched)
  double theta = 0.0;               // inverse-gamma scale (moment-matched)
  bool degenerate = false;          // var(delta2_hat) == 0: EB shrinkage skipped
  Eigen::VectorXd gamma_star;       // posterior additive effect
  Eigen::VectorXd delta2_star;      // posterior multiplicative effect
  bool converged = true;
};

struct BatchModel {
  std::vector<std::string> batch_ids;
  std::vector<int> batch_of_row;    // row -> index into batch_ids
  DesignMode design = DesignMode::kEmotion;
  std::vector<std::string> design_columns;
  Eigen::VectorXd alpha;            // per-feature grand mean
  Eigen::MatrixXd beta;             // design coefficients (cols x features)
  Eigen::VectorXd sigma2;           // per-feature pooled variance
  Eigen::MatrixXd z;                // standardized data (rows x features)
  std::vector<BatchPriors> priors;
  std::vector<int> skipped_features;  // zero variance, passed through
  std::vector<std::string> warnings;
  bool bypassed = false;            // single-batch bypass: adjustment is identity
};

// Step 1: least-squares fit of alpha, beta and per-batch means under the
// constraint sum_i n_i gamma_i = 0, pooled variance, and standardization
// Z = (Y - alpha - X beta) / sigma. Requires >= 2 batches with >= 2
// observations each. Zero-variance features are flagged and skipped.
BatchModel standardize(const Eigen::MatrixXd& y,
                       const std::vector<std::string>& batch_of_row,
                       const std::vector<Emotion>& emotions,
                       const BatchAdjustOptions& options = {});

// Step 2: per-batch moment estimates and the normal / inverse-gamma
// hyper-parameters. Fills model->priors.
void estimate_priors(BatchModel* model);

// Steps 2-3: iterates the coupled posterior means to a fixed point
// (gamma*, delta2*) per batch and feature.
void posterior_adjust(BatchModel* model, const BatchAdjustOptions& options = {});

// Step 3: Y* = sigma/delta* (Z - gamma*) + alpha + X beta. Returns the
// adjusted matrix; skipped features are returned untouched.
Eigen::MatrixXd reconstruct(const BatchModel& model,
                            const Eigen::MatrixXd& original);

// Convenience wrapper: standardize + priors + posterior + reconstruct over
// the FB block of `table` (other blocks pass through bit-identically).
// With allow_single_batch set, a single-batch table is returned unchanged
// and the model is marked bypassed; otherwise a single batch is an error.
struct AdjustResult {
  FeatureTable table;
  BatchModel model;
};
AdjustResult adjust_feature_table(const FeatureTable& table,
                                  const std::string& batch_column,
                                  const BatchAdjustOptions& options = {},
                                  bool allow_single_batch = false);

// Model audit file (versioned JSON).
void write_batch_model_json(const BatchModel& model, const std::string& path);

}  // namespace emorec

#endif  // EMOREC_BATCH_ADJUST_H_
