/*
 * Copyright 2026 The gadm Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 */

#pragma once

#include <optional>
#include <vector>

#include "gadm/types.hpp"

/// Squared-exponential kernel regression (Gaussian-process mean) with analytic derivatives.
namespace gadm::regression {

struct RegressorModel {
  Matrix train_inputs;   // N x p
  Matrix train_targets;  // N x q
  double bandwidth_eps = 1.0;
  double nugget = 0.0;
  Matrix weights;  // N x q, (K + nugget I) weights = targets

  [[nodiscard]] Eigen::Index size() const { return train_inputs.rows(); }
  [[nodiscard]] Eigen::Index input_dim() const { return train_inputs.cols(); }
  [[nodiscard]] Eigen::Index output_dim() const { return train_targets.cols(); }

  /// The model restricted to output columns [first, first + count). Exact, since columns are independent.
  [[nodiscard]] RegressorModel columns(Eigen::Index first, Eigen::Index count) const;
  [[nodiscard]] RegressorModel columns(const std::vector<Eigen::Index>& indices) const;
};

/// Solves (K + nugget I) W = targets. `reuse_kernel`, when given, must be the kernel of `inputs` at `eps`.
[[nodiscard]] RegressorModel fit(const Matrix& inputs, const Matrix& targets, double eps, double nugget,
                                 const Matrix* reuse_kernel = nullptr);

struct Prediction {
  Vector value;                // q
  Matrix jacobian;             // q x p, filled for order >= 1
  std::vector<Matrix> second;  // q entries of p x p, filled for order == 2
};

[[nodiscard]] Prediction predict_with_derivatives(const RegressorModel& model, const Vector& x, int order);
[[nodiscard]] Vector predict(const RegressorModel& model, const Vector& x);
/// Row-wise predictions for a batch of inputs.
[[nodiscard]] Matrix predict_batch(const RegressorModel& model, const Matrix& inputs);

/// Coefficient of determination averaged over output components.
[[nodiscard]] double score(const RegressorModel& model, const Matrix& test_inputs, const Matrix& test_targets);

struct NuggetSelection {
  std::vector<double> candidates{1e-8, 1e-6, 1e-4};
  double target_score = 0.99;
  Eigen::Index holdout_stride = 5;  // every 5th sample (20%) is held out
};

struct FitReport {
  RegressorModel model;
  double holdout_score = 0.0;
  bool accepted = false;
};

/// Picks the smallest nugget whose held-out score reaches the target, then refits on all samples.
/// When no candidate qualifies the best-scoring one is used and `accepted` is false.
[[nodiscard]] FitReport fit_selecting_nugget(const Matrix& inputs, const Matrix& targets, double eps,
                                             const Matrix* reuse_kernel = nullptr,
                                             const NuggetSelection& selection = {});

}  // namespace gadm::regression
