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

#include "gadm/regression.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <string>

#include "gadm/kernel.hpp"

namespace gadm::regression {

namespace {

void check_reused_kernel(const Matrix& inputs, double eps, const Matrix& kernel) {
  const Eigen::Index n = inputs.rows();
  if (kernel.rows() != n || kernel.cols() != n) throw PreconditionError("fit: reused kernel has the wrong size");
  // Spot check O(N) entries; a full comparison would cost as much as rebuilding the kernel.
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index j = (7 * i + 3) % n;
    const double expected = squared_exponential(inputs.row(i).transpose(), inputs.row(j).transpose(), eps);
    if (!(std::abs(kernel(i, j) - expected) <= 1e-12)) {
      throw PreconditionError("fit: reused kernel does not match inputs and bandwidth");
    }
  }
}

Matrix solve_regularized(Matrix system, const Matrix& targets, double nugget) {
  system.diagonal().array() += nugget;
  const Eigen::LLT<Matrix> llt(system);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e2 * std::numeric_limits<double>::epsilon())) {
    throw SolverError("fit: kernel system is singular (duplicate inputs or too small a nugget)");
  }
  return llt.solve(targets);
}

}  // namespace

RegressorModel RegressorModel::columns(Eigen::Index first, Eigen::Index count) const {
  RegressorModel out;
  out.train_inputs = train_inputs;
  out.train_targets = train_targets.middleCols(first, count);
  out.bandwidth_eps = bandwidth_eps;
  out.nugget = nugget;
  out.weights = weights.middleCols(first, count);
  return out;
}

RegressorModel RegressorModel::columns(const std::vector<Eigen::Index>& indices) const {
  RegressorModel out;
  out.train_inputs = train_inputs;
  out.train_targets = train_targets(Eigen::all, indices);
  out.bandwidth_eps = bandwidth_eps;
  out.nugget = nugget;
  out.weights = weights(Eigen::all, indices);
  return out;
}

RegressorModel fit(const Matrix& inputs, const Matrix& targets, double eps, double nugget,
                   const Matrix* reuse_kernel) {
  if (!(eps > 0.0)) throw PreconditionError("fit: eps must be positive");
  if (!(nugget >= 0.0)) throw PreconditionError("fit: nugget must be non-negative");
  if (inputs.rows() != targets.rows() || inputs.rows() == 0) {
    throw PreconditionError("fit: inputs and targets must have the same positive number of rows");
  }
  RegressorModel model;
  model.train_inputs = inputs;
  model.train_targets = targets;
  model.bandwidth_eps = eps;
  model.nugget = nugget;
  if (reuse_kernel != nullptr) {
    check_reused_kernel(inputs, eps, *reuse_kernel);
    model.weights = solve_regularized(*reuse_kernel, targets, nugget);
  } else {
    model.weights = solve_regularized(squared_exponential_kernel(inputs, eps), targets, nugget);
  }
  return model;
}

Prediction predict_with_derivatives(const RegressorModel& model, const Vector& x, int order) {
  if (order < 0 || order > 2) throw PreconditionError("predict_with_derivatives: order must be 0, 1 or 2");
  if (x.size() != model.input_dim()) throw PreconditionError("predict_with_derivatives: input dimension mismatch");
  const double eps = model.bandwidth_eps;
  // delta(i, :) = x - x_i
  const Matrix delta = (-model.train_inputs).rowwise() + x.transpose();
  const Vector k = (-delta.rowwise().squaredNorm() / (2.0 * eps)).array().exp().matrix();
  const Matrix t = model.weights.array().colwise() * k.array();  // N x q

  Prediction out;
  out.value = t.colwise().sum().transpose();
  if (order >= 1) out.jacobian = -(t.transpose() * delta) / eps;
  if (order == 2) {
    out.second.reserve(static_cast<std::size_t>(model.output_dim()));
    for (Eigen::Index a = 0; a < model.output_dim(); ++a) {
      Matrix s = delta.transpose() * (delta.array().colwise() * t.col(a).array()).matrix() / (eps * eps);
      s.diagonal().array() -= out.value(a) / eps;
      out.second.push_back(0.5 * (s + s.transpose()));
    }
  }
  return out;
}

Vector predict(const RegressorModel& model, const Vector& x) { return predict_with_derivatives(model, x, 0).value; }

Matrix predict_batch(const RegressorModel& model, const Matrix& inputs) {
  Matrix out(inputs.rows(), model.output_dim());
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) out.row(i) = predict(model, inputs.row(i).transpose()).transpose();
  return out;
}

double score(const RegressorModel& model, const Matrix& test_inputs, const Matrix& test_targets) {
  if (test_inputs.rows() != test_targets.rows() || test_inputs.rows() == 0) {
    throw PreconditionError("score: test inputs and targets must have the same positive number of rows");
  }
  const Matrix predicted = predict_batch(model, test_inputs);
  const auto rows = static_cast<double>(test_targets.rows());
  double total = 0.0;
  for (Eigen::Index c = 0; c < test_targets.cols(); ++c) {
    const double mean = test_targets.col(c).mean();
    const double ss_tot = (test_targets.col(c).array() - mean).square().sum();
    const double ss_res = (test_targets.col(c) - predicted.col(c)).squaredNorm();
    if (ss_tot == 0.0) {
      if (ss_res <= 1e-20 * rows * std::max(1.0, mean * mean)) {
        total += 1.0;
        continue;
      }
      throw PreconditionError("score: zero-variance target component " + std::to_string(c) +
                              " with nonzero residuals");
    }
    total += 1.0 - ss_res / ss_tot;
  }
  return total / static_cast<double>(test_targets.cols());
}

FitReport fit_selecting_nugget(const Matrix& inputs, const Matrix& targets, double eps, const Matrix* reuse_kernel,
                               const NuggetSelection& selection) {
  const Eigen::Index n = inputs.rows();
  if (selection.candidates.empty()) throw PreconditionError("fit_selecting_nugget: no nugget candidates");
  const Eigen::Index stride = std::max<Eigen::Index>(selection.holdout_stride, 2);
  std::vector<Eigen::Index> train;
  std::vector<Eigen::Index> held;
  for (Eigen::Index i = 0; i < n; ++i) (i % stride == stride - 1 ? held : train).push_back(i);
  if (held.empty() || train.size() < 2) throw PreconditionError("fit_selecting_nugget: too few samples");

  Matrix full_kernel;
  if (reuse_kernel == nullptr) {
    full_kernel = squared_exponential_kernel(inputs, eps);
    reuse_kernel = &full_kernel;
  } else {
    check_reused_kernel(inputs, eps, *reuse_kernel);
  }
  const Matrix train_kernel = (*reuse_kernel)(train, train);
  const Matrix train_inputs = inputs(train, Eigen::all);
  const Matrix train_targets = targets(train, Eigen::all);
  const Matrix held_inputs = inputs(held, Eigen::all);
  const Matrix held_targets = targets(held, Eigen::all);

  double best_score = -std::numeric_limits<double>::infinity();
  double best_nugget = selection.candidates.back();
  bool accepted = false;
  for (double nugget : selection.candidates) {
    double s = -std::numeric_limits<double>::infinity();
    try {
      const RegressorModel trial = fit(train_inputs, train_targets, eps, nugget, &train_kernel);
      s = score(trial, held_inputs, held_targets);
    } catch (const SolverError&) {
      continue;
    }
    if (s > best_score) {
      best_score = s;
      best_nugget = nugget;
    }
    if (s >= selection.target_score) {
      best_score = s;
      best_nugget = nugget;
      accepted = true;
      break;
    }
  }
  FitReport report;
  report.model = fit(inputs, targets, eps, best_nugget, reuse_kernel);
  report.holdout_score = best_score;
  report.accepted = accepted;
  return report;
}

}  // namespace gadm::regression
