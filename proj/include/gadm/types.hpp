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

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace gadm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Coordinates of a point in a local chart.
struct ChartPoint {
  Vector u;
};

/// Components of a tangent vector in the coordinate basis of a chart.
struct TangentVector {
  Vector components;
};

struct MetricTensor {
  Matrix g;
  Matrix g_inv;

  [[nodiscard]] Eigen::Index dim() const { return g.rows(); }
  [[nodiscard]] double inner(const Vector& a, const Vector& b) const { return a.dot(g * b); }
  [[nodiscard]] double norm(const Vector& a) const;
};

/// Christoffel symbols of the second kind, stored as gamma(l, j, k) = Γ^l_jk.
class ChristoffelSymbols {
 public:
  ChristoffelSymbols() = default;
  explicit ChristoffelSymbols(Eigen::Index dim) : dim_(dim), data_(static_cast<std::size_t>(dim * dim * dim), 0.0) {}

  [[nodiscard]] Eigen::Index dim() const { return dim_; }

  double& operator()(Eigen::Index l, Eigen::Index j, Eigen::Index k) { return data_[index(l, j, k)]; }
  double operator()(Eigen::Index l, Eigen::Index j, Eigen::Index k) const { return data_[index(l, j, k)]; }

  [[nodiscard]] double max_abs() const;

 private:
  [[nodiscard]] std::size_t index(Eigen::Index l, Eigen::Index j, Eigen::Index k) const {
    return static_cast<std::size_t>((l * dim_ + j) * dim_ + k);
  }

  Eigen::Index dim_ = 0;
  std::vector<double> data_;
};

/// Covariant Hessian in (0,2) form (`lower`) and (1,1) form (`mixed`).
struct CovariantHessian {
  Matrix lower;
  Matrix mixed;
};

/// Point of the extended (x, v) phase space of gentlest ascent dynamics.
struct GADState {
  Vector x;
  Vector v;
};

// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Rank-deficient chart or failed fit: the caller should resample.
class DegenerateChartError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, Vector point) : Error(what), point_(std::move(point)) {}
  [[nodiscard]] const Vector& point() const { return point_; }

 private:
  Vector point_;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

[[nodiscard]] bool all_finite(const Vector& v);
[[nodiscard]] bool all_finite(const Matrix& m);

}  // namespace gadm
