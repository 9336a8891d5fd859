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

#include <functional>
#include <optional>
#include <string>

#include "gadm/types.hpp"

namespace gadm {

/// Closed-form geometry of a known chart, evaluated at a chart point.
struct ChartGeometry {
  Vector ambient;        // psi(u)
  Matrix jacobian;       // d psi / du, n x d
  MetricTensor metric;
  ChristoffelSymbols gamma;
  TangentVector force;   // chart representation of X = -grad U
  CovariantHessian hessian;
};

/// Analytic chart used by the oracle mode; no learning involved.
struct ExactChart {
  Eigen::Index dim = 0;
  std::function<Vector(const Vector&)> phi;  // ambient -> chart
  std::function<Vector(const Vector&)> psi;  // chart -> ambient
  std::function<ChartGeometry(const ChartPoint&)> evaluate;
};

/// A gradient system X = -grad U on a manifold embedded in R^n.
struct ProblemDefinition {
  std::string name;
  Eigen::Index ambient_dim = 0;
  std::function<double(const Vector&)> energy;
  std::function<Vector(const Vector&)> force;    // tangent to the manifold
  std::function<Vector(const Vector&)> project;  // closest point on the manifold
  std::optional<ExactChart> exact_chart;

  [[nodiscard]] double projection_residual(const Vector& x) const { return (project(x) - x).norm(); }
};

}  // namespace gadm
