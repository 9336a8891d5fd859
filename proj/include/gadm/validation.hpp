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

#include <cstdint>
#include <string>
#include <vector>

#include "gadm/types.hpp"

/// Cross-checks of the geometry module against the closed-form stereographic sphere chart.
namespace gadm::validation {

inline constexpr double kAnalyticTolerance = 1e-6;
inline constexpr double kFiniteDifferenceTolerance = 1e-4;

struct QuantityError {
  std::string name;
  bool finite_difference = false;
  double max_relative_error = 0.0;

  [[nodiscard]] double tolerance() const {
    return finite_difference ? kFiniteDifferenceTolerance : kAnalyticTolerance;
  }
  [[nodiscard]] bool passed() const { return max_relative_error < tolerance(); }
};

struct GeometryReport {
  int n_points = 0;
  std::uint64_t seed = 0;
  std::vector<QuantityError> errors;

  [[nodiscard]] bool passed() const;
};

/// ||a - b|| / max(||b||, 1e-3), Frobenius norms.
[[nodiscard]] double relative_error(const Matrix& a, const Matrix& b);

/// Uniform point in the disk |u| < radius.
[[nodiscard]] std::vector<Vector> random_chart_points(int n, std::uint64_t seed, double radius = 2.0);

/// Compares metric, connection, force and Hessian from the geometry module with the closed forms at n random
/// points of the disk |u| < 2. `christoffel_scale` multiplies every computed connection coefficient; values
/// other than 1 exist to check that the comparison detects a broken connection.
[[nodiscard]] GeometryReport validate_sphere_geometry(int n_points, std::uint64_t seed,
                                                      double christoffel_scale = 1.0);

}  // namespace gadm::validation
