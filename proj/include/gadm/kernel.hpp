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

#include "gadm/types.hpp"

namespace gadm {

/// Squared-exponential kernel matrix K_ij = exp(-|x_i - x_j|^2 / (2 eps)) over the rows of `points`.
/// Shared by diffusion maps and regression so that a reused kernel is bitwise identical to a fresh one.
[[nodiscard]] Matrix squared_exponential_kernel(const Matrix& points, double eps);

/// Single kernel entry, evaluated exactly as squared_exponential_kernel does.
[[nodiscard]] double squared_exponential(const Eigen::Ref<const Vector>& a, const Eigen::Ref<const Vector>& b,
                                         double eps);

/// All pairwise Euclidean distances d(i, j), i < j, in row-major order.
[[nodiscard]] std::vector<double> pairwise_distances(const Matrix& points);

/// Median of pairwise distances, squared.
[[nodiscard]] double median_bandwidth(const Matrix& points);

}  // namespace gadm
