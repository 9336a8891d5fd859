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

#include <vector>

#include "gadm/types.hpp"

/// Diffusion-map coordinates on a local point-cloud and chart component selection.
namespace gadm::dimred {

struct PointCloud {
  Matrix points;  // N x n ambient samples
  Matrix forces;  // N x n, force at each sample
  Vector base_point;

  [[nodiscard]] Eigen::Index size() const { return points.rows(); }
  [[nodiscard]] Eigen::Index ambient_dim() const { return points.cols(); }
};

/// Checks the PointCloud invariants; throws PreconditionError.
void validate(const PointCloud& cloud);

struct DiffusionMapResult {
  Vector eigenvalues;         // descending, eigenvalues(0) == 1 is the trivial pair
  Matrix raw_eigenvectors;    // N x (m + 1), right eigenvectors, column 0 constant
  Matrix coordinates;         // N x m, eigenvalue-scaled nontrivial eigenvectors
  double bandwidth_eps = 0.0;
  Matrix kernel;              // N x N Gaussian kernel before density normalization
};

/// Squared median of the pairwise distances.
[[nodiscard]] double bandwidth_median_rule(const Matrix& points);

/// Density-normalized (alpha = 1) diffusion map with `n_components` nontrivial coordinates.
[[nodiscard]] DiffusionMapResult diffusion_maps(const Matrix& points, double eps, Eigen::Index n_components);

/// Top `count` eigenpairs of a symmetric positive semidefinite matrix, eigenvalues descending.
/// Uses a dense solver for small matrices and block subspace iteration otherwise.
struct SymmetricEigen {
  Vector values;
  Matrix vectors;
};
[[nodiscard]] SymmetricEigen top_eigenpairs(const Matrix& a, Eigen::Index count);

struct ChartSelection {
  int dimension = 0;
  std::vector<Eigen::Index> components;
};

inline constexpr double kDefaultRankTolerance = 0.05;

/// Chart dimension from the average numerical rank of the given Jacobians (one row per diffusion component),
/// then a greedy scan keeping components that raise the rank at >= 90% of evaluation points.
[[nodiscard]] ChartSelection select_chart_components(const DiffusionMapResult& dmap,
                                                     const std::vector<Matrix>& phi_jacobians,
                                                     double rank_tol = kDefaultRankTolerance);

/// Number of singular values above rank_tol times the largest.
[[nodiscard]] int numerical_rank(const Matrix& m, double rank_tol);

}  // namespace gadm::dimred
