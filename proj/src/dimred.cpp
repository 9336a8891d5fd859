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

#include "gadm/dimred.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "gadm/kernel.hpp"

namespace gadm::dimred {

namespace {

constexpr Eigen::Index kDenseLimit = 600;
constexpr int kMaxSubspaceIterations = 2000;
constexpr double kSubspaceTolerance = 1e-11;

SymmetricEigen dense_top(const Matrix& a, Eigen::Index count) {
  const Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) throw SolverError("diffusion_maps: eigensolver failed");
  SymmetricEigen out;
  out.values = solver.eigenvalues().tail(count).reverse();
  out.vectors = solver.eigenvectors().rightCols(count).rowwise().reverse();
  return out;
}

Matrix orthonormalize(const Matrix& z) {
  const Eigen::HouseholderQR<Matrix> qr(z);
  return qr.householderQ() * Matrix::Identity(z.rows(), z.cols());
}

// Block subspace iteration with Rayleigh-Ritz; deterministic for a fixed matrix.
SymmetricEigen subspace_top(const Matrix& a, Eigen::Index count) {
  const Eigen::Index n = a.rows();
  const Eigen::Index block = std::min(n, count + 8);
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal;
  Matrix q(n, block);
  for (Eigen::Index j = 0; j < block; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) q(i, j) = normal(rng);
  }
  q = orthonormalize(q);

  const double scale = std::max(a.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  for (int iter = 0; iter < kMaxSubspaceIterations; ++iter) {
    const Matrix z = a * q;
    Matrix h = q.transpose() * z;
    h = 0.5 * (h + h.transpose()).eval();
    const Eigen::SelfAdjointEigenSolver<Matrix> small(h);
    const Matrix s = small.eigenvectors().rowwise().reverse();
    const Vector theta = small.eigenvalues().reverse();
    const Matrix ritz = q * s;
    const Matrix az = z * s;
    double residual = 0.0;
    for (Eigen::Index j = 0; j < count; ++j) {
      residual = std::max(residual, (az.col(j) - theta(j) * ritz.col(j)).norm());
    }
    if (residual <= kSubspaceTolerance * scale) {
      return {theta.head(count), ritz.leftCols(count)};
    }
    q = orthonormalize(az);
  }
  throw SolverError("diffusion_maps: subspace iteration did not converge");
}

}  // namespace

void validate(const PointCloud& cloud) {
  if (cloud.points.rows() < 2) throw PreconditionError("PointCloud: need at least two points");
  if (cloud.forces.rows() != cloud.points.rows() || cloud.forces.cols() != cloud.points.cols()) {
    throw PreconditionError("PointCloud: forces must match points");
  }
  if (!cloud.points.allFinite() || !cloud.forces.allFinite()) throw PreconditionError("PointCloud: non-finite rows");
}

double bandwidth_median_rule(const Matrix& points) {
  if (points.rows() < 2) throw PreconditionError("bandwidth_median_rule: need at least two points");
  return median_bandwidth(points);
}

SymmetricEigen top_eigenpairs(const Matrix& a, Eigen::Index count) {
  if (count <= 0 || count > a.rows()) throw PreconditionError("top_eigenpairs: invalid count");
  return a.rows() <= kDenseLimit ? dense_top(a, count) : subspace_top(a, count);
}

DiffusionMapResult diffusion_maps(const Matrix& points, double eps, Eigen::Index n_components) {
  if (!(eps > 0.0)) throw PreconditionError("diffusion_maps: eps must be positive");
  const Eigen::Index n = points.rows();
  if (n_components < 1 || n_components >= n) throw PreconditionError("diffusion_maps: need 1 <= n_components < N");

  DiffusionMapResult out;
  out.bandwidth_eps = eps;
  out.kernel = squared_exponential_kernel(points, eps);

  // alpha = 1 density normalization, then symmetric conjugate of the Markov matrix.
  const Vector density = out.kernel.rowwise().sum();
  Matrix a(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      const double value = out.kernel(i, j) / (density(i) * density(j));
      a(i, j) = value;
      a(j, i) = value;
    }
  }
  const Vector degree = a.rowwise().sum();
  const Vector inv_sqrt_degree = degree.cwiseSqrt().cwiseInverse();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      const double value = a(i, j) * (inv_sqrt_degree(i) * inv_sqrt_degree(j));
      a(i, j) = value;
      a(j, i) = value;
    }
  }

  const SymmetricEigen eig = top_eigenpairs(a, n_components + 1);
  out.eigenvalues = eig.values;
  // right eigenvectors, normalized so that sum_i pi_i psi_i^2 = 1 with pi proportional to the degree
  out.raw_eigenvectors = inv_sqrt_degree.asDiagonal() * eig.vectors * std::sqrt(degree.sum());
  for (Eigen::Index c = 0; c < out.raw_eigenvectors.cols(); ++c) {
    Eigen::Index pivot = 0;
    if (c == 0) {
      if (out.raw_eigenvectors.col(0).sum() < 0.0) out.raw_eigenvectors.col(0) *= -1.0;
      continue;
    }
    out.raw_eigenvectors.col(c).cwiseAbs().maxCoeff(&pivot);
    if (out.raw_eigenvectors(pivot, c) < 0.0) out.raw_eigenvectors.col(c) *= -1.0;
  }
  out.coordinates = out.raw_eigenvectors.rightCols(n_components) * out.eigenvalues.tail(n_components).asDiagonal();
  return out;
}

int numerical_rank(const Matrix& m, double rank_tol) {
  if (m.size() == 0) return 0;
  const Eigen::JacobiSVD<Matrix> svd(m);
  const Vector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) rank += s(i) > rank_tol * s(0) ? 1 : 0;
  return rank;
}

ChartSelection select_chart_components(const DiffusionMapResult& dmap, const std::vector<Matrix>& phi_jacobians,
                                       double rank_tol) {
  if (phi_jacobians.empty()) throw PreconditionError("select_chart_components: no Jacobians");
  const Eigen::Index m = dmap.coordinates.cols();
  double rank_sum = 0.0;
  for (const Matrix& jac : phi_jacobians) {
    if (jac.rows() != m) throw PreconditionError("select_chart_components: Jacobian rows must match components");
    rank_sum += numerical_rank(jac, rank_tol);
  }
  const int d = static_cast<int>(std::lround(rank_sum / static_cast<double>(phi_jacobians.size())));
  if (d < 1) throw DegenerateChartError("select_chart_components: Jacobians have rank zero");

  ChartSelection out;
  out.dimension = d;
  const auto needed = static_cast<std::size_t>(std::ceil(0.9 * static_cast<double>(phi_jacobians.size())));
  for (Eigen::Index c = 0; c < m && static_cast<int>(out.components.size()) < d; ++c) {
    std::vector<Eigen::Index> candidate = out.components;
    candidate.push_back(c);
    const auto target = static_cast<int>(candidate.size());
    std::size_t full_rank = 0;
    for (const Matrix& jac : phi_jacobians) {
      if (numerical_rank(jac(candidate, Eigen::all), rank_tol) == target) ++full_rank;
    }
    if (full_rank >= needed) out.components = std::move(candidate);
  }
  if (static_cast<int>(out.components.size()) < d) {
    throw DegenerateChartError("select_chart_components: no component subset reaches rank " + std::to_string(d));
  }
  return out;
}

}  // namespace gadm::dimred
