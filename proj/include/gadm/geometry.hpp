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
#include <span>
#include <vector>

#include "gadm/types.hpp"

/// Intrinsic Riemannian geometry on a chart and the GAD / ISD vector fields.
namespace gadm::geometry {

inline constexpr double kDefaultFdStep = 1e-5;

using ScalarGradient = std::function<Vector(const Vector&)>;
using ScalarHessian = std::function<Matrix(const Vector&)>;
using MetricField = std::function<MetricTensor(const ChartPoint&)>;
using VectorField = std::function<TangentVector(const ChartPoint&)>;

/// H(v) w = w - 2 <v, w> v, Euclidean or in the metric g. `v` must be a unit vector.
[[nodiscard]] Vector householder_reflect(const Vector& v, const Vector& w);
[[nodiscard]] Vector householder_reflect(const Vector& v, const Vector& w, const MetricTensor& g);

[[nodiscard]] double rayleigh_quotient(const Matrix& h, const Vector& v);
[[nodiscard]] double rayleigh_quotient(const Matrix& h, const Vector& v, const MetricTensor& g);

struct GADVelocity {
  Vector dx;
  Vector dv;
};

/// Right-hand side of the Euclidean gentlest ascent system on (x, v).
[[nodiscard]] GADVelocity gad_extended_field(const GADState& state, const ScalarGradient& grad_u,
                                             const ScalarHessian& hess_u);

/// Pullback metric g = J^T J of a parameterization with Jacobian `jac_psi` (n x d).
/// Throws DegenerateChartError when J is numerically rank deficient.
[[nodiscard]] MetricTensor metric_from_jacobian(const Matrix& jac_psi);

/// dg/du^k of g = J^T J from a parameterization's derivatives, second[a](j, k) = d2 psi^a / du^j du^k.
[[nodiscard]] std::vector<Matrix> metric_derivatives(const Matrix& jacobian, const std::vector<Matrix>& second);

/// Builds a MetricTensor from a symmetric positive definite matrix, validating it.
[[nodiscard]] MetricTensor make_metric(const Matrix& g);

/// Levi-Civita connection from metric derivatives, dg[k] = dg/du^k.
[[nodiscard]] ChristoffelSymbols christoffel_from_derivatives(const MetricTensor& g, std::span<const Matrix> dg);

/// Levi-Civita connection with metric derivatives taken by central differences.
[[nodiscard]] ChristoffelSymbols christoffel(const MetricField& metric_field, const ChartPoint& u,
                                             double fd_step = kDefaultFdStep);

enum class Musical { sharp, flat };

[[nodiscard]] Vector sharp_flat(const Vector& x, const MetricTensor& g, Musical direction);
[[nodiscard]] inline Vector sharp(const Vector& covector, const MetricTensor& g) {
  return sharp_flat(covector, g, Musical::sharp);
}
[[nodiscard]] inline Vector flat(const Vector& vector, const MetricTensor& g) {
  return sharp_flat(vector, g, Musical::flat);
}

/// Hess U = -nabla Y for the chart force Y = -grad U, given Y and its Jacobian dY/du.
/// `lower` is symmetrized; `mixed` is recomputed from it.
[[nodiscard]] CovariantHessian covariant_hessian(const Vector& force, const Matrix& force_jacobian,
                                                 const ChristoffelSymbols& gamma, const MetricTensor& g);

/// Same, with dY/du by central differences of `force_field`.
[[nodiscard]] CovariantHessian covariant_hessian_from_force(const VectorField& force_field,
                                                            const ChristoffelSymbols& gamma, const MetricTensor& g,
                                                            const ChartPoint& u, double fd_step = kDefaultFdStep);

struct Eigenpair {
  double lambda_min = 0.0;
  TangentVector v;
  Vector spectrum;  // ascending
};

/// Smallest eigenpair of the generalized problem lower v = lambda g v with g(v, v) = 1.
/// The sign of v maximizes g(v, previous); without `previous`, the first nonzero entry is positive.
[[nodiscard]] Eigenpair smallest_eigpair(const CovariantHessian& h, const MetricTensor& g,
                                         const std::optional<Vector>& previous = std::nullopt);

/// ISD field X - 2 g(V, X) V.
[[nodiscard]] TangentVector isd_field(const TangentVector& force, const TangentVector& v, const MetricTensor& g);

/// Geodesic acceleration -Γ^l_jk du^j du^k.
[[nodiscard]] Vector geodesic_rhs(const ChartPoint& u, const Vector& du, const ChristoffelSymbols& gamma);

}  // namespace gadm::geometry
