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

#include "gadm/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "gadm/benchmarks.hpp"
#include "gadm/geometry.hpp"

namespace gadm::validation {

namespace {

Matrix christoffel_matrix(const ChristoffelSymbols& gamma) {
  const Eigen::Index d = gamma.dim();
  Matrix out(d, d * d);
  for (Eigen::Index l = 0; l < d; ++l) {
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index k = 0; k < d; ++k) out(l, j * d + k) = gamma(l, j, k);
    }
  }
  return out;
}

void scale(ChristoffelSymbols& gamma, double factor) {
  const Eigen::Index d = gamma.dim();
  for (Eigen::Index l = 0; l < d; ++l) {
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index k = 0; k < d; ++k) gamma(l, j, k) *= factor;
    }
  }
}

Eigen::Vector3d euclidean_gradient(const Vector& x) { return {x(1) * x(2), x(0) * x(2), x(0) * x(1)}; }

Eigen::Matrix3d euclidean_hessian(const Vector& x) {
  Eigen::Matrix3d h;
  h << 0.0, x(2), x(1), x(2), 0.0, x(0), x(1), x(0), 0.0;
  return h;
}

// Chart force Y = -g^-1 J^T grad E and its derivative, both from the closed-form parameterization.
struct ChartForce {
  Vector value;
  Matrix jacobian;
};

ChartForce analytic_chart_force(const Vector& u, const MetricTensor& g, const std::vector<Matrix>& dg) {
  const auto par = benchmarks::sphere_chart_derivatives(u);
  const Vector x = benchmarks::sphere_chart_psi(u);
  const Eigen::Vector3d grad = euclidean_gradient(x);
  const Vector du = par.jacobian.transpose() * grad;
  Matrix ddu = par.jacobian.transpose() * euclidean_hessian(x) * par.jacobian;
  for (std::size_t a = 0; a < 3; ++a) ddu += grad(static_cast<Eigen::Index>(a)) * par.second[a];

  ChartForce out;
  out.value = -g.g_inv * du;
  out.jacobian.resize(2, 2);
  for (Eigen::Index k = 0; k < 2; ++k) {
    out.jacobian.col(k) = -g.g_inv * (dg[static_cast<std::size_t>(k)] * out.value + ddu.col(k));
  }
  return out;
}

}  // namespace

bool GeometryReport::passed() const {
  return std::all_of(errors.begin(), errors.end(), [](const QuantityError& e) { return e.passed(); });
}

double relative_error(const Matrix& a, const Matrix& b) { return (a - b).norm() / std::max(b.norm(), 1e-3); }

std::vector<Vector> random_chart_points(int n, std::uint64_t seed, double radius) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) {
    const double r = radius * std::sqrt(unit(rng));
    const double t = 2.0 * std::numbers::pi * unit(rng);
    out.emplace_back(Eigen::Vector2d(r * std::cos(t), r * std::sin(t)));
  }
  return out;
}

GeometryReport validate_sphere_geometry(int n_points, std::uint64_t seed, double christoffel_scale) {
  if (n_points < 0) throw PreconditionError("validate_sphere_geometry: n_points must be non-negative");
  GeometryReport report;
  report.n_points = n_points;
  report.seed = seed;
  report.errors = {{"metric", false, 0.0},          {"christoffel", false, 0.0}, {"force", false, 0.0},
                   {"hessian", false, 0.0},         {"christoffel_fd", true, 0.0}, {"hessian_fd", true, 0.0}};
  auto record = [&](std::size_t i, double e) {
    report.errors[i].max_relative_error = std::max(report.errors[i].max_relative_error, std::isnan(e) ? HUGE_VAL : e);
  };

  const geometry::MetricField metric_field = [](const ChartPoint& p) {
    return geometry::metric_from_jacobian(benchmarks::sphere_chart_derivatives(p.u).jacobian);
  };

  for (const Vector& u : random_chart_points(n_points, seed)) {
    const ChartGeometry exact = benchmarks::sphere_exact_chart_eval({u});
    const auto par = benchmarks::sphere_chart_derivatives(u);

    const MetricTensor g = geometry::metric_from_jacobian(par.jacobian);
    const std::vector<Matrix> dg = geometry::metric_derivatives(par.jacobian, par.second);
    ChristoffelSymbols gamma = geometry::christoffel_from_derivatives(g, dg);
    scale(gamma, christoffel_scale);
    const ChartForce force = analytic_chart_force(u, g, dg);
    const CovariantHessian hess = geometry::covariant_hessian(force.value, force.jacobian, gamma, g);

    record(0, relative_error(g.g, exact.metric.g));
    record(1, relative_error(christoffel_matrix(gamma), christoffel_matrix(exact.gamma)));
    record(2, relative_error(force.value, exact.force.components));
    record(3, relative_error(hess.mixed, exact.hessian.mixed));

    ChristoffelSymbols gamma_fd = geometry::christoffel(metric_field, {u});
    scale(gamma_fd, christoffel_scale);
    const geometry::VectorField force_field = [&](const ChartPoint& p) {
      const auto pd = benchmarks::sphere_chart_derivatives(p.u);
      const MetricTensor gp = geometry::metric_from_jacobian(pd.jacobian);
      return TangentVector{analytic_chart_force(p.u, gp, geometry::metric_derivatives(pd.jacobian, pd.second)).value};
    };
    const CovariantHessian hess_fd = geometry::covariant_hessian_from_force(force_field, gamma_fd, g, {u});
    record(4, relative_error(christoffel_matrix(gamma_fd), christoffel_matrix(exact.gamma)));
    record(5, relative_error(hess_fd.mixed, exact.hessian.mixed));
  }
  return report;
}

}  // namespace gadm::validation
