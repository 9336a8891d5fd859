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

#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

#include "gadm/benchmarks.hpp"

using namespace gadm;
using namespace gadm::benchmarks;

namespace {

int count_index(const CriticalPointReport& r, int index) {
  return static_cast<int>(std::count(r.indices.begin(), r.indices.end(), index));
}

}  // namespace

TEST_CASE("stereographic chart at the origin and at (1, 0)") {
  const auto g0 = sphere_exact_chart_eval({Eigen::Vector2d(0, 0)});
  CHECK(g0.ambient.isApprox(Eigen::Vector3d(0, 0, -1)));
  CHECK(g0.metric.g.isApprox(4.0 * Matrix::Identity(2, 2)));
  CHECK(g0.gamma.max_abs() == 0.0);
  CHECK(g0.force.components.norm() == 0.0);
  Matrix b(2, 2);
  b << 0, -1, -1, 0;
  CHECK(g0.hessian.mixed == b);

  const auto g1 = sphere_exact_chart_eval({Eigen::Vector2d(1, 0)});
  CHECK((g1.ambient - Eigen::Vector3d(1, 0, 0)).norm() < 1e-15);
  CHECK(g1.gamma(0, 0, 0) == doctest::Approx(-1.0));
  CHECK_THROWS_AS((void)sphere_exact_chart_eval({Eigen::Vector2d(NAN, 0)}), PreconditionError);
}

TEST_CASE("stereographic closed forms against finite differences") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unit(-1.4, 1.4);
  const double h = 1e-6;
  for (int trial = 0; trial < 100; ++trial) {
    const Vector u = Eigen::Vector2d(unit(rng), unit(rng));
    const auto ex = sphere_exact_chart_eval({u});
    CHECK(std::abs(sphere_chart_psi(u).norm() - 1.0) < 1e-14);
    CHECK((sphere_chart_phi(sphere_chart_psi(u)) - u).norm() < 1e-12);
    const auto par = sphere_chart_derivatives(u);
    CHECK((par.jacobian - ex.jacobian).norm() < 1e-14);
    Vector grad_fd(2);
    for (int j = 0; j < 2; ++j) {
      Vector p = u, m = u;
      p(j) += h;
      m(j) -= h;
      CHECK((par.jacobian.col(j) - (sphere_chart_psi(p) - sphere_chart_psi(m)) / (2 * h)).norm() < 1e-8);
      const Matrix second_fd = (sphere_chart_derivatives(p).jacobian - sphere_chart_derivatives(m).jacobian) / (2 * h);
      for (std::size_t a = 0; a < 3; ++a) {
        CHECK((par.second[a].col(j) - second_fd.row(static_cast<Eigen::Index>(a)).transpose()).norm() < 1e-7);
      }
      grad_fd(j) = (sphere_chart_energy(p) - sphere_chart_energy(m)) / (2 * h);
      CHECK(std::abs(sphere_chart_energy(u) - sphere_energy(sphere_chart_psi(u))) < 1e-15);
    }
    // force is minus the metric gradient of U
    CHECK((ex.force.components + ex.metric.g_inv * grad_fd).norm() < 1e-7);
    CHECK((ex.hessian.lower - ex.hessian.lower.transpose()).norm() < 1e-12);
    // ambient force is the pushforward of the chart force
    CHECK((ex.jacobian * ex.force.components - sphere_force(ex.ambient)).norm() < 1e-12);
  }
}

TEST_CASE("sphere energy symmetries and tangency") {
  std::mt19937_64 rng(10);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 50; ++trial) {
    const Vector x = sphere_project(Eigen::Vector3d(n(rng), n(rng), n(rng)));
    CHECK(std::abs(sphere_energy(Eigen::Vector3d(x(1), x(2), x(0))) - sphere_energy(x)) < 1e-15);
    CHECK(std::abs(sphere_energy(Eigen::Vector3d(-x(0), -x(1), x(2))) - sphere_energy(x)) < 1e-15);
    CHECK(std::abs(sphere_force(x).dot(x)) < 1e-12);
  }
}

TEST_CASE("sphere critical points") {
  const auto r = sphere_critical_points();
  CHECK(r.size() == 14);
  CHECK(count_index(r, 1) == 6);
  CHECK(count_index(r, 0) == 4);
  CHECK(count_index(r, 2) == 4);
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(r.residuals[i] < 1e-10);
    CHECK(std::abs(r.points[i].norm() - 1.0) < 1e-12);
    if (r.indices[i] == 1) {
      CHECK(std::abs(r.energies[i]) < 1e-12);
      CHECK(r.points[i].cwiseAbs().maxCoeff() == doctest::Approx(1.0));
    } else {
      CHECK((r.points[i].cwiseAbs().array() - 1.0 / std::sqrt(3.0)).abs().maxCoeff() < 1e-12);
      CHECK((r.indices[i] == 2) == (r.energies[i] > 0));  // maxima of E are sources of X
    }
  }
}

TEST_CASE("surface coefficients, height gradient and lifted force") {
  CHECK(kSurfaceTerms[0].k1 == 0);
  CHECK(kSurfaceTerms[0].k2 == 1);
  CHECK(kSurfaceTerms[0].a == 0.9490);
  CHECK(kSurfaceTerms[0].b == 0.8838);
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> unit(-1.5, 1.5);
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Vector2d x(unit(rng), unit(rng));
    const auto e = surface_eval(x);
    CHECK(e.height == surface_height(x(0), x(1)));
    const Eigen::Vector2d fd((surface_height(x(0) + h, x(1)) - surface_height(x(0) - h, x(1))) / (2 * h),
                             (surface_height(x(0), x(1) + h) - surface_height(x(0), x(1) - h)) / (2 * h));
    CHECK((e.grad_f - fd).norm() <= 1e-8 * std::max(1.0, fd.norm()));
    const Eigen::Vector3d normal = Eigen::Vector3d(-e.grad_f(0), -e.grad_f(1), 1.0).normalized();
    CHECK(std::abs(normal.dot(e.lifted_force)) < 1e-10 * std::max(1.0, e.lifted_force.norm()));

    // the force is minus the Riemannian gradient: <X, T> = -dU(T) for the tangent T of each coordinate line
    const Eigen::Vector2d grad_mb = muller_brown_gradient(x(0), x(1));
    for (int j = 0; j < 2; ++j) {
      const Eigen::Vector3d t(j == 0 ? 1.0 : 0.0, j == 1 ? 1.0 : 0.0, e.grad_f(j));
      CHECK(e.lifted_force.dot(t) == doctest::Approx(-grad_mb(j)).epsilon(1e-10));
    }
    const Eigen::Vector2d mb_fd((muller_brown(x(0) + h, x(1)) - muller_brown(x(0) - h, x(1))) / (2 * h),
                                (muller_brown(x(0), x(1) + h) - muller_brown(x(0), x(1) - h)) / (2 * h));
    CHECK((grad_mb - mb_fd).norm() <= 1e-6 * std::max(1.0, mb_fd.norm()));
    const Eigen::Matrix2d hess = muller_brown_hessian(x(0), x(1));
    const Eigen::Vector2d col = (muller_brown_gradient(x(0) + h, x(1)) - muller_brown_gradient(x(0) - h, x(1))) / (2 * h);
    CHECK((hess.col(0) - col).norm() <= 1e-5 * std::max(1.0, col.norm()));
  }
  const Vector lifted = surface_lift(Eigen::Vector2d(0.25, -0.4));
  CHECK(lifted(2) - surface_height(0.25, -0.4) == 0.0);
  const auto p = surface_problem();
  CHECK(p.projection_residual(lifted) == 0.0);
}

TEST_CASE("Mueller-Brown critical points on the surface") {
  const auto r = mb_surface_critical_points();
  CHECK(r.size() == 5);
  CHECK(count_index(r, 0) == 3);
  CHECK(count_index(r, 1) == 2);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const Vector& x = r.points[i];
    CHECK(muller_brown_gradient(x(0), x(1)).norm() < 1e-10);
    CHECK(r.residuals[i] < 1e-10);
    CHECK(x(2) - surface_height(x(0), x(1)) == 0.0);
    CHECK(surface_eval(x.head<2>()).lifted_force.norm() < 1e-10);
  }
}

TEST_CASE("run endpoints come from the oracles") {
  const auto s = sphere_endpoints();
  CHECK((s.start - Eigen::Vector3d(1, 1, -1).normalized()).norm() < 1e-12);
  CHECK(s.saddles.size() == 6);
  CHECK(s.target_saddle.cwiseAbs().maxCoeff() == doctest::Approx(1.0));

  const auto m = mb_surface_endpoints();
  const auto r = mb_surface_critical_points();
  double rightmost = -INFINITY;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r.indices[i] == 0) rightmost = std::max(rightmost, r.points[i](0));
  }
  CHECK(m.start(0) == rightmost);
  CHECK(m.saddles.size() == 2);
  for (const auto& sd : m.saddles) CHECK((m.target_saddle - m.start).norm() <= (sd - m.start).norm());
}
