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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gadm/problem.hpp"

/// The sphere and Mueller-Brown surface benchmarks with closed-form oracles.
namespace gadm::benchmarks {

// Sphere: E(x) = x1 x2 x3 restricted to the unit sphere, with the stereographic chart from the north pole.

[[nodiscard]] double sphere_energy(const Vector& x);
[[nodiscard]] Vector sphere_force(const Vector& x);
[[nodiscard]] Vector sphere_project(const Vector& x);

/// Stereographic chart u -> psi(u) with its closed-form metric, connection, force and Hessian.
[[nodiscard]] ChartGeometry sphere_exact_chart_eval(const ChartPoint& u);
[[nodiscard]] Vector sphere_chart_phi(const Vector& x);
[[nodiscard]] Vector sphere_chart_psi(const Vector& u);
/// Jacobian (3 x 2) and second derivatives second[a](j, k) of the stereographic parameterization.
struct ParameterizationDerivatives {
  Matrix jacobian;
  std::vector<Matrix> second;
};
[[nodiscard]] ParameterizationDerivatives sphere_chart_derivatives(const Vector& u);
/// U = E o psi in stereographic coordinates.
[[nodiscard]] double sphere_chart_energy(const Vector& u);

[[nodiscard]] ProblemDefinition sphere_problem();

// Regular surface x3 = f(x1, x2) carrying the Mueller-Brown potential.

struct SurfaceTerm {
  int k1;
  int k2;
  double a;
  double b;
};

inline constexpr std::array<SurfaceTerm, 6> kSurfaceTerms{{
    {0, 1, 0.9490, 0.8838},
    {0, 2, 0.4575, 0.6564},
    {1, 0, 0.4152, 0.7449},
    {1, 2, 0.2911, 0.3619},
    {2, 0, 0.4121, 0.5469},
    {3, 2, 0.2817, 0.4719},
}};

struct MullerBrownTerm {
  double amplitude;
  double a;
  double b;
  double c;
  double x0;
  double y0;
};

inline constexpr std::array<MullerBrownTerm, 4> kMullerBrown{{
    {-200.0, -1.0, 0.0, -10.0, 1.0, 0.0},
    {-100.0, -1.0, 0.0, -10.0, 0.0, 0.5},
    {-170.0, -6.5, 11.0, -6.5, -0.5, 1.5},
    {15.0, 0.7, 0.6, 0.7, -1.0, 1.0},
}};

[[nodiscard]] double muller_brown(double x, double y);
[[nodiscard]] Eigen::Vector2d muller_brown_gradient(double x, double y);
[[nodiscard]] Eigen::Matrix2d muller_brown_hessian(double x, double y);

struct SurfaceEval {
  double height = 0.0;
  Eigen::Vector2d grad_f;
  Vector lifted_force;  // ambient, tangent to the surface
};

[[nodiscard]] double surface_height(double x1, double x2);
[[nodiscard]] SurfaceEval surface_eval(const Eigen::Vector2d& x1x2);
[[nodiscard]] Vector surface_lift(const Eigen::Vector2d& x1x2);

[[nodiscard]] ProblemDefinition surface_problem();

// Critical-point oracles

struct CriticalPointReport {
  std::vector<Vector> points;  // ambient
  std::vector<int> indices;    // Morse index of the energy
  std::vector<double> residuals;
  std::vector<double> energies;

  [[nodiscard]] std::size_t size() const { return points.size(); }
};

[[nodiscard]] CriticalPointReport sphere_critical_points(int n_seeds = 10000, std::uint64_t seed = 7);
[[nodiscard]] CriticalPointReport mb_surface_critical_points();

/// Start point and target saddle of a benchmark run, both taken from the oracle.
struct RunEndpoints {
  Vector start;
  Vector target_saddle;
  std::vector<Vector> saddles;  // every index-1 point
};

/// Sink nearest (1, 1, -1)/sqrt(3) and its adjacent axis saddle.
[[nodiscard]] RunEndpoints sphere_endpoints();
/// Rightmost Mueller-Brown minimum and the saddle nearest to it.
[[nodiscard]] RunEndpoints mb_surface_endpoints();

}  // namespace gadm::benchmarks
