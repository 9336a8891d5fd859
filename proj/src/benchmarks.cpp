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

#include "gadm/benchmarks.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "gadm/geometry.hpp"

namespace gadm::benchmarks {

namespace {

constexpr double kDedupTolerance = 1e-6;

bool contains(const std::vector<Vector>& points, const Vector& x) {
  return std::any_of(points.begin(), points.end(), [&](const Vector& p) { return (p - x).norm() < kDedupTolerance; });
}

}  // namespace

// ---------------------------------------------------------------------------
// Sphere

double sphere_energy(const Vector& x) { return x(0) * x(1) * x(2); }

Vector sphere_force(const Vector& x) {
  const Vector grad = Eigen::Vector3d(x(1) * x(2), x(0) * x(2), x(0) * x(1));
  const Vector normal = x / x.norm();
  return -(grad - normal.dot(grad) * normal);
}

Vector sphere_project(const Vector& x) { return x / x.norm(); }

Vector sphere_chart_phi(const Vector& x) { return Eigen::Vector2d(x(0) / (1.0 - x(2)), x(1) / (1.0 - x(2))); }

Vector sphere_chart_psi(const Vector& u) {
  const double r2 = u.squaredNorm();
  return Eigen::Vector3d(2.0 * u(0), 2.0 * u(1), r2 - 1.0) / (1.0 + r2);
}

ParameterizationDerivatives sphere_chart_derivatives(const Vector& u) {
  const double s = 1.0 + u.squaredNorm();
  const double s2 = s * s;
  const double s3 = s2 * s;
  ParameterizationDerivatives out;
  out.jacobian.resize(3, 2);
  out.second.assign(3, Matrix::Zero(2, 2));
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 2; ++i) out.jacobian(i, j) = (i == j ? 2.0 / s : 0.0) - 4.0 * u(i) * u(j) / s2;
    out.jacobian(2, j) = 4.0 * u(j) / s2;
  }
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) {
      const double djk = j == k ? 1.0 : 0.0;
      for (int i = 0; i < 2; ++i) {
        const double dij = i == j ? 1.0 : 0.0;
        const double dik = i == k ? 1.0 : 0.0;
        out.second[static_cast<std::size_t>(i)](j, k) =
            -4.0 * (dij * u(k) + dik * u(j) + djk * u(i)) / s2 + 16.0 * u(i) * u(j) * u(k) / s3;
      }
      out.second[2](j, k) = 4.0 * djk / s2 - 16.0 * u(j) * u(k) / s3;
    }
  }
  return out;
}

double sphere_chart_energy(const Vector& u) {
  const double r2 = u.squaredNorm();
  return 4.0 * u(0) * u(1) * (r2 - 1.0) / std::pow(r2 + 1.0, 3);
}

ChartGeometry sphere_exact_chart_eval(const ChartPoint& point) {
  if (point.u.size() != 2 || !point.u.allFinite()) throw PreconditionError("sphere_exact_chart_eval: need finite u in R^2");
  const double u1 = point.u(0);
  const double u2 = point.u(1);
  const double r2 = u1 * u1 + u2 * u2;
  const double s = 1.0 + r2;

  ChartGeometry out;
  out.ambient = sphere_chart_psi(point.u);
  out.jacobian.resize(3, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) out.jacobian(i, j) = (i == j ? 2.0 / s : 0.0) - 4.0 * point.u(i) * point.u(j) / (s * s);
    out.jacobian(2, i) = 4.0 * point.u(i) / (s * s);
  }
  out.metric = geometry::make_metric(Matrix::Identity(2, 2) * (4.0 / (s * s)));

  const double g11 = -2.0 * u1 / s;  // Γ^1_11
  const double g12 = -2.0 * u2 / s;  // Γ^1_12
  out.gamma = ChristoffelSymbols(2);
  out.gamma(0, 0, 0) = g11;
  out.gamma(0, 0, 1) = g12;
  out.gamma(0, 1, 0) = g12;
  out.gamma(0, 1, 1) = -g11;
  out.gamma(1, 0, 0) = -g12;
  out.gamma(1, 0, 1) = g11;
  out.gamma(1, 1, 0) = g11;
  out.gamma(1, 1, 1) = g12;

  const double den = std::pow(u2, 4) + (2.0 * u1 * u1 + 2.0) * u2 * u2 + std::pow(u1, 4) + 2.0 * u1 * u1 + 1.0;
  const double grad1 =
      (std::pow(u2, 5) - 2.0 * u1 * u1 * std::pow(u2, 3) + (-3.0 * std::pow(u1, 4) + 8.0 * u1 * u1 - 1.0) * u2) / den;
  const double grad2 =
      -(3.0 * u1 * std::pow(u2, 4) + (2.0 * std::pow(u1, 3) - 8.0 * u1) * u2 * u2 - std::pow(u1, 5) + u1) / den;
  out.force.components = -Eigen::Vector2d(grad1, grad2);

  const double s3 = s * s * s;
  const double a = -(4.0 * u1 * u2 * (std::pow(u2, 4) + u2 * u2 - std::pow(u1, 4) + 11.0 * u1 * u1 - 6.0)) / s3;
  const double b = -(std::pow(u2, 6) - 5.0 * u1 * u1 * std::pow(u2, 4) - 5.0 * std::pow(u2, 4) -
                     5.0 * std::pow(u1, 4) * u2 * u2 + 30.0 * u1 * u1 * u2 * u2 - 5.0 * u2 * u2 + std::pow(u1, 6) -
                     5.0 * std::pow(u1, 4) - 5.0 * u1 * u1 + 1.0) /
                   s3;
  const double d = (4.0 * u1 * u2 * (std::pow(u2, 4) - 11.0 * u2 * u2 - std::pow(u1, 4) - u1 * u1 + 6.0)) / s3;
  out.hessian.mixed.resize(2, 2);
  out.hessian.mixed << a, b, b, d;
  out.hessian.lower = out.metric.g * out.hessian.mixed;
  return out;
}

ProblemDefinition sphere_problem() {
  ProblemDefinition p;
  p.name = "sphere";
  p.ambient_dim = 3;
  p.energy = sphere_energy;
  p.force = sphere_force;
  p.project = sphere_project;
  p.exact_chart = ExactChart{2, sphere_chart_phi, sphere_chart_psi, sphere_exact_chart_eval};
  return p;
}

// ---------------------------------------------------------------------------
// Mueller-Brown on a regular surface

double muller_brown(double x, double y) {
  double value = 0.0;
  for (const auto& t : kMullerBrown) {
    const double dx = x - t.x0;
    const double dy = y - t.y0;
    value += t.amplitude * std::exp(t.a * dx * dx + t.b * dx * dy + t.c * dy * dy);
  }
  return value;
}

Eigen::Vector2d muller_brown_gradient(double x, double y) {
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
  for (const auto& t : kMullerBrown) {
    const double dx = x - t.x0;
    const double dy = y - t.y0;
    const double e = t.amplitude * std::exp(t.a * dx * dx + t.b * dx * dy + t.c * dy * dy);
    grad(0) += e * (2.0 * t.a * dx + t.b * dy);
    grad(1) += e * (t.b * dx + 2.0 * t.c * dy);
  }
  return grad;
}

Eigen::Matrix2d muller_brown_hessian(double x, double y) {
  Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
  for (const auto& t : kMullerBrown) {
    const double dx = x - t.x0;
    const double dy = y - t.y0;
    const double e = t.amplitude * std::exp(t.a * dx * dx + t.b * dx * dy + t.c * dy * dy);
    const double px = 2.0 * t.a * dx + t.b * dy;
    const double py = t.b * dx + 2.0 * t.c * dy;
    h(0, 0) += e * (px * px + 2.0 * t.a);
    h(0, 1) += e * (px * py + t.b);
    h(1, 1) += e * (py * py + 2.0 * t.c);
  }
  h(1, 0) = h(0, 1);
  return h;
}

double surface_height(double x1, double x2) {
  double f = 0.0;
  for (const auto& t : kSurfaceTerms) f += t.a * std::cos(t.k1 * x1 + t.k2 * x2 + t.b);
  return f;
}

Vector surface_lift(const Eigen::Vector2d& x1x2) {
  return Eigen::Vector3d(x1x2(0), x1x2(1), surface_height(x1x2(0), x1x2(1)));
}

SurfaceEval surface_eval(const Eigen::Vector2d& x1x2) {
  SurfaceEval out;
  out.grad_f.setZero();
  for (const auto& t : kSurfaceTerms) {
    const double phase = t.k1 * x1x2(0) + t.k2 * x1x2(1) + t.b;
    out.height += t.a * std::cos(phase);
    out.grad_f(0) -= t.a * t.k1 * std::sin(phase);
    out.grad_f(1) -= t.a * t.k2 * std::sin(phase);
  }
  // Riemannian gradient of MB in the (x1, x2) graph chart, g = I + grad_f grad_f^T, lifted by the chart Jacobian.
  const Eigen::Matrix2d g = Eigen::Matrix2d::Identity() + out.grad_f * out.grad_f.transpose();
  const Eigen::Vector2d chart_grad = g.ldlt().solve(muller_brown_gradient(x1x2(0), x1x2(1)));
  out.lifted_force = -Eigen::Vector3d(chart_grad(0), chart_grad(1), out.grad_f.dot(chart_grad));
  return out;
}

ProblemDefinition surface_problem() {
  ProblemDefinition p;
  p.name = "mb_surface";
  p.ambient_dim = 3;
  p.energy = [](const Vector& x) { return muller_brown(x(0), x(1)); };
  p.force = [](const Vector& x) { return surface_eval(Eigen::Vector2d(x(0), x(1))).lifted_force; };
  p.project = [](const Vector& x) { return surface_lift(Eigen::Vector2d(x(0), x(1))); };
  return p;
}

// ---------------------------------------------------------------------------
// Oracles

CriticalPointReport sphere_critical_points(int n_seeds, std::uint64_t seed) {
  CriticalPointReport report;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int s = 0; s < n_seeds; ++s) {
    Eigen::Vector3d x(normal(rng), normal(rng), normal(rng));
    x.normalize();
    // Newton on the Lagrange system grad E = lambda x, |x|^2 = 1.
    Eigen::Vector3d grad(x(1) * x(2), x(0) * x(2), x(0) * x(1));
    double lambda = x.dot(grad);
    bool converged = false;
    for (int iter = 0; iter < 60; ++iter) {
      grad << x(1) * x(2), x(0) * x(2), x(0) * x(1);
      Eigen::Vector4d residual;
      residual.head<3>() = grad - lambda * x;
      residual(3) = 0.5 * (x.squaredNorm() - 1.0);
      if (residual.norm() < 1e-15) {
        converged = true;
        break;
      }
      Eigen::Matrix4d jac = Eigen::Matrix4d::Zero();
      jac.topLeftCorner<3, 3>() << -lambda, x(2), x(1), x(2), -lambda, x(0), x(1), x(0), -lambda;
      jac.block<3, 1>(0, 3) = -x;
      jac.block<1, 3>(3, 0) = x.transpose();
      const Eigen::Vector4d step = jac.fullPivLu().solve(-residual);
      if (!step.allFinite()) break;
      x += step.head<3>();
      lambda += step(3);
      if (step.norm() < 1e-15) {
        converged = true;
        break;
      }
    }
    x.normalize();
    const Vector force = sphere_force(x);
    if (!converged && force.norm() > 1e-12) continue;
    if (force.norm() >= 1e-10 || contains(report.points, x)) continue;

    // Morse index from the tangential Hessian P (D^2 E - (x . grad E) I) P on the tangent plane.
    grad << x(1) * x(2), x(0) * x(2), x(0) * x(1);
    Eigen::Matrix3d hess;
    hess << 0.0, x(2), x(1), x(2), 0.0, x(0), x(1), x(0), 0.0;
    hess -= x.dot(grad) * Eigen::Matrix3d::Identity();
    const Eigen::Matrix3d frame = Eigen::HouseholderQR<Eigen::Vector3d>(x).householderQ();
    const Eigen::Matrix<double, 3, 2> basis = frame.rightCols<2>();
    const Eigen::Matrix2d tangent_hess = basis.transpose() * hess * basis;
    const Eigen::Vector2d eig = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(tangent_hess).eigenvalues();
    report.points.push_back(x);
    report.indices.push_back(static_cast<int>((eig.array() < 0.0).count()));
    report.residuals.push_back(force.norm());
    report.energies.push_back(sphere_energy(x));
  }
  return report;
}

CriticalPointReport mb_surface_critical_points() {
  constexpr int kGrid = 61;
  constexpr double kXMin = -1.5;
  constexpr double kXMax = 1.0;
  constexpr double kYMin = -0.5;
  constexpr double kYMax = 2.0;
  CriticalPointReport report;
  std::vector<Vector> planar;
  int converged_any = 0;
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      Eigen::Vector2d p(kXMin + (kXMax - kXMin) * i / (kGrid - 1), kYMin + (kYMax - kYMin) * j / (kGrid - 1));
      bool converged = false;
      for (int iter = 0; iter < 100; ++iter) {
        const Eigen::Vector2d grad = muller_brown_gradient(p(0), p(1));
        if (grad.norm() < 1e-11) {
          converged = true;
          break;
        }
        const Eigen::Vector2d step = muller_brown_hessian(p(0), p(1)).fullPivLu().solve(-grad);
        if (!step.allFinite() || step.norm() > 1.0) break;
        p += step;
      }
      if (!converged) continue;
      ++converged_any;
      if (p(0) < kXMin || p(0) > kXMax || p(1) < kYMin || p(1) > kYMax) continue;
      if (contains(planar, p)) continue;
      planar.push_back(p);
    }
  }
  if (converged_any == 0) throw SolverError("mb_surface_critical_points: Newton failed from every seed");
  std::sort(planar.begin(), planar.end(), [](const Vector& a, const Vector& b) { return a(0) < b(0); });
  for (const Vector& p : planar) {
    const Eigen::Vector2d eig =
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(muller_brown_hessian(p(0), p(1))).eigenvalues();
    report.points.push_back(surface_lift(Eigen::Vector2d(p(0), p(1))));
    report.indices.push_back(static_cast<int>((eig.array() < 0.0).count()));
    report.residuals.push_back(muller_brown_gradient(p(0), p(1)).norm());
    report.energies.push_back(muller_brown(p(0), p(1)));
  }
  return report;
}

namespace {

std::vector<Vector> with_index(const CriticalPointReport& report, int index) {
  std::vector<Vector> out;
  for (std::size_t i = 0; i < report.size(); ++i) {
    if (report.indices[i] == index) out.push_back(report.points[i]);
  }
  return out;
}

const Vector& nearest(const std::vector<Vector>& points, const Vector& x) {
  if (points.empty()) throw SolverError("oracle returned no candidate points");
  return *std::min_element(points.begin(), points.end(),
                           [&](const Vector& a, const Vector& b) { return (a - x).norm() < (b - x).norm(); });
}

}  // namespace

RunEndpoints sphere_endpoints() {
  const CriticalPointReport report = sphere_critical_points();
  RunEndpoints out;
  out.saddles = with_index(report, 1);
  out.start = nearest(with_index(report, 0), Eigen::Vector3d(1.0, 1.0, -1.0) / std::sqrt(3.0));
  out.target_saddle = nearest(out.saddles, out.start);
  return out;
}

RunEndpoints mb_surface_endpoints() {
  const CriticalPointReport report = mb_surface_critical_points();
  RunEndpoints out;
  out.saddles = with_index(report, 1);
  const std::vector<Vector> minima = with_index(report, 0);
  if (minima.empty()) throw SolverError("mb_surface_endpoints: no minima");
  out.start = *std::max_element(minima.begin(), minima.end(), [](const Vector& a, const Vector& b) { return a(0) < b(0); });
  out.target_saddle = nearest(out.saddles, out.start);
  return out;
}

}  // namespace gadm::benchmarks
