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

#include "gadm/geometry.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <string>

namespace gadm {

double MetricTensor::norm(const Vector& a) const { return std::sqrt(inner(a, a)); }

double ChristoffelSymbols::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(const Vector& v) { return v.allFinite(); }
bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace gadm

namespace gadm::geometry {

namespace {

constexpr double kUnitTolerance = 1e-8;

void require_unit(double norm_squared, const char* where) {
  if (!(std::abs(std::sqrt(norm_squared) - 1.0) <= kUnitTolerance)) {
    throw PreconditionError(std::string(where) + ": direction is not a unit vector (norm " +
                            std::to_string(std::sqrt(norm_squared)) + ")");
  }
}

void require_same_size(Eigen::Index a, Eigen::Index b, const char* where) {
  if (a != b) throw PreconditionError(std::string(where) + ": dimension mismatch");
}

}  // namespace

Vector householder_reflect(const Vector& v, const Vector& w) {
  require_same_size(v.size(), w.size(), "householder_reflect");
  require_unit(v.squaredNorm(), "householder_reflect");
  return w - 2.0 * v.dot(w) * v;
}

Vector householder_reflect(const Vector& v, const Vector& w, const MetricTensor& g) {
  require_same_size(v.size(), w.size(), "householder_reflect");
  require_same_size(v.size(), g.dim(), "householder_reflect");
  require_unit(g.inner(v, v), "householder_reflect");
  return w - 2.0 * g.inner(v, w) * v;
}

double rayleigh_quotient(const Matrix& h, const Vector& v) {
  const double vv = v.squaredNorm();
  if (vv == 0.0) throw PreconditionError("rayleigh_quotient: zero vector");
  return v.dot(h * v) / vv;
}

double rayleigh_quotient(const Matrix& h, const Vector& v, const MetricTensor& g) {
  const double vv = g.inner(v, v);
  if (vv == 0.0) throw PreconditionError("rayleigh_quotient: zero vector");
  return v.dot(h * v) / vv;
}

GADVelocity gad_extended_field(const GADState& state, const ScalarGradient& grad_u, const ScalarHessian& hess_u) {
  const double norm = state.v.norm();
  if (!(std::abs(norm - 1.0) <= 1e-6)) throw PreconditionError("gad_extended_field: |v| != 1");
  const Vector du = grad_u(state.x);
  if (!du.allFinite()) throw EvaluationError("gad_extended_field: non-finite gradient", state.x);
  const Matrix d2u = hess_u(state.x);
  if (!d2u.allFinite()) throw EvaluationError("gad_extended_field: non-finite Hessian", state.x);

  const Vector unit = state.v / norm;
  GADVelocity out;
  out.dx = -householder_reflect(unit, du);
  const Vector hv = d2u * state.v;
  out.dv = -hv + rayleigh_quotient(d2u, state.v) * state.v;
  return out;
}

MetricTensor make_metric(const Matrix& g) {
  if (g.rows() != g.cols()) throw PreconditionError("make_metric: metric must be square");
  if (!g.allFinite()) throw DegenerateChartError("make_metric: non-finite metric");
  const double scale = g.cwiseAbs().maxCoeff();
  if (!((g - g.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(scale, 1.0))) {
    throw PreconditionError("make_metric: metric is not symmetric");
  }
  Eigen::LLT<Matrix> llt(g);
  if (llt.info() != Eigen::Success) throw DegenerateChartError("make_metric: metric is not positive definite");
  MetricTensor m;
  m.g = 0.5 * (g + g.transpose());
  m.g_inv = llt.solve(Matrix::Identity(g.rows(), g.cols()));
  m.g_inv = 0.5 * (m.g_inv + m.g_inv.transpose()).eval();
  return m;
}

MetricTensor metric_from_jacobian(const Matrix& jac_psi) {
  if (jac_psi.cols() == 0 || jac_psi.rows() < jac_psi.cols()) {
    throw DegenerateChartError("metric_from_jacobian: Jacobian cannot have full column rank");
  }
  if (!jac_psi.allFinite()) throw DegenerateChartError("metric_from_jacobian: non-finite Jacobian");
  const Eigen::JacobiSVD<Matrix> svd(jac_psi);
  const Vector& s = svd.singularValues();
  if (!(s(s.size() - 1) >= 1e-10 * s(0)) || s(0) == 0.0) {
    throw DegenerateChartError("metric_from_jacobian: rank-deficient chart Jacobian");
  }
  Matrix g = jac_psi.transpose() * jac_psi;
  g = 0.5 * (g + g.transpose()).eval();
  return make_metric(g);
}

std::vector<Matrix> metric_derivatives(const Matrix& jacobian, const std::vector<Matrix>& second) {
  const Eigen::Index d = jacobian.cols();
  if (static_cast<Eigen::Index>(second.size()) != jacobian.rows()) {
    throw PreconditionError("metric_derivatives: need one second-derivative block per ambient component");
  }
  std::vector<Matrix> dg(static_cast<std::size_t>(d), Matrix::Zero(d, d));
  for (Eigen::Index k = 0; k < d; ++k) {
    Matrix& out = dg[static_cast<std::size_t>(k)];
    for (Eigen::Index a = 0; a < jacobian.rows(); ++a) {
      const Matrix& s = second[static_cast<std::size_t>(a)];
      // d_k (J^T J)_ij = s_ik J_aj + J_ai s_jk
      out += s.col(k) * jacobian.row(a) + jacobian.row(a).transpose() * s.col(k).transpose();
    }
  }
  return dg;
}

ChristoffelSymbols christoffel_from_derivatives(const MetricTensor& g, std::span<const Matrix> dg) {
  const Eigen::Index d = g.dim();
  if (static_cast<Eigen::Index>(dg.size()) != d) throw PreconditionError("christoffel: need one derivative per axis");
  ChristoffelSymbols gamma(d);
  // first kind: [jk, i] = 1/2 (d_k g_ij + d_j g_ik - d_i g_jk)
  std::vector<double> first(static_cast<std::size_t>(d * d * d));
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index k = 0; k < d; ++k) {
        first[static_cast<std::size_t>((i * d + j) * d + k)] =
            0.5 * (dg[k](i, j) + dg[j](i, k) - dg[i](j, k));
      }
    }
  }
  for (Eigen::Index l = 0; l < d; ++l) {
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index k = j; k < d; ++k) {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < d; ++i) sum += g.g_inv(l, i) * first[static_cast<std::size_t>((i * d + j) * d + k)];
        gamma(l, j, k) = sum;
        gamma(l, k, j) = sum;
      }
    }
  }
  return gamma;
}

ChristoffelSymbols christoffel(const MetricField& metric_field, const ChartPoint& u, double fd_step) {
  if (!(fd_step > 0.0)) throw PreconditionError("christoffel: fd_step must be positive");
  const Eigen::Index d = u.u.size();
  MetricTensor g;
  std::vector<Matrix> dg(static_cast<std::size_t>(d));
  try {
    g = metric_field(u);
    for (Eigen::Index k = 0; k < d; ++k) {
      ChartPoint plus = u;
      ChartPoint minus = u;
      plus.u(k) += fd_step;
      minus.u(k) -= fd_step;
      dg[static_cast<std::size_t>(k)] = (metric_field(plus).g - metric_field(minus).g) / (2.0 * fd_step);
    }
  } catch (const Error& e) {
    throw EvaluationError(std::string("christoffel: metric evaluation failed in stencil: ") + e.what(), u.u);
  }
  return christoffel_from_derivatives(g, dg);
}

Vector sharp_flat(const Vector& x, const MetricTensor& g, Musical direction) {
  require_same_size(x.size(), g.dim(), "sharp_flat");
  return direction == Musical::sharp ? Vector(g.g_inv * x) : Vector(g.g * x);
}

CovariantHessian covariant_hessian(const Vector& force, const Matrix& force_jacobian, const ChristoffelSymbols& gamma,
                                   const MetricTensor& g) {
  const Eigen::Index d = g.dim();
  require_same_size(force.size(), d, "covariant_hessian");
  require_same_size(gamma.dim(), d, "covariant_hessian");
  Matrix mixed_raw(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      double correction = 0.0;
      for (Eigen::Index l = 0; l < d; ++l) correction += gamma(i, j, l) * force(l);
      mixed_raw(i, j) = -(force_jacobian(i, j) + correction);
    }
  }
  const Matrix lowered = g.g * mixed_raw;
  CovariantHessian h;
  h.lower = 0.5 * (lowered + lowered.transpose());
  h.mixed = g.g_inv * h.lower;
  return h;
}

CovariantHessian covariant_hessian_from_force(const VectorField& force_field, const ChristoffelSymbols& gamma,
                                              const MetricTensor& g, const ChartPoint& u, double fd_step) {
  if (!(fd_step > 0.0)) throw PreconditionError("covariant_hessian_from_force: fd_step must be positive");
  const Eigen::Index d = u.u.size();
  Vector force;
  Matrix jac(d, d);
  try {
    force = force_field(u).components;
    for (Eigen::Index j = 0; j < d; ++j) {
      ChartPoint plus = u;
      ChartPoint minus = u;
      plus.u(j) += fd_step;
      minus.u(j) -= fd_step;
      jac.col(j) = (force_field(plus).components - force_field(minus).components) / (2.0 * fd_step);
    }
  } catch (const Error& e) {
    throw EvaluationError(std::string("covariant_hessian_from_force: force evaluation failed: ") + e.what(), u.u);
  }
  if (!force.allFinite() || !jac.allFinite()) {
    throw EvaluationError("covariant_hessian_from_force: non-finite force", u.u);
  }
  return covariant_hessian(force, jac, gamma, g);
}

Eigenpair smallest_eigpair(const CovariantHessian& h, const MetricTensor& g, const std::optional<Vector>& previous) {
  const Eigen::Index d = g.dim();
  require_same_size(h.lower.rows(), d, "smallest_eigpair");
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(h.lower, g.g, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success) throw SolverError("smallest_eigpair: generalized eigensolver failed");

  Eigenpair out;
  out.spectrum = solver.eigenvalues();
  out.lambda_min = out.spectrum(0);
  Vector v = solver.eigenvectors().col(0);
  v /= g.norm(v);

  double orientation = 0.0;
  if (previous && previous->size() == d) {
    orientation = g.inner(v, *previous);
  } else {
    for (Eigen::Index i = 0; i < d; ++i) {
      if (v(i) != 0.0) {
        orientation = v(i);
        break;
      }
    }
  }
  if (orientation < 0.0) v = -v;
  out.v.components = std::move(v);
  return out;
}

TangentVector isd_field(const TangentVector& force, const TangentVector& v, const MetricTensor& g) {
  return {householder_reflect(v.components, force.components, g)};
}

Vector geodesic_rhs(const ChartPoint& u, const Vector& du, const ChristoffelSymbols& gamma) {
  const Eigen::Index d = gamma.dim();
  require_same_size(u.u.size(), d, "geodesic_rhs");
  require_same_size(du.size(), d, "geodesic_rhs");
  Vector acc = Vector::Zero(d);
  for (Eigen::Index l = 0; l < d; ++l) {
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index k = 0; k < d; ++k) acc(l) -= gamma(l, j, k) * du(j) * du(k);
    }
  }
  return acc;
}

}  // namespace gadm::geometry
