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

#include "gadm/sampling.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <cmath>
#include <string>

#include "gadm/geometry.hpp"

namespace gadm::sampling {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31U);
}

Vector gaussian(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal;
  Vector xi(n);
  for (Eigen::Index i = 0; i < n; ++i) xi(i) = normal(rng);
  return xi;
}

void require_on_manifold(const ProblemDefinition& problem, const Vector& base, const char* where) {
  if (base.size() != problem.ambient_dim) throw PreconditionError(std::string(where) + ": base has wrong dimension");
  if (!(problem.projection_residual(base) < 1e-8)) {
    throw PreconditionError(std::string(where) + ": base point is not on the manifold");
  }
}

Vector drift(const ProblemDefinition& problem, const Vector& q, const Vector& base, double restraint) {
  Vector x = problem.force(q);
  if (restraint > 0.0) x -= restraint * (q - base);
  return x;
}

}  // namespace

void validate(const SamplerConfig& cfg) {
  if (cfg.n_samples < 2) throw PreconditionError("SamplerConfig: n_samples must be at least 2");
  if (!(cfg.sigma >= 0.0)) throw PreconditionError("SamplerConfig: sigma must be non-negative");
  if (!(cfg.dt > 0.0)) throw PreconditionError("SamplerConfig: dt must be positive");
  if (cfg.n_steps < 0) throw PreconditionError("SamplerConfig: n_steps must be non-negative");
  if (cfg.thinning < 1) throw PreconditionError("SamplerConfig: thinning must be at least 1");
  if (!(cfg.perturbation_scale >= 0.0)) throw PreconditionError("SamplerConfig: perturbation_scale must be >= 0");
  if (!(cfg.tau >= 0.0)) throw PreconditionError("SamplerConfig: tau must be non-negative");
  if (!(cfg.restraint >= 0.0)) throw PreconditionError("SamplerConfig: restraint must be non-negative");
  if (cfg.kind == SamplerKind::flow_perturbation &&
      !(std::abs(cfg.dt * cfg.n_steps - cfg.tau) <= 1e-9 * std::max(1.0, cfg.tau))) {
    throw PreconditionError("SamplerConfig: flow sampling needs dt * n_steps == tau");
  }
}

std::mt19937_64 walker_rng(std::uint64_t master_seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(splitmix64(master_seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

dimred::PointCloud sample_flow_perturbation(const ProblemDefinition& problem, const Vector& base,
                                            const SamplerConfig& cfg) {
  validate(cfg);
  require_on_manifold(problem, base, "sample_flow_perturbation");
  const Eigen::Index n = problem.ambient_dim;
  dimred::PointCloud cloud;
  cloud.base_point = base;
  cloud.points.resize(cfg.n_samples, n);
  cloud.forces.resize(cfg.n_samples, n);
  for (Eigen::Index i = 0; i < cfg.n_samples; ++i) {
    auto rng = walker_rng(cfg.seed, static_cast<std::uint64_t>(i));
    Vector p = base;
    if (cfg.perturbation_scale > 0.0) p = problem.project(base + cfg.perturbation_scale * gaussian(rng, n));
    for (int step = 0; step < cfg.n_steps && p.allFinite(); ++step) {
      p = problem.project(p + cfg.dt * drift(problem, p, base, cfg.restraint));
    }
    if (!p.allFinite()) {
      throw EvaluationError("sample_flow_perturbation: projection diverged for sample " + std::to_string(i), p);
    }
    cloud.points.row(i) = p.transpose();
    cloud.forces.row(i) = problem.force(p).transpose();
  }
  return cloud;
}

dimred::PointCloud sample_brownian(const ProblemDefinition& problem, const Vector& base, const SamplerConfig& cfg) {
  validate(cfg);
  require_on_manifold(problem, base, "sample_brownian");
  const Eigen::Index n = problem.ambient_dim;
  dimred::PointCloud cloud;
  cloud.base_point = base;
  cloud.points.resize(cfg.n_samples, n);
  cloud.forces.resize(cfg.n_samples, n);

  auto rng = walker_rng(cfg.seed, 0);
  const double noise = cfg.sigma * std::sqrt(cfg.dt);
  Vector q = base;
  Eigen::Index kept = 0;
  for (long step = 1; kept < cfg.n_samples; ++step) {
    const Vector xi = gaussian(rng, n);
    q = problem.project(q + (cfg.dt * drift(problem, q, base, cfg.restraint) + noise * xi));
    if (!q.allFinite()) throw EvaluationError("sample_brownian: non-finite state at step " + std::to_string(step), q);
    if (step % cfg.thinning == 0) {
      cloud.points.row(kept) = q.transpose();
      cloud.forces.row(kept) = problem.force(q).transpose();
      ++kept;
    }
  }
  return cloud;
}

dimred::PointCloud sample(const ProblemDefinition& problem, const Vector& base, const SamplerConfig& cfg) {
  return cfg.kind == SamplerKind::brownian ? sample_brownian(problem, base, cfg)
                                           : sample_flow_perturbation(problem, base, cfg);
}

ChartMap chart_map(const regression::RegressorModel& phi) {
  return [&phi](const Vector& q) {
    auto p = regression::predict_with_derivatives(phi, q, 1);
    return std::make_pair(std::move(p.value), std::move(p.jacobian));
  };
}

TetherResult invert_chart_via_tether(const ProblemDefinition& problem, const ChartMap& phi, const TetherConfig& tether,
                                     const SamplerConfig& cfg, const Vector& start) {
  if (!(tether.kappa > 0.0)) throw PreconditionError("invert_chart_via_tether: kappa must be positive");
  if (tether.burn_in < 0 || tether.n_average < 1) throw PreconditionError("invert_chart_via_tether: bad step counts");
  if (!(cfg.dt > 0.0)) throw PreconditionError("invert_chart_via_tether: dt must be positive");
  const Eigen::Index n = problem.ambient_dim;
  auto rng = walker_rng(cfg.seed, 0x7e7e7e7eULL);
  const double noise = cfg.sigma * std::sqrt(cfg.dt);

  Vector q = problem.project(start);
  Vector sum = Vector::Zero(n);
  for (int step = 0; step < tether.burn_in + tether.n_average; ++step) {
    const auto [value, jac] = phi(q);
    if (value.size() != tether.target_phi.size()) throw PreconditionError("invert_chart_via_tether: target size");
    Vector a = drift(problem, q, start, cfg.restraint);
    a -= tether.kappa * (jac.transpose() * (value - tether.target_phi));
    Vector step_vec = cfg.dt * a;
    if (noise > 0.0) step_vec += noise * gaussian(rng, n);
    q = problem.project(q + step_vec);
    if (!q.allFinite()) throw EvaluationError("invert_chart_via_tether: non-finite state", q);
    if (step >= tether.burn_in) sum += q;
  }
  TetherResult out;
  out.point = problem.project(sum / static_cast<double>(tether.n_average));
  out.residual = (phi(out.point).first - tether.target_phi).norm();
  out.converged = out.residual <= tether.tolerance;
  return out;
}

TangentVector estimate_mean_force(const ProblemDefinition& problem, const regression::RegressorModel& psi,
                                  const ChartPoint& u, double beta, int n_mc, std::uint64_t seed) {
  if (!(beta > 0.0)) throw PreconditionError("estimate_mean_force: beta must be positive");
  if (n_mc < 1) throw PreconditionError("estimate_mean_force: n_mc must be positive");
  const auto pred = regression::predict_with_derivatives(psi, u.u, 2);
  const Matrix& jac = pred.jacobian;  // n x d
  const Eigen::Index d = jac.cols();
  const Matrix gram = jac.transpose() * jac;
  const Eigen::LLT<Matrix> llt(gram);
  if (llt.info() != Eigen::Success || !(llt.rcond() > 1e-12)) {
    throw DegenerateChartError("estimate_mean_force: singular Dpsi^T Dpsi");
  }
  const Matrix gram_inv = llt.solve(Matrix::Identity(d, d));

  // directions normal to the chart at psi(u): the fiber over u
  const Eigen::HouseholderQR<Matrix> qr(jac);
  const Matrix full_q = qr.householderQ();
  const Matrix normal = full_q.rightCols(jac.rows() - d);
  const double spread = 1.0 / std::sqrt(beta);

  auto rng = walker_rng(seed, 0);
  Vector energetic = Vector::Zero(d);
  for (int k = 0; k < n_mc; ++k) {
    Vector q = pred.value;
    if (normal.cols() > 0) q += spread * (normal * gaussian(rng, normal.cols()));
    q = problem.project(q);
    // -d(U o psi)/du = Dpsi^T X
    energetic += jac.transpose() * problem.force(q);
  }
  energetic /= static_cast<double>(n_mc);

  const std::vector<Matrix> dg = geometry::metric_derivatives(jac, pred.second);
  Vector dlogdet(d);
  for (Eigen::Index k = 0; k < d; ++k) dlogdet(k) = (gram_inv * dg[static_cast<std::size_t>(k)]).trace();

  const Vector covector = energetic + 0.5 / beta * dlogdet;
  return {gram_inv * covector};
}

}  // namespace gadm::sampling
