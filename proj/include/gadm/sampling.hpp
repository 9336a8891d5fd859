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

#include <cstdint>
#include <functional>
#include <random>
#include <utility>

#include "gadm/dimred.hpp"
#include "gadm/problem.hpp"
#include "gadm/regression.hpp"

/// Local point-cloud generation on the manifold and chart inversion by a tethered SDE.
namespace gadm::sampling {

enum class SamplerKind { flow_perturbation, brownian };

struct SamplerConfig {
  SamplerKind kind = SamplerKind::flow_perturbation;
  Eigen::Index n_samples = 1000;
  double sigma = 0.0;               // noise amplitude of dq = X dt + sigma dB
  double dt = 1e-3;
  int n_steps = 0;                  // flow steps; dt * n_steps == tau for flow sampling
  int thinning = 10;                // Brownian sampling keeps every thinning-th state
  double perturbation_scale = 0.1;  // isotropic perturbation of the base point
  double tau = 0.0;                 // flow horizon
  double restraint = 0.0;           // stiffness of an optional harmonic restraint to the base point
  std::uint64_t seed = 1;
};

void validate(const SamplerConfig& cfg);

struct TetherConfig {
  double kappa = 10.0;
  Vector target_phi;
  int burn_in = 200;
  int n_average = 200;
  double tolerance = 1e-2;  // residual |phi(q) - phi0| above which the inversion is reported unconverged
};

/// Independent generator for walker `index`, derived from the master seed by a counter-based split.
[[nodiscard]] std::mt19937_64 walker_rng(std::uint64_t master_seed, std::uint64_t index);

/// Perturb the base point, project, and follow the flow of X for time tau.
[[nodiscard]] dimred::PointCloud sample_flow_perturbation(const ProblemDefinition& problem, const Vector& base,
                                                          const SamplerConfig& cfg);

/// Projected Euler-Maruyama for dq = X dt + sigma dB, keeping every thinning-th state.
[[nodiscard]] dimred::PointCloud sample_brownian(const ProblemDefinition& problem, const Vector& base,
                                                 const SamplerConfig& cfg);

/// Dispatches on cfg.kind.
[[nodiscard]] dimred::PointCloud sample(const ProblemDefinition& problem, const Vector& base,
                                        const SamplerConfig& cfg);

/// A chart map returning phi(q) and its d x n Jacobian.
using ChartMap = std::function<std::pair<Vector, Matrix>(const Vector&)>;

[[nodiscard]] ChartMap chart_map(const regression::RegressorModel& phi);

struct TetherResult {
  Vector point;
  double residual = 0.0;
  bool converged = false;
};

/// Ambient point q with phi(q) close to tether.target_phi, from the average of the tethered SDE
/// dq = (X(q) - kappa Jphi^T (phi(q) - phi0)) dt + sigma dB started at `start`.
[[nodiscard]] TetherResult invert_chart_via_tether(const ProblemDefinition& problem, const ChartMap& phi,
                                                   const TetherConfig& tether, const SamplerConfig& cfg,
                                                   const Vector& start);

/// Chart mean force -<grad(U o psi - 1/2 beta^-1 log det(Dpsi^T Dpsi))>_u, sampled on the fiber over u.
[[nodiscard]] TangentVector estimate_mean_force(const ProblemDefinition& problem, const regression::RegressorModel& psi,
                                                const ChartPoint& u, double beta, int n_mc, std::uint64_t seed);

}  // namespace gadm::sampling
