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

#include "gadm/driver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "gadm/kernel.hpp"

namespace gadm::driver {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  auto rng = sampling::walker_rng(seed ^ (a * 0x9e3779b97f4a7c15ULL), b);
  return rng();
}

double median_nearest_neighbor(const Matrix& columns) {
  const Eigen::Index n = columns.cols();
  std::vector<double> nearest(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = (columns.col(i) - columns.col(j)).squaredNorm();
      nearest[static_cast<std::size_t>(i)] = std::min(nearest[static_cast<std::size_t>(i)], d);
      nearest[static_cast<std::size_t>(j)] = std::min(nearest[static_cast<std::size_t>(j)], d);
    }
  }
  auto mid = nearest.begin() + static_cast<std::ptrdiff_t>(nearest.size() / 2);
  std::nth_element(nearest.begin(), mid, nearest.end());
  return std::sqrt(*mid);
}

}  // namespace

void validate(const DriverConfig& cfg) {
  sampling::validate(cfg.sampler);
  if (cfg.n_iterations_max < 1) throw PreconditionError("DriverConfig: n_iterations_max must be positive");
  if (cfg.n_ode_steps < 1) throw PreconditionError("DriverConfig: n_ode_steps must be positive");
  if (!(cfg.ode_dt > 0.0)) throw PreconditionError("DriverConfig: ode_dt must be positive");
  if (!(cfg.trust_factor > 0.0)) throw PreconditionError("DriverConfig: trust_factor must be positive");
  if (!(cfg.tol_force > 0.0)) throw PreconditionError("DriverConfig: tol_force must be positive");
  if (!(cfg.tol_index > 0.0)) throw PreconditionError("DriverConfig: tol_index must be positive");
  if (!(cfg.chart_tol_factor > 0.0 && cfg.chart_tol_factor <= 1.0)) {
    throw PreconditionError("DriverConfig: chart_tol_factor must be in (0, 1]");
  }
  if (!(cfg.rank_tol > 0.0 && cfg.rank_tol < 1.0)) throw PreconditionError("DriverConfig: rank_tol must be in (0, 1)");
  if (cfg.n_components < 0) throw PreconditionError("DriverConfig: n_components must be non-negative");
  if (cfg.jacobian_samples < 1 || cfg.neighbors < 2) throw PreconditionError("DriverConfig: bad Jacobian sampling");
  if (cfg.max_chart_attempts < 1) throw PreconditionError("DriverConfig: max_chart_attempts must be positive");
  if (!(cfg.tether_dt > 0.0)) throw PreconditionError("DriverConfig: tether_dt must be positive");
  if (!(cfg.fd_step > 0.0)) throw PreconditionError("DriverConfig: fd_step must be positive");
  if (cfg.dynamics == Dynamics::gad && cfg.mode != ChartMode::exact) {
    throw PreconditionError("DriverConfig: coupled GAD dynamics need the exact chart");
  }
}

std::string to_string(ExitReason reason) {
  switch (reason) {
    case ExitReason::trust_region: return "trust_region";
    case ExitReason::step_budget: return "step_budget";
    case ExitReason::converged: return "converged";
    case ExitReason::degenerate: return "degenerate";
  }
  return "unknown";
}

std::string to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::saddle_found: return "saddle_found";
    case Verdict::max_iterations: return "max_iterations";
    case Verdict::failed: return "failed";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// Charts

LearnedChart::LearnedChart(ChartPair pair, regression::RegressorModel chart_force, dimred::PointCloud cloud,
                           Vector diffusion_eigenvalues, ChartScores scores, double trust_factor)
    : pair_(std::move(pair)),
      chart_force_(std::move(chart_force)),
      cloud_(std::move(cloud)),
      cloud_columns_(cloud_.points.transpose()),
      eigenvalues_(std::move(diffusion_eigenvalues)),
      scores_(scores),
      trust_factor_(trust_factor) {
  spacing_ = median_nearest_neighbor(cloud_columns_);
  const Vector center = pair_.chart_samples.colwise().mean().transpose();
  diameter_ = 2.0 * ((pair_.chart_samples.rowwise() - center.transpose()).rowwise().norm().maxCoeff());
}

ChartGeometry LearnedChart::evaluate(const ChartPoint& u) const {
  const auto psi = regression::predict_with_derivatives(pair_.psi, u.u, 2);
  const auto force = regression::predict_with_derivatives(chart_force_, u.u, 1);
  ChartGeometry out;
  out.ambient = psi.value;
  out.jacobian = psi.jacobian;
  out.metric = geometry::metric_from_jacobian(psi.jacobian);
  const std::vector<Matrix> dg = geometry::metric_derivatives(psi.jacobian, psi.second);
  out.gamma = geometry::christoffel_from_derivatives(out.metric, dg);
  out.force.components = force.value;
  out.hessian = geometry::covariant_hessian(force.value, force.jacobian, out.gamma, out.metric);
  return out;
}

Vector LearnedChart::to_ambient(const ChartPoint& u) const { return regression::predict(pair_.psi, u.u); }

ChartPoint LearnedChart::to_chart(const Vector& x) const { return {regression::predict(pair_.phi, x)}; }

double LearnedChart::nearest_cloud_distance(const Vector& ambient) const {
  return std::sqrt((cloud_columns_.colwise() - ambient).colwise().squaredNorm().minCoeff());
}

bool LearnedChart::inside(const Vector& ambient) const {
  return ambient.allFinite() && nearest_cloud_distance(ambient) <= trust_factor_ * spacing_;
}

ExactLocalChart::ExactLocalChart(ExactChart chart) : chart_(std::move(chart)), dim_(chart_.dim) {
  if (dim_ < 1) throw PreconditionError("ExactLocalChart: chart dimension must be positive");
}

// ---------------------------------------------------------------------------
// Chart construction

std::vector<Matrix> data_tangent_jacobians(const regression::RegressorModel& phi, const Matrix& points, int n_points,
                                           int n_neighbors) {
  const Eigen::Index n = points.rows();
  const Eigen::Index count = std::min<Eigen::Index>(n_points, n);
  const Eigen::Index k = std::min<Eigen::Index>(n_neighbors, n - 1);
  const Matrix columns = points.transpose();
  std::vector<Matrix> out;
  out.reserve(static_cast<std::size_t>(count));
  for (Eigen::Index s = 0; s < count; ++s) {
    const Eigen::Index i = s * n / count;
    const Vector q = columns.col(i);
    const Vector dist = (columns.colwise() - q).colwise().squaredNorm().transpose();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < n; ++j) order[static_cast<std::size_t>(j)] = j;
    std::partial_sort(order.begin(), order.begin() + k + 1, order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return dist(a) < dist(b) || (dist(a) == dist(b) && a < b);
    });
    Matrix directions(points.cols(), k);
    Eigen::Index used = 0;
    for (Eigen::Index r = 0; r <= k && used < k; ++r) {
      const Eigen::Index j = order[static_cast<std::size_t>(r)];
      if (j == i || dist(j) == 0.0) continue;
      directions.col(used++) = (columns.col(j) - q) / std::sqrt(dist(j));
    }
    if (used == 0) continue;
    const Matrix jac = regression::predict_with_derivatives(phi, q, 1).jacobian;
    out.push_back(jac * directions.leftCols(used));
  }
  return out;
}

std::unique_ptr<LearnedChart> build_local_chart(const ProblemDefinition& problem, const Vector& base,
                                                const DriverConfig& cfg, std::uint64_t sampler_seed) {
  sampling::SamplerConfig sampler = cfg.sampler;
  sampler.seed = sampler_seed;
  dimred::PointCloud cloud = sampling::sample(problem, base, sampler);
  dimred::validate(cloud);
  const Eigen::Index n_points = cloud.size();
  const Eigen::Index ambient = cloud.ambient_dim();

  const double eps = dimred::bandwidth_median_rule(cloud.points);
  const Eigen::Index m = std::min<Eigen::Index>(cfg.n_components > 0 ? cfg.n_components : 2 * ambient + 2,
                                                n_points - 1);
  Vector eigenvalues;
  ChartScores scores;
  ChartPair pair;
  {
    dimred::DiffusionMapResult dmap = dimred::diffusion_maps(cloud.points, eps, m);
    eigenvalues = dmap.eigenvalues;
    auto phi_fit = regression::fit_selecting_nugget(cloud.points, dmap.coordinates, eps, &dmap.kernel, cfg.nuggets);
    dmap.kernel.resize(0, 0);
    if (!phi_fit.accepted) throw DegenerateChartError("build_local_chart: phi regression score below target");
    scores.phi = phi_fit.holdout_score;

    const auto jacobians = data_tangent_jacobians(phi_fit.model, cloud.points, cfg.jacobian_samples, cfg.neighbors);
    const dimred::ChartSelection selection = dimred::select_chart_components(dmap, jacobians, cfg.rank_tol);
    pair.phi = phi_fit.model.columns(selection.components);
    pair.chart_samples = dmap.coordinates(Eigen::all, selection.components);
  }
  const Eigen::Index d = pair.chart_samples.cols();

  // pushforward of the force field by phi
  Matrix pushforward(n_points, d);
  for (Eigen::Index i = 0; i < n_points; ++i) {
    const Matrix jac = regression::predict_with_derivatives(pair.phi, cloud.points.row(i).transpose(), 1).jacobian;
    pushforward.row(i) = (jac * cloud.forces.row(i).transpose()).transpose();
  }

  const double chart_eps = median_bandwidth(pair.chart_samples);
  const Matrix chart_kernel = squared_exponential_kernel(pair.chart_samples, chart_eps);
  auto psi_fit = regression::fit_selecting_nugget(pair.chart_samples, cloud.points, chart_eps, &chart_kernel,
                                                  cfg.nuggets);
  if (!psi_fit.accepted) throw DegenerateChartError("build_local_chart: psi regression score below target");
  auto force_fit = regression::fit_selecting_nugget(pair.chart_samples, pushforward, chart_eps, &chart_kernel,
                                                    cfg.nuggets);
  if (!force_fit.accepted) throw DegenerateChartError("build_local_chart: force regression score below target");
  scores.psi = psi_fit.holdout_score;
  scores.force = force_fit.holdout_score;
  pair.psi = std::move(psi_fit.model);

  return std::make_unique<LearnedChart>(std::move(pair), std::move(force_fit.model), std::move(cloud),
                                        std::move(eigenvalues), scores, cfg.trust_factor);
}

// ---------------------------------------------------------------------------
// Integration

bool check_convergence(double force_norm, const Vector& spectrum, const DriverConfig& cfg) {
  if (spectrum.size() == 0 || !(force_norm < cfg.tol_force)) return false;
  if (!(spectrum(0) < -cfg.tol_index)) return false;
  for (Eigen::Index i = 1; i < spectrum.size(); ++i) {
    if (!(spectrum(i) > cfg.tol_index)) return false;
  }
  return true;
}

IterationRecord integrate_isd_on_chart(const LocalChart& chart, const ChartPoint& u0, const DriverConfig& cfg) {
  IterationRecord record;
  record.chart_dim = static_cast<int>(chart.dim());
  ChartPoint u = u0;
  record.chart_trajectory.push_back(u);
  record.ambient_trajectory.push_back(chart.to_ambient(u));

  std::optional<Vector> previous;
  Vector gad_direction;
  ChartGeometry geo;
  geometry::Eigenpair eig;
  bool have_final = false;
  DriverConfig chart_cfg = cfg;
  chart_cfg.tol_force = cfg.chart_tol_factor * cfg.tol_force;
  record.exit_reason = ExitReason::step_budget;
  for (int step = 0; step <= cfg.n_ode_steps; ++step) {
    try {
      geo = chart.evaluate(u);
      eig = geometry::smallest_eigpair(geo.hessian, geo.metric, previous);
    } catch (const Error&) {
      record.exit_reason = ExitReason::degenerate;
      break;
    }
    previous = eig.v.components;
    record.force_norm = geo.metric.norm(geo.force.components);
    record.lambda_min = eig.lambda_min;
    record.spectrum = eig.spectrum;
    record.step_force_norm.push_back(record.force_norm);
    record.step_lambda_min.push_back(record.lambda_min);
    have_final = true;
    if (check_convergence(record.force_norm, eig.spectrum, chart_cfg)) {
      record.exit_reason = ExitReason::converged;
      break;
    }
    if (step == cfg.n_ode_steps) break;

    TangentVector direction = eig.v;
    if (cfg.dynamics == Dynamics::gad) {
      // v relaxes by dv = -Hess v + r v instead of the exact eigensolve
      if (gad_direction.size() == 0) gad_direction = eig.v.components;
      const double r = geometry::rayleigh_quotient(geo.hessian.lower, gad_direction, geo.metric);
      gad_direction += cfg.ode_dt * (-geo.hessian.mixed * gad_direction + r * gad_direction);
      gad_direction /= geo.metric.norm(gad_direction);
      direction.components = gad_direction;
    }
    const TangentVector velocity = geometry::isd_field(geo.force, direction, geo.metric);
    ChartPoint next{u.u + cfg.ode_dt * velocity.components};
    const Vector ambient = chart.to_ambient(next);
    if (!next.u.allFinite() || !chart.inside(ambient)) {
      record.exit_reason = ExitReason::trust_region;
      break;
    }
    u = std::move(next);
    record.chart_trajectory.push_back(u);
    record.ambient_trajectory.push_back(ambient);
  }
  if (!have_final) record.exit_reason = ExitReason::degenerate;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  record.step_force_norm.resize(record.chart_trajectory.size(), nan);
  record.step_lambda_min.resize(record.chart_trajectory.size(), nan);
  return record;
}

// ---------------------------------------------------------------------------
// Search loop

SearchTrajectory run_search(const ProblemDefinition& problem, const Vector& start, const DriverConfig& cfg) {
  validate(cfg);
  if (!(problem.projection_residual(start) < 1e-8)) throw PreconditionError("run_search: start is not on the manifold");
  if (cfg.mode == ChartMode::exact && !problem.exact_chart) {
    throw PreconditionError("run_search: exact mode needs a problem with an exact chart");
  }

  SearchTrajectory out;
  Vector base = start;
  int consecutive_failures = 0;
  out.verdict = Verdict::max_iterations;
  std::unique_ptr<LocalChart> exact;
  if (cfg.mode == ChartMode::exact) exact = std::make_unique<ExactLocalChart>(*problem.exact_chart);

  for (int iteration = 1; iteration <= cfg.n_iterations_max; ++iteration) {
    std::unique_ptr<LearnedChart> learned;
    const LocalChart* chart = exact.get();
    if (cfg.mode == ChartMode::learned) {
      for (int attempt = 0; attempt < cfg.max_chart_attempts && !learned; ++attempt) {
        try {
          learned = build_local_chart(problem, base, cfg,
                                      mix_seed(cfg.seed, static_cast<std::uint64_t>(iteration),
                                               static_cast<std::uint64_t>(attempt)));
        } catch (const DegenerateChartError&) {
        } catch (const SolverError&) {
        }
      }
      if (!learned) {
        out.verdict = Verdict::failed;
        break;
      }
      chart = learned.get();
    }

    IterationRecord record = integrate_isd_on_chart(*chart, chart->to_chart(base), cfg);
    record.iteration = iteration;
    record.cloud_size = learned ? learned->cloud().size() : 0;

    // hand off the endpoint to the ambient space
    const ChartPoint& end = record.chart_trajectory.back();
    Vector next = chart->to_ambient(end);
    if (learned) {
      const double inversion_error = (learned->to_chart(next).u - end.u).norm();
      if (!(inversion_error <= 0.1 * learned->chart_diameter())) {
        sampling::TetherConfig tether = cfg.tether;
        tether.target_phi = end.u;
        sampling::SamplerConfig sde = cfg.sampler;
        sde.dt = cfg.tether_dt;
        sde.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(iteration), 0xfeedULL);
        const auto tethered =
            sampling::invert_chart_via_tether(problem, sampling::chart_map(learned->pair().phi), tether, sde, base);
        if (tethered.residual < inversion_error) {
          next = tethered.point;
          record.used_tether = true;
        }
      }
    }
    next = problem.project(next);
    for (auto& x : record.ambient_trajectory) x = problem.project(x);
    record.ambient_trajectory.back() = next;
    if (!next.allFinite()) {
      record.exit_reason = ExitReason::degenerate;
      next = base;
    }

    const bool stalled = record.exit_reason == ExitReason::degenerate && record.chart_trajectory.size() <= 1;
    consecutive_failures = stalled ? consecutive_failures + 1 : 0;
    // the on-chart stop is tighter than tol_force; an index-1 chart Hessian with a small
    // ambient residual also ends the search
    const bool index_one = check_convergence(0.0, record.spectrum, cfg);
    out.records.push_back(std::move(record));
    base = next;
    if (index_one && problem.force(base).norm() < cfg.tol_force) {
      out.verdict = Verdict::saddle_found;
      break;
    }
    if (consecutive_failures >= cfg.max_chart_attempts) {
      out.verdict = Verdict::failed;
      break;
    }
  }
  out.final_point = base;
  out.saddle_residual = problem.force(base).norm();
  return out;
}

}  // namespace gadm::driver
