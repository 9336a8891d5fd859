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

#include <cmath>

#include "gadm/benchmarks.hpp"
#include "gadm/driver.hpp"
#include "gadm/geometry.hpp"

using namespace gadm;
using namespace gadm::driver;

namespace {

// U = u1^2 - u2^2 on the flat plane, charted by the identity.
ExactChart quadratic_chart() {
  ExactChart c;
  c.dim = 2;
  c.phi = [](const Vector& x) { return x; };
  c.psi = [](const Vector& u) { return u; };
  c.evaluate = [](const ChartPoint& p) {
    ChartGeometry g;
    g.ambient = p.u;
    g.jacobian = Matrix::Identity(2, 2);
    g.metric = geometry::make_metric(Matrix::Identity(2, 2));
    g.gamma = ChristoffelSymbols(2);
    g.force.components = Eigen::Vector2d(-2 * p.u(0), 2 * p.u(1));
    g.hessian.lower = Eigen::Vector2d(2, -2).asDiagonal();
    g.hessian.mixed = g.hessian.lower;
    return g;
  };
  return c;
}

DriverConfig sphere_config() {
  DriverConfig cfg;
  cfg.sampler.n_samples = 1000;
  cfg.sampler.perturbation_scale = 0.1;
  return cfg;
}

Vector sphere_sink() { return Eigen::Vector3d(1, 1, -1).normalized(); }

// A point on the sphere a geodesic distance `offset` from the sink, towards the equator.
Vector near_sink(double offset) {
  const Eigen::Vector3d s = sphere_sink();
  const Eigen::Vector3d t = (Eigen::Vector3d(1, 0, 0) - s.x() * s).normalized();
  return std::cos(offset) * s + std::sin(offset) * t;
}

double rel_rms(const Matrix& a, const Matrix& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST_CASE("convergence certificate") {
  DriverConfig cfg;
  cfg.tol_force = 1e-6;
  cfg.tol_index = 1e-8;
  CHECK(check_convergence(1e-9, Eigen::Vector2d(-1, 2), cfg));
  CHECK_FALSE(check_convergence(1e-9, Eigen::Vector2d(-1, -0.5), cfg));
  CHECK_FALSE(check_convergence(0.1, Eigen::Vector2d(-1, 2), cfg));
  CHECK_FALSE(check_convergence(1e-9, Eigen::Vector2d(1, 2), cfg));
  CHECK_FALSE(check_convergence(1e-9, Vector(), cfg));
}

TEST_CASE("config validation and names") {
  DriverConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  cfg.ode_dt = 0;
  CHECK_THROWS_AS(validate(cfg), PreconditionError);
  cfg = {};
  cfg.dynamics = Dynamics::gad;
  CHECK_THROWS_AS(validate(cfg), PreconditionError);
  cfg.mode = ChartMode::exact;
  CHECK_NOTHROW(validate(cfg));
  CHECK(to_string(ExitReason::trust_region) == "trust_region");
  CHECK(to_string(Verdict::saddle_found) == "saddle_found");
}

TEST_CASE("ISD on the quadratic saddle chart") {
  const ExactLocalChart chart(quadratic_chart());
  DriverConfig cfg;
  cfg.ode_dt = 5e-3;  // 1000 steps cover t = 5, where e^{-2t} ~ 5e-5
  const auto rec = integrate_isd_on_chart(chart, {Eigen::Vector2d(0.5, 0.5)}, cfg);
  CHECK(rec.chart_trajectory.back().u.norm() < 1e-3);
  // explicit Euler on du = -2u
  const double expected = 0.5 * std::sqrt(2.0) * std::pow(1 - 2 * cfg.ode_dt, rec.chart_trajectory.size() - 1);
  CHECK(rec.chart_trajectory.back().u.norm() == doctest::Approx(expected).epsilon(1e-10));
  CHECK(rec.chart_trajectory.size() == rec.step_force_norm.size());
  CHECK(rec.lambda_min == doctest::Approx(-2.0));

  // equilibrium is preserved: converged with no motion
  const auto still = integrate_isd_on_chart(chart, {Eigen::Vector2d(0, 0)}, cfg);
  CHECK(still.exit_reason == ExitReason::converged);
  CHECK(still.chart_trajectory.size() == 1);

  // coupled v relaxation reaches the same point
  cfg.dynamics = Dynamics::gad;
  cfg.mode = ChartMode::exact;
  const auto gad = integrate_isd_on_chart(chart, {Eigen::Vector2d(0.5, 0.5)}, cfg);
  CHECK(gad.chart_trajectory.back().u.norm() < 1e-3);
}

TEST_CASE("degenerate geometry ends the iteration") {
  ExactChart broken = quadratic_chart();
  broken.evaluate = [](const ChartPoint& p) -> ChartGeometry {
    if (p.u(0) < 0.4) throw DegenerateChartError("test");
    return quadratic_chart().evaluate(p);
  };
  const ExactLocalChart chart(broken);
  DriverConfig cfg;
  cfg.ode_dt = 5e-3;
  const auto rec = integrate_isd_on_chart(chart, {Eigen::Vector2d(0.5, 0.5)}, cfg);
  CHECK(rec.exit_reason == ExitReason::degenerate);
  CHECK(rec.chart_trajectory.back().u(0) < 0.4);
  CHECK(std::isnan(rec.step_force_norm.back()));
}

TEST_CASE("learned sphere chart at the sink") {
  const auto problem = benchmarks::sphere_problem();
  const DriverConfig cfg = sphere_config();
  const auto chart = build_local_chart(problem, sphere_sink(), cfg, 7);
  CHECK(chart->dim() == 2);
  CHECK(chart->scores().phi >= 0.99);
  CHECK(chart->scores().psi >= 0.99);
  CHECK(chart->scores().force >= 0.99);
  const auto& cloud = chart->cloud();
  const auto& pair = chart->pair();

  // phi reproduces the diffusion coordinates; psi(phi(q)) returns to q
  const Matrix phi_on_cloud = regression::predict_batch(pair.phi, cloud.points);
  CHECK((phi_on_cloud - pair.chart_samples).cwiseAbs().maxCoeff() < 10 * 1e-2 * pair.chart_samples.cwiseAbs().maxCoeff());
  double diameter = 0;
  for (Eigen::Index i = 0; i < cloud.size(); i += 7) {
    for (Eigen::Index j = 0; j < cloud.size(); j += 7) {
      diameter = std::max(diameter, (cloud.points.row(i) - cloud.points.row(j)).norm());
    }
  }
  const Matrix round_trip = regression::predict_batch(pair.psi, phi_on_cloud);
  int good = 0;
  for (Eigen::Index i = 0; i < cloud.size(); ++i) good += (round_trip.row(i) - cloud.points.row(i)).norm() < 0.05 * diameter;
  CHECK(good >= 0.95 * cloud.size());

  // pushforward: D psi(u) Y(u) against the ambient force on the cloud
  Matrix learned(cloud.size(), 3);
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    const auto geo = chart->evaluate({pair.chart_samples.row(i).transpose()});
    learned.row(i) = (geo.jacobian * geo.force.components).transpose();
  }
  CHECK(rel_rms(learned, cloud.forces) < 0.05);

  // chart-independent scalars at the sink: isotropic Hessian 2/sqrt(3)
  const auto geo = chart->evaluate(chart->to_chart(sphere_sink()));
  const auto eig = geometry::smallest_eigpair(geo.hessian, geo.metric);
  const auto exact = benchmarks::sphere_exact_chart_eval({benchmarks::sphere_chart_phi(sphere_sink())});
  const auto exact_eig = geometry::smallest_eigpair(exact.hessian, exact.metric);
  for (Eigen::Index i = 0; i < 2; ++i) {
    CHECK(eig.spectrum(i) == doctest::Approx(exact_eig.spectrum(i)).epsilon(0.1));
  }
  CHECK(exact_eig.spectrum(0) == doctest::Approx(2 / std::sqrt(3.0)).epsilon(1e-10));

  // trust region: the cloud is inside, far points are not
  CHECK(chart->inside(cloud.points.row(0).transpose()));
  CHECK_FALSE(chart->inside(-sphere_sink()));
}

TEST_CASE("chart-independent scalars away from critical points") {
  const auto problem = benchmarks::sphere_problem();
  const DriverConfig cfg = sphere_config();
  const Vector base = near_sink(0.3);
  const auto chart = build_local_chart(problem, base, cfg, 3);
  const auto geo = chart->evaluate(chart->to_chart(base));
  const auto exact = benchmarks::sphere_exact_chart_eval({benchmarks::sphere_chart_phi(base)});
  const double grad_learned = geo.metric.norm(geo.force.components);
  const double grad_exact = exact.metric.norm(exact.force.components);
  CHECK(grad_learned == doctest::Approx(grad_exact).epsilon(0.1));
  const double lam = geometry::smallest_eigpair(geo.hessian, geo.metric).lambda_min;
  const double lam_exact = geometry::smallest_eigpair(exact.hessian, exact.metric).lambda_min;
  CHECK(lam == doctest::Approx(lam_exact).epsilon(0.1));
}

TEST_CASE("first sphere iteration climbs in energy") {
  const auto problem = benchmarks::sphere_problem();
  const Vector base = near_sink(0.1);
  const auto chart = build_local_chart(problem, base, sphere_config(), 5);
  const auto rec = integrate_isd_on_chart(*chart, chart->to_chart(base), sphere_config());
  CHECK((rec.exit_reason == ExitReason::trust_region || rec.exit_reason == ExitReason::step_budget));
  CHECK(problem.energy(rec.ambient_trajectory.back()) > problem.energy(rec.ambient_trajectory.front()));
}

TEST_CASE("tethered inversion on a learned sphere chart") {
  const auto problem = benchmarks::sphere_problem();
  const auto chart = build_local_chart(problem, sphere_sink(), sphere_config(), 11);
  const Vector target_point = near_sink(0.05);
  sampling::TetherConfig tether;
  tether.kappa = 1e3;
  tether.burn_in = 2000;
  tether.n_average = 500;
  tether.target_phi = chart->to_chart(target_point).u;
  sampling::SamplerConfig sde;
  sde.dt = 1e-5;
  const auto r = sampling::invert_chart_via_tether(problem, sampling::chart_map(chart->pair().phi), tether, sde,
                                                   sphere_sink());
  CHECK(r.residual < 0.1 * chart->chart_diameter());
  CHECK(r.residual < (chart->to_chart(sphere_sink()).u - tether.target_phi).norm());
}

TEST_CASE("searches") {
  const auto problem = benchmarks::sphere_problem();
  const auto ends = benchmarks::sphere_endpoints();

  SUBCASE("starting at a saddle finishes in one iteration") {
    const auto run = run_search(problem, ends.target_saddle, sphere_config());
    CHECK(run.verdict == Verdict::saddle_found);
    CHECK(run.records.size() == 1);
    CHECK(run.saddle_residual < sphere_config().tol_force);
  }

  SUBCASE("learned and exact charts reach the same saddle") {
    DriverConfig cfg = sphere_config();
    cfg.ode_dt = 1e-3;
    cfg.n_iterations_max = 12;
    const Vector start = near_sink(0.1);
    const auto learned = run_search(problem, start, cfg);
    DriverConfig exact_cfg = cfg;
    exact_cfg.mode = ChartMode::exact;
    const auto exact = run_search(problem, start, exact_cfg);
    REQUIRE(exact.verdict == Verdict::saddle_found);
    REQUIRE(learned.verdict == Verdict::saddle_found);
    CHECK((learned.final_point - exact.final_point).norm() < 1e-2);
    CHECK(learned.saddle_residual < cfg.tol_force);
    CHECK(learned.saddle_residual < problem.force(learned.records.front().ambient_trajectory.back()).norm());
    for (const auto& r : learned.records) {
      CHECK(r.chart_dim == 2);
      for (const auto& x : r.ambient_trajectory) CHECK(problem.projection_residual(x) < 1e-8);
    }
    const auto again = run_search(problem, start, cfg);
    REQUIRE(again.records.size() == learned.records.size());
    CHECK((again.final_point.array() == learned.final_point.array()).all());
  }

  SUBCASE("start must be on the manifold") {
    CHECK_THROWS_AS((void)run_search(problem, Eigen::Vector3d(1, 1, 1), sphere_config()), PreconditionError);
  }
}
