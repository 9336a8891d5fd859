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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gadm/dimred.hpp"
#include "gadm/geometry.hpp"
#include "gadm/problem.hpp"
#include "gadm/regression.hpp"
#include "gadm/sampling.hpp"

/// Chart-switching saddle search: sample, learn a chart, integrate ISD on it, hand off, repeat.
namespace gadm::driver {

enum class ChartMode { learned, exact };
enum class Dynamics { isd, gad };

struct DriverConfig {
  sampling::SamplerConfig sampler;
  int n_iterations_max = 12;
  int n_ode_steps = 1000;
  double ode_dt = 1e-4;
  double trust_factor = 3.0;
  double tol_force = 1e-4;
  double tol_index = 1e-6;
  // The on-chart stop uses chart_tol_factor * tol_force, so that the ambient residual, which adds the regression
  // error of the chart force, still ends below tol_force.
  double chart_tol_factor = 0.1;
  double rank_tol = dimred::kDefaultRankTolerance;
  std::uint64_t seed = 1;

  ChartMode mode = ChartMode::learned;
  Dynamics dynamics = Dynamics::isd;
  Eigen::Index n_components = 0;  // diffusion components; 0 picks 2n + 2
  int jacobian_samples = 50;      // cloud points used for the chart dimension estimate
  int neighbors = 10;             // neighbors spanning the data tangent space at those points
  int max_chart_attempts = 3;
  regression::NuggetSelection nuggets;
  sampling::TetherConfig tether{1e3, {}, 2000, 500, 0.0};
  double tether_dt = 1e-5;
  double fd_step = geometry::kDefaultFdStep;
};

void validate(const DriverConfig& cfg);

enum class ExitReason { trust_region, step_budget, converged, degenerate };
enum class Verdict { saddle_found, max_iterations, failed };

[[nodiscard]] std::string to_string(ExitReason reason);
[[nodiscard]] std::string to_string(Verdict verdict);

struct IterationRecord {
  int iteration = 0;
  Eigen::Index cloud_size = 0;
  int chart_dim = 0;
  std::vector<ChartPoint> chart_trajectory;
  std::vector<Vector> ambient_trajectory;
  std::vector<double> step_force_norm;  // per recorded point; NaN where the geometry could not be evaluated
  std::vector<double> step_lambda_min;
  double lambda_min = 0.0;
  Vector spectrum;
  double force_norm = 0.0;
  ExitReason exit_reason = ExitReason::step_budget;
  bool used_tether = false;
};

struct SearchTrajectory {
  std::vector<IterationRecord> records;
  Vector final_point;
  Verdict verdict = Verdict::failed;
  double saddle_residual = 0.0;
};

/// A chart over which the ISD field can be evaluated.
class LocalChart {
 public:
  virtual ~LocalChart() = default;
  [[nodiscard]] virtual Eigen::Index dim() const = 0;
  [[nodiscard]] virtual ChartGeometry evaluate(const ChartPoint& u) const = 0;
  [[nodiscard]] virtual Vector to_ambient(const ChartPoint& u) const = 0;
  [[nodiscard]] virtual ChartPoint to_chart(const Vector& x) const = 0;
  /// Trust-region test for the ambient image of a chart point.
  [[nodiscard]] virtual bool inside(const Vector& ambient) const = 0;
};

/// Pair of learned coordinate maps.
struct ChartPair {
  regression::RegressorModel phi;  // ambient -> chart
  regression::RegressorModel psi;  // chart -> ambient
  Matrix chart_samples;            // N x d diffusion coordinates of the cloud
};

struct ChartScores {
  double phi = 0.0;
  double psi = 0.0;
  double force = 0.0;
};

/// Chart learned from a point-cloud: diffusion maps for coordinates, kernel regression for phi, psi and the
/// pushforward force.
class LearnedChart final : public LocalChart {
 public:
  LearnedChart(ChartPair pair, regression::RegressorModel chart_force, dimred::PointCloud cloud,
               Vector diffusion_eigenvalues, ChartScores scores, double trust_factor);

  [[nodiscard]] Eigen::Index dim() const override { return pair_.chart_samples.cols(); }
  [[nodiscard]] ChartGeometry evaluate(const ChartPoint& u) const override;
  [[nodiscard]] Vector to_ambient(const ChartPoint& u) const override;
  [[nodiscard]] ChartPoint to_chart(const Vector& x) const override;
  [[nodiscard]] bool inside(const Vector& ambient) const override;

  [[nodiscard]] const ChartPair& pair() const { return pair_; }
  [[nodiscard]] const regression::RegressorModel& chart_force() const { return chart_force_; }
  [[nodiscard]] const dimred::PointCloud& cloud() const { return cloud_; }
  [[nodiscard]] const Vector& diffusion_eigenvalues() const { return eigenvalues_; }
  [[nodiscard]] const ChartScores& scores() const { return scores_; }
  /// Largest extent of the chart samples.
  [[nodiscard]] double chart_diameter() const { return diameter_; }
  [[nodiscard]] double neighbor_spacing() const { return spacing_; }
  [[nodiscard]] double nearest_cloud_distance(const Vector& ambient) const;

 private:
  ChartPair pair_;
  regression::RegressorModel chart_force_;
  dimred::PointCloud cloud_;
  Matrix cloud_columns_;  // n x N copy of the cloud for nearest-neighbor queries
  Vector eigenvalues_;
  ChartScores scores_;
  double trust_factor_ = 3.0;
  double spacing_ = 0.0;
  double diameter_ = 0.0;
};

/// The closed-form chart of a problem (oracle mode); the trust region is unbounded.
class ExactLocalChart final : public LocalChart {
 public:
  explicit ExactLocalChart(ExactChart chart);
  [[nodiscard]] Eigen::Index dim() const override { return dim_; }
  [[nodiscard]] ChartGeometry evaluate(const ChartPoint& u) const override { return chart_.evaluate(u); }
  [[nodiscard]] Vector to_ambient(const ChartPoint& u) const override { return chart_.psi(u.u); }
  [[nodiscard]] ChartPoint to_chart(const Vector& x) const override { return {chart_.phi(x)}; }
  [[nodiscard]] bool inside(const Vector& ambient) const override { return ambient.allFinite(); }

 private:
  ExactChart chart_;
  Eigen::Index dim_ = 0;
};

/// Samples a cloud around `base` and learns a chart on it. Throws DegenerateChartError when the chart is
/// degenerate or a regression score misses its target.
[[nodiscard]] std::unique_ptr<LearnedChart> build_local_chart(const ProblemDefinition& problem, const Vector& base,
                                                              const DriverConfig& cfg, std::uint64_t sampler_seed);

/// Tangent-space Jacobians of phi at a subset of cloud points: D phi(q) times unit displacements to neighbors.
[[nodiscard]] std::vector<Matrix> data_tangent_jacobians(const regression::RegressorModel& phi,
                                                         const Matrix& points, int n_points, int n_neighbors);

/// Explicit-Euler ISD (or coupled GAD) trajectory on one chart.
[[nodiscard]] IterationRecord integrate_isd_on_chart(const LocalChart& chart, const ChartPoint& u0,
                                                     const DriverConfig& cfg);

/// Index-1 certificate: small force, one negative eigenvalue, the rest positive.
[[nodiscard]] bool check_convergence(double force_norm, const Vector& spectrum, const DriverConfig& cfg);

[[nodiscard]] SearchTrajectory run_search(const ProblemDefinition& problem, const Vector& start,
                                          const DriverConfig& cfg);

}  // namespace gadm::driver
