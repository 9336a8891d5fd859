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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gadm/benchmarks.hpp"
#include "gadm/driver.hpp"
#include "gadm/validation.hpp"

/// Run configuration files and the CSV / JSON artifacts of a search.
namespace gadm::io {

enum class ProblemKind { sphere, mb_surface };

[[nodiscard]] ProblemKind parse_problem_kind(const std::string& name);
[[nodiscard]] std::string to_string(ProblemKind kind);
[[nodiscard]] ProblemDefinition make_problem(ProblemKind kind);
[[nodiscard]] benchmarks::RunEndpoints make_endpoints(ProblemKind kind);

struct RunConfig {
  ProblemKind problem = ProblemKind::sphere;
  driver::DriverConfig driver;
  std::filesystem::path output_dir = "out";
};

/// Settings of the published benchmark runs for `kind`.
[[nodiscard]] RunConfig default_run_config(ProblemKind kind);

/// Throws PreconditionError on any invalid field, including the exact chart on a problem without one.
void validate(const RunConfig& cfg);

/// JSON object with "problem", optional "mode" and "output_dir", and "driver" / "sampler" sections whose keys
/// override default_run_config(problem). Unknown keys are rejected. The result is validated.
[[nodiscard]] RunConfig parse_run_config(const std::string& text);
[[nodiscard]] RunConfig load_run_config(const std::filesystem::path& path);
[[nodiscard]] std::string run_config_json(const RunConfig& cfg);

/// Columns: iteration, step, x1..xn, u1..ud, energy, force_norm, lambda_min (17 significant digits).
void write_trajectory_csv(std::ostream& out, const ProblemDefinition& problem, const driver::SearchTrajectory& run);

/// |x_k - s| / |s| for the endpoint x_k of every iteration, s the saddle nearest the final point.
[[nodiscard]] std::vector<double> relative_errors(const driver::SearchTrajectory& run,
                                                  const std::vector<Vector>& saddles);
void write_error_csv(std::ostream& out, const std::vector<double>& errors);

[[nodiscard]] std::string summary_json(const RunConfig& cfg, const driver::SearchTrajectory& run);
[[nodiscard]] std::string critical_points_json(const std::string& problem, const benchmarks::CriticalPointReport& report);
[[nodiscard]] std::string geometry_report_json(const validation::GeometryReport& report);

/// Exit status of a run: 0 saddle found, 2 iteration cap, 1 failure.
[[nodiscard]] int exit_code(driver::Verdict verdict);

struct RunResult {
  driver::SearchTrajectory trajectory;
  std::vector<double> errors;
  int exit_code = 1;
};

/// Runs the search from the oracle start point and writes trajectory.csv, summary.json and error.csv.
[[nodiscard]] RunResult execute_run(const RunConfig& cfg);

}  // namespace gadm::io
