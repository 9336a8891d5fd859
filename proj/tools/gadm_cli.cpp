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

// gadm command line: run searches, check the geometry against the sphere oracle, list critical points.

#include <CLI11.hpp>

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "gadm/benchmarks.hpp"
#include "gadm/io.hpp"
#include "gadm/validation.hpp"

namespace {

namespace fs = std::filesystem;

bool write_report(const fs::path& dir, const std::string& text) {
  fs::create_directories(dir);
  std::ofstream out(dir / "report.json", std::ios::binary);
  out << text;
  return static_cast<bool>(out);
}

int run_command(const std::string& config_path) {
  gadm::io::RunConfig cfg;
  try {
    cfg = gadm::io::load_run_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "gadm run: " << e.what() << '\n';
    return 1;
  }
  try {
    const auto result = gadm::io::execute_run(cfg);
    const auto& t = result.trajectory;
    std::cout << gadm::driver::to_string(t.verdict) << " after " << t.records.size() << " iterations, residual "
              << t.saddle_residual << ", outputs in " << cfg.output_dir.string() << '\n';
    return result.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "gadm run: " << e.what() << '\n';
    return 1;
  }
}

int validate_geometry_command(int n, std::uint64_t seed, double christoffel_scale, const fs::path& dir) {
  const auto report = gadm::validation::validate_sphere_geometry(n, seed, christoffel_scale);
  for (const auto& e : report.errors) {
    std::cout << (e.passed() ? "ok   " : "FAIL ") << e.name << " max relative error " << e.max_relative_error
              << " (tolerance " << e.tolerance() << ")\n";
  }
  if (!write_report(dir, gadm::io::geometry_report_json(report))) {
    std::cerr << "gadm validate-geometry: cannot write report\n";
    return 1;
  }
  return report.passed() ? 0 : 2;
}

int oracle_command(const std::string& name, const fs::path& dir) {
  try {
    const auto kind = gadm::io::parse_problem_kind(name);
    const auto report = kind == gadm::io::ProblemKind::sphere ? gadm::benchmarks::sphere_critical_points()
                                                              : gadm::benchmarks::mb_surface_critical_points();
    if (!write_report(dir, gadm::io::critical_points_json(name, report))) throw std::runtime_error("cannot write report");
    for (std::size_t i = 0; i < report.size(); ++i) {
      std::cout << "index " << report.indices[i] << "  energy " << report.energies[i] << "  point "
                << report.points[i].transpose() << '\n';
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "gadm oracle: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Saddle search on learned charts of sampled manifolds"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run a saddle search described by a JSON config");
  run->add_option("config", config_path, "Config file")->required();

  int n_points = 100;
  std::uint64_t seed = 1;
  double christoffel_scale = 1.0;
  std::string output_dir = ".";
  auto* vg = app.add_subcommand("validate-geometry", "Compare the geometry module with the stereographic sphere");
  vg->add_option("--n", n_points, "Number of random chart points")->check(CLI::NonNegativeNumber);
  vg->add_option("--seed", seed, "Random seed");
  vg->add_option("--output-dir", output_dir, "Directory for report.json");
  vg->add_option("--christoffel-scale", christoffel_scale, "Multiply computed connection coefficients (self-test)")
      ->group("");

  std::string problem;
  auto* oracle = app.add_subcommand("oracle", "List the critical points of a benchmark");
  oracle->add_option("problem", problem, "sphere or mb_surface")->required();
  oracle->add_option("--output-dir", output_dir, "Directory for report.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  if (*run) return run_command(config_path);
  if (*vg) return validate_geometry_command(n_points, seed, christoffel_scale, output_dir);
  return oracle_command(problem, output_dir);
}
