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

#include "gadm/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gadm::io {

using nlohmann::json;

namespace {

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json vector_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

std::string mode_name(driver::ChartMode mode) { return mode == driver::ChartMode::exact ? "exact_chart" : "learned_chart"; }

driver::ChartMode parse_mode(const std::string& s) {
  if (s == "learned_chart") return driver::ChartMode::learned;
  if (s == "exact_chart") return driver::ChartMode::exact;
  throw PreconditionError("config: unknown mode '" + s + "'");
}

std::string kind_name(sampling::SamplerKind k) {
  return k == sampling::SamplerKind::brownian ? "brownian" : "flow_perturbation";
}

sampling::SamplerKind parse_kind(const std::string& s) {
  if (s == "flow_perturbation") return sampling::SamplerKind::flow_perturbation;
  if (s == "brownian") return sampling::SamplerKind::brownian;
  throw PreconditionError("config: unknown sampler kind '" + s + "'");
}

driver::Dynamics parse_dynamics(const std::string& s) {
  if (s == "isd") return driver::Dynamics::isd;
  if (s == "gad") return driver::Dynamics::gad;
  throw PreconditionError("config: unknown dynamics '" + s + "'");
}

template <class T>
T read(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw PreconditionError("config: bad value for '" + key + "'");
  }
}

template <class Handlers>
void apply(const json& section, const std::string& name, const Handlers& handlers) {
  if (!section.is_object()) throw PreconditionError("config: '" + name + "' must be an object");
  for (const auto& [key, value] : section.items()) {
    const auto it = handlers.find(key);
    if (it == handlers.end()) throw PreconditionError("config: unknown key '" + name + "." + key + "'");
    it->second(value);
  }
}

using Handler = std::function<void(const json&)>;

json driver_json(const driver::DriverConfig& d) {
  return json{{"n_iterations_max", d.n_iterations_max},
              {"n_ode_steps", d.n_ode_steps},
              {"ode_dt", d.ode_dt},
              {"trust_factor", d.trust_factor},
              {"tol_force", d.tol_force},
              {"tol_index", d.tol_index},
              {"chart_tol_factor", d.chart_tol_factor},
              {"rank_tol", d.rank_tol},
              {"seed", d.seed},
              {"dynamics", d.dynamics == driver::Dynamics::gad ? "gad" : "isd"},
              {"n_components", d.n_components},
              {"jacobian_samples", d.jacobian_samples},
              {"neighbors", d.neighbors},
              {"max_chart_attempts", d.max_chart_attempts},
              {"nugget_candidates", d.nuggets.candidates},
              {"target_score", d.nuggets.target_score},
              {"tether_kappa", d.tether.kappa},
              {"tether_burn_in", d.tether.burn_in},
              {"tether_n_average", d.tether.n_average},
              {"tether_dt", d.tether_dt}};
}

json sampler_json(const sampling::SamplerConfig& s) {
  return json{{"kind", kind_name(s.kind)},       {"n_samples", s.n_samples},
              {"sigma", s.sigma},                {"dt", s.dt},
              {"n_steps", s.n_steps},            {"thinning", s.thinning},
              {"perturbation_scale", s.perturbation_scale}, {"tau", s.tau},
              {"restraint", s.restraint}};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

}  // namespace

ProblemKind parse_problem_kind(const std::string& name) {
  if (name == "sphere") return ProblemKind::sphere;
  if (name == "mb_surface") return ProblemKind::mb_surface;
  throw PreconditionError("unknown problem '" + name + "' (expected sphere or mb_surface)");
}

std::string to_string(ProblemKind kind) { return kind == ProblemKind::sphere ? "sphere" : "mb_surface"; }

ProblemDefinition make_problem(ProblemKind kind) {
  return kind == ProblemKind::sphere ? benchmarks::sphere_problem() : benchmarks::surface_problem();
}

benchmarks::RunEndpoints make_endpoints(ProblemKind kind) {
  return kind == ProblemKind::sphere ? benchmarks::sphere_endpoints() : benchmarks::mb_surface_endpoints();
}

RunConfig default_run_config(ProblemKind kind) {
  RunConfig cfg;
  cfg.problem = kind;
  cfg.output_dir = "out/" + to_string(kind);
  auto& d = cfg.driver;
  d.n_ode_steps = 1000;
  d.ode_dt = 1e-4;
  auto& s = d.sampler;
  s.kind = sampling::SamplerKind::flow_perturbation;
  if (kind == ProblemKind::sphere) {
    d.n_iterations_max = 12;
    s.n_samples = 1000;
    s.perturbation_scale = 0.1;
    s.dt = 1e-3;
    s.n_steps = 0;
    s.tau = 0.0;
  } else {
    d.n_iterations_max = 10;
    d.tol_force = 0.5;  // forces here are O(100)
    s.n_samples = 5000;
    s.perturbation_scale = 0.1;
    s.dt = 1e-4;
    s.n_steps = 0;
    s.tau = 0.0;
  }
  return cfg;
}

void validate(const RunConfig& cfg) {
  driver::validate(cfg.driver);
  if (cfg.driver.mode == driver::ChartMode::exact && cfg.problem != ProblemKind::sphere) {
    throw PreconditionError("config: exact_chart mode is only available for the sphere");
  }
  if (cfg.output_dir.empty()) throw PreconditionError("config: output_dir must not be empty");
}

RunConfig parse_run_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!root.is_object() || !root.contains("problem")) throw PreconditionError("config: missing 'problem'");
  RunConfig cfg = default_run_config(parse_problem_kind(read<std::string>(root["problem"], "problem")));
  auto& d = cfg.driver;
  auto& s = d.sampler;

  const std::map<std::string, Handler> driver_keys{
      {"n_iterations_max", [&](const json& v) { d.n_iterations_max = read<int>(v, "n_iterations_max"); }},
      {"n_ode_steps", [&](const json& v) { d.n_ode_steps = read<int>(v, "n_ode_steps"); }},
      {"ode_dt", [&](const json& v) { d.ode_dt = read<double>(v, "ode_dt"); }},
      {"trust_factor", [&](const json& v) { d.trust_factor = read<double>(v, "trust_factor"); }},
      {"tol_force", [&](const json& v) { d.tol_force = read<double>(v, "tol_force"); }},
      {"tol_index", [&](const json& v) { d.tol_index = read<double>(v, "tol_index"); }},
      {"chart_tol_factor", [&](const json& v) { d.chart_tol_factor = read<double>(v, "chart_tol_factor"); }},
      {"rank_tol", [&](const json& v) { d.rank_tol = read<double>(v, "rank_tol"); }},
      {"seed", [&](const json& v) { d.seed = read<std::uint64_t>(v, "seed"); }},
      {"dynamics", [&](const json& v) { d.dynamics = parse_dynamics(read<std::string>(v, "dynamics")); }},
      {"n_components", [&](const json& v) { d.n_components = read<Eigen::Index>(v, "n_components"); }},
      {"jacobian_samples", [&](const json& v) { d.jacobian_samples = read<int>(v, "jacobian_samples"); }},
      {"neighbors", [&](const json& v) { d.neighbors = read<int>(v, "neighbors"); }},
      {"max_chart_attempts", [&](const json& v) { d.max_chart_attempts = read<int>(v, "max_chart_attempts"); }},
      {"nugget_candidates",
       [&](const json& v) { d.nuggets.candidates = read<std::vector<double>>(v, "nugget_candidates"); }},
      {"target_score", [&](const json& v) { d.nuggets.target_score = read<double>(v, "target_score"); }},
      {"tether_kappa", [&](const json& v) { d.tether.kappa = read<double>(v, "tether_kappa"); }},
      {"tether_burn_in", [&](const json& v) { d.tether.burn_in = read<int>(v, "tether_burn_in"); }},
      {"tether_n_average", [&](const json& v) { d.tether.n_average = read<int>(v, "tether_n_average"); }},
      {"tether_dt", [&](const json& v) { d.tether_dt = read<double>(v, "tether_dt"); }},
  };
  const std::map<std::string, Handler> sampler_keys{
      {"kind", [&](const json& v) { s.kind = parse_kind(read<std::string>(v, "kind")); }},
      {"n_samples", [&](const json& v) { s.n_samples = read<Eigen::Index>(v, "n_samples"); }},
      {"sigma", [&](const json& v) { s.sigma = read<double>(v, "sigma"); }},
      {"dt", [&](const json& v) { s.dt = read<double>(v, "dt"); }},
      {"n_steps", [&](const json& v) { s.n_steps = read<int>(v, "n_steps"); }},
      {"thinning", [&](const json& v) { s.thinning = read<int>(v, "thinning"); }},
      {"perturbation_scale", [&](const json& v) { s.perturbation_scale = read<double>(v, "perturbation_scale"); }},
      {"tau", [&](const json& v) { s.tau = read<double>(v, "tau"); }},
      {"restraint", [&](const json& v) { s.restraint = read<double>(v, "restraint"); }},
  };
  const std::map<std::string, Handler> root_keys{
      {"problem", [](const json&) {}},
      {"mode", [&](const json& v) { d.mode = parse_mode(read<std::string>(v, "mode")); }},
      {"output_dir", [&](const json& v) { cfg.output_dir = read<std::string>(v, "output_dir"); }},
      {"driver", [&](const json& v) { apply(v, "driver", driver_keys); }},
      {"sampler", [&](const json& v) { apply(v, "sampler", sampler_keys); }},
  };
  apply(root, "config", root_keys);
  validate(cfg);
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot read config " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str());
}

std::string run_config_json(const RunConfig& cfg) {
  const json j{{"problem", to_string(cfg.problem)},
               {"mode", mode_name(cfg.driver.mode)},
               {"output_dir", cfg.output_dir.string()},
               {"driver", driver_json(cfg.driver)},
               {"sampler", sampler_json(cfg.driver.sampler)}};
  return j.dump(2) + "\n";
}

void write_trajectory_csv(std::ostream& out, const ProblemDefinition& problem, const driver::SearchTrajectory& run) {
  const Eigen::Index n = problem.ambient_dim;
  int d = 0;
  for (const auto& r : run.records) d = std::max(d, r.chart_dim);
  out << "iteration,step";
  for (Eigen::Index i = 1; i <= n; ++i) out << ",x" << i;
  for (int i = 1; i <= d; ++i) out << ",u" << i;
  out << ",energy,force_norm,lambda_min\n";
  for (const auto& r : run.records) {
    for (std::size_t k = 0; k < r.chart_trajectory.size(); ++k) {
      const Vector& x = r.ambient_trajectory[k];
      const Vector& u = r.chart_trajectory[k].u;
      out << r.iteration << ',' << k;
      for (Eigen::Index i = 0; i < n; ++i) out << ',' << number(x(i));
      for (int i = 0; i < d; ++i) out << ',' << (i < u.size() ? number(u(i)) : std::string());
      out << ',' << number(problem.energy(x)) << ',' << number(r.step_force_norm[k]) << ','
          << number(r.step_lambda_min[k]) << '\n';
    }
  }
}

std::vector<double> relative_errors(const driver::SearchTrajectory& run, const std::vector<Vector>& saddles) {
  std::vector<double> out;
  if (saddles.empty() || run.records.empty()) return out;
  const Vector* nearest = &saddles.front();
  for (const auto& s : saddles) {
    if ((s - run.final_point).norm() < (*nearest - run.final_point).norm()) nearest = &s;
  }
  for (const auto& r : run.records) out.push_back((r.ambient_trajectory.back() - *nearest).norm() / nearest->norm());
  return out;
}

void write_error_csv(std::ostream& out, const std::vector<double>& errors) {
  out << "iteration,relative_error\n";
  for (std::size_t i = 0; i < errors.size(); ++i) out << i + 1 << ',' << number(errors[i]) << '\n';
}

std::string summary_json(const RunConfig& cfg, const driver::SearchTrajectory& run) {
  json iterations = json::array();
  for (const auto& r : run.records) {
    iterations.push_back({{"iteration", r.iteration},
                          {"cloud_size", r.cloud_size},
                          {"chart_dim", r.chart_dim},
                          {"steps", r.chart_trajectory.size()},
                          {"exit_reason", driver::to_string(r.exit_reason)},
                          {"used_tether", r.used_tether},
                          {"force_norm", r.force_norm},
                          {"lambda_min", r.lambda_min},
                          {"endpoint", vector_json(r.ambient_trajectory.back())}});
  }
  const json j{{"problem", to_string(cfg.problem)},
               {"mode", mode_name(cfg.driver.mode)},
               {"seed", cfg.driver.seed},
               {"verdict", driver::to_string(run.verdict)},
               {"iterations", run.records.size()},
               {"final_point", vector_json(run.final_point)},
               {"residual", run.saddle_residual},
               {"records", iterations}};
  return j.dump(2) + "\n";
}

std::string critical_points_json(const std::string& problem, const benchmarks::CriticalPointReport& report) {
  json points = json::array();
  for (const auto& p : report.points) points.push_back(vector_json(p));
  const json j{{"problem", problem},
               {"count", report.size()},
               {"points", points},
               {"indices", report.indices},
               {"residuals", report.residuals},
               {"energies", report.energies}};
  return j.dump(2) + "\n";
}

std::string geometry_report_json(const validation::GeometryReport& report) {
  json errors = json::array();
  for (const auto& e : report.errors) {
    errors.push_back({{"quantity", e.name},
                      {"path", e.finite_difference ? "finite_difference" : "analytic"},
                      {"max_relative_error", e.max_relative_error},
                      {"tolerance", e.tolerance()},
                      {"passed", e.passed()}});
  }
  const json j{{"n_points", report.n_points}, {"seed", report.seed}, {"passed", report.passed()}, {"errors", errors}};
  return j.dump(2) + "\n";
}

int exit_code(driver::Verdict verdict) {
  switch (verdict) {
    case driver::Verdict::saddle_found: return 0;
    case driver::Verdict::max_iterations: return 2;
    case driver::Verdict::failed: return 1;
  }
  return 1;
}

RunResult execute_run(const RunConfig& cfg) {
  validate(cfg);
  const ProblemDefinition problem = make_problem(cfg.problem);
  const benchmarks::RunEndpoints ends = make_endpoints(cfg.problem);

  RunResult result;
  result.trajectory = driver::run_search(problem, ends.start, cfg.driver);
  result.errors = relative_errors(result.trajectory, ends.saddles);
  result.exit_code = exit_code(result.trajectory.verdict);

  std::filesystem::create_directories(cfg.output_dir);
  std::ostringstream csv;
  write_trajectory_csv(csv, problem, result.trajectory);
  write_file(cfg.output_dir / "trajectory.csv", csv.str());
  write_file(cfg.output_dir / "summary.json", summary_json(cfg, result.trajectory));
  std::ostringstream err;
  write_error_csv(err, result.errors);
  write_file(cfg.output_dir / "error.csv", err.str());
  return result;
}

}  // namespace gadm::io
