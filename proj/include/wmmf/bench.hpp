// Copyright 2026 The wmmf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#pragma once

#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wmmf/kernels.hpp"
#include "wmmf/scenario.hpp"
#include "wmmf/siso_solver.hpp"
#include "wmmf/trace.hpp"
#include "wmmf/wmmf_solver.hpp"

namespace wmmf {

enum class Algorithm { kWmmf, kSiso };

Algorithm parse_algorithm(const std::string& name);
const char* algorithm_name(Algorithm algorithm);

struct SolverOptions {
  Algorithm algorithm = Algorithm::kWmmf;
  SolverConfig wmmf;
  SisoConfig siso;
};

/// Reads a "solver" object: {"algorithm", "step_size", "inner_iters",
/// "outer_iters", "convergence_tol", "bisection_tol", "mu_min",
/// "diminishing_step", "relative_step", "record_trace"}. Keys that only
/// apply to one algorithm are accepted for both. Unknown keys are errors.
SolverOptions solver_options_from_json(const nlohmann::json& solver);

/// Scenario plus the optional "solver" object of a config file.
struct SolveConfig {
  Scenario scenario;
  SolverOptions options;
};

SolveConfig solve_config_from_json(const nlohmann::json& config);
SolveConfig load_solve_config(const std::filesystem::path& path);

/// Outcome of one solve in a form shared by both algorithms.
struct RunOutcome {
  Algorithm algorithm = Algorithm::kWmmf;
  bool ok = false;
  std::string error;          // set when !ok
  std::exception_ptr failure; // set when !ok
  double common_rate = 0.0;   // bits/use
  double achieved_rate = 0.0; // true min weighted group rate, bits/use
  double min_sinr = 0.0;      // linear
  double power = 0.0;
  double power_budget = 0.0;
  int outer_iterations = 0;
  int iterations = 0;         // inner iterations summed over outer ones
  bool converged = false;
  double max_kkt_residual = 0.0;
  TransmitState tx;
  SolveTrace trace;
  double wall_time_s = 0.0;
};

/// max(stationarity, dual normalization, lambda identity, power slackness)
/// at the returned iterate.
double max_kkt_residual(const Scenario& scenario, const WmmfResult& result);

/// Solves and summarizes. Solver-side failures (numerical, degenerate
/// duals, unsupported instance) become !ok outcomes; configuration errors
/// propagate.
RunOutcome run_solver(const Scenario& scenario, const SolverOptions& options);

enum class SolverSelection { kWmmf, kSiso, kBoth };

struct ExperimentSpec {
  nlohmann::json scenario;             // config template without channels
  std::string sweep_parameter;         // n_tx | n_rx | p_t_db
  std::vector<double> sweep_values;
  std::vector<std::uint64_t> seeds;
  SolverSelection solver = SolverSelection::kWmmf;
  SolverOptions options;               // per-algorithm settings
  std::string output = "results.csv";

  void validate() const;
};

/// {"scenario": {...}, "sweep": {"parameter": "p_t_db", "values": [...]},
///  "seeds": [...], "solver": "wmmf" | "siso" | "both",
///  "wmmf": {...}, "siso": {...}, "output": "results.csv"}
ExperimentSpec experiment_from_json(const nlohmann::json& spec);
ExperimentSpec load_experiment(const std::filesystem::path& path);

/// Template with the swept value and seed applied.
Scenario sweep_scenario(const ExperimentSpec& spec, double value, std::uint64_t seed);

/// Relative paths resolve against $WMMF_OUTPUT_DIR when set.
std::filesystem::path resolve_output_path(const std::string& output);

inline constexpr const char* kResultColumns[] = {
    "sweep_param", "sweep_value",    "seed",       "solver",           "status",
    "converged",   "r_c",            "achieved_rate", "total_power",   "power_budget",
    "outer_iterations", "iterations", "max_kkt_residual", "error",     "wall_time_s"};
inline constexpr int kNumResultColumns = 15;

/// "%.12g"
std::string format_real(double value);

struct ResultRow {
  std::string sweep_param;
  double sweep_value = 0.0;
  std::uint64_t seed = 0;
  std::string solver;
  std::string status;  // ok | failed
  bool converged = false;
  double common_rate = 0.0;
  double achieved_rate = 0.0;
  double total_power = 0.0;
  double power_budget = 0.0;
  int outer_iterations = 0;
  int iterations = 0;
  double max_kkt_residual = 0.0;
  std::string error;
  double wall_time_s = 0.0;
};

std::string csv_header();
std::string csv_row(const ResultRow& row);

struct SweepSummary {
  std::filesystem::path output;
  int rows = 0;
  int failed = 0;
};

/// Runs every (value, seed, solver) cell in order and appends one flushed
/// row per cell. With trace_dir set, also writes one trace CSV per cell.
SweepSummary run_sweep(const ExperimentSpec& spec, const std::filesystem::path& output,
                       const std::optional<std::filesystem::path>& trace_dir = std::nullopt);

/// Parses a result file. Throws ParseError with the 1-based line number.
std::vector<ResultRow> read_results(const std::filesystem::path& path);
std::vector<ResultRow> parse_results(const std::string& text);

struct ValidationLimits {
  double power_tolerance = 1e-6;  // relative excess over the budget
  double kkt_ceiling = 1e-6;
};

struct RowCheck {
  int line = 0;
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ValidationReport {
  int rows = 0;
  int failed_solves = 0;
  std::vector<RowCheck> checks;

  bool passed() const;
  int failures() const;
  /// One line per check plus a totals line.
  void print(std::ostream& out) const;
};

ValidationReport validate_results(const std::vector<ResultRow>& rows,
                                  const ValidationLimits& limits = {});

}  // namespace wmmf
