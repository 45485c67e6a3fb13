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


#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "wmmf/wmmf.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

int report(wmmf_status status) {
  std::fprintf(stderr, "error: %s: %s\n", wmmf_status_name(status), wmmf_last_error());
  switch (status) {
    case WMMF_OK: return kExitOk;
    case WMMF_ERR_PARSE:
    case WMMF_ERR_VALIDATION:
    case WMMF_ERR_INVALID_ARGUMENT: return kExitConfig;
    case WMMF_ERR_IO: return kExitIo;
    default: return kExitFailure;
  }
}

void print_and_free(char* text) {
  if (text == nullptr) return;
  std::printf("%s\n", text);
  wmmf_string_free(text);
}

int cmd_solve(const std::string& config, const std::string& trace) {
  wmmf_result* result = nullptr;
  if (wmmf_status s = wmmf_solve_config(config.c_str(), &result); s != WMMF_OK) return report(s);
  char* summary = nullptr;
  wmmf_status s = wmmf_result_summary_json(result, &summary);
  if (s == WMMF_OK) print_and_free(summary);
  if (s == WMMF_OK && !trace.empty()) s = wmmf_result_write_trace(result, trace.c_str());
  wmmf_result_free(result);
  return s == WMMF_OK ? kExitOk : report(s);
}

int cmd_sweep(const std::string& experiment, const std::string& trace_dir) {
  char* summary = nullptr;
  const wmmf_status s = wmmf_sweep_run(experiment.c_str(),
                                       trace_dir.empty() ? nullptr : trace_dir.c_str(), &summary);
  if (s != WMMF_OK) return report(s);
  print_and_free(summary);
  return kExitOk;
}

int cmd_validate(const std::string& csv) {
  char* text = nullptr;
  int passed = 0;
  const wmmf_status s = wmmf_validate_results(csv.c_str(), &text, &passed);
  if (s != WMMF_OK) return report(s);
  std::fputs(text, stdout);
  wmmf_string_free(text);
  return passed ? kExitOk : kExitFailure;
}

int cmd_oracle(const std::string& config, int phase_steps, int angle_steps, int power_steps,
               int rounds) {
  wmmf_scenario* scenario = nullptr;
  if (wmmf_status s = wmmf_scenario_load(config.c_str(), &scenario); s != WMMF_OK)
    return report(s);
  char grid[160];
  std::snprintf(grid, sizeof grid,
                "{\"phase_steps\": %d, \"amplitude_steps\": %d, \"power_steps\": %d, "
                "\"refinement_rounds\": %d}",
                phase_steps, angle_steps, power_steps, rounds);
  char* text = nullptr;
  wmmf_status s = wmmf_oracle(scenario, grid, &text);
  if (s != WMMF_OK) {
    wmmf_scenario_free(scenario);
    return report(s);
  }
  print_and_free(text);
  const struct {
    wmmf_algorithm algorithm;
    const char* name;
  } solvers[] = {{WMMF_ALGORITHM_WMMF, "wmmf"}, {WMMF_ALGORITHM_SISO, "siso"}};
  for (const auto& solver : solvers) {
    wmmf_result* result = nullptr;
    s = wmmf_solve(scenario, solver.algorithm, nullptr, &result);
    if (s != WMMF_OK) {
      std::printf("%s: failed (%s)\n", solver.name, wmmf_last_error());
      continue;
    }
    std::printf("%s: objective %.12g\n", solver.name, wmmf_result_objective(result));
    wmmf_result_free(result);
  }
  wmmf_scenario_free(scenario);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Max-min fair multicast beamforming"};
  app.require_subcommand(1);

  std::string solve_config, solve_trace;
  auto* solve = app.add_subcommand("solve", "Solve one scenario and print a JSON summary");
  solve->add_option("config", solve_config, "Scenario config (JSON)")->required();
  solve->add_option("--trace", solve_trace, "Write the convergence trace CSV here");

  std::string experiment, sweep_traces;
  auto* sweep = app.add_subcommand("sweep", "Run an experiment sweep and write a result CSV");
  sweep->add_option("experiment", experiment, "Experiment spec (JSON)")->required();
  sweep->add_option("--trace", sweep_traces, "Directory for per-run trace CSVs");

  std::string results;
  auto* validate = app.add_subcommand("validate", "Re-check a result CSV");
  validate->add_option("results", results, "Result CSV")->required();

  std::string oracle_config;
  int phase_steps = 32, angle_steps = 16, power_steps = 32, rounds = 2;
  auto* oracle = app.add_subcommand("oracle", "Grid search on a tiny instance");
  oracle->add_option("config", oracle_config, "Scenario config (JSON)")->required();
  oracle->add_option("--phase-steps", phase_steps, "Phase grid points")->capture_default_str();
  oracle->add_option("--angle-steps", angle_steps, "Direction angle grid points")
      ->capture_default_str();
  oracle->add_option("--power-steps", power_steps, "Power split grid points")
      ->capture_default_str();
  oracle->add_option("--rounds", rounds, "Refinement rounds")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  if (*solve) return cmd_solve(solve_config, solve_trace);
  if (*sweep) return cmd_sweep(experiment, sweep_traces);
  if (*validate) return cmd_validate(results);
  return cmd_oracle(oracle_config, phase_steps, angle_steps, power_steps, rounds);
}
