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


#include "wmmf/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "wmmf/errors.hpp"
#include "wmmf/oracle.hpp"

namespace wmmf {

using nlohmann::json;

Algorithm parse_algorithm(const std::string& name) {
  if (name == "wmmf") return Algorithm::kWmmf;
  if (name == "siso") return Algorithm::kSiso;
  throw ParseError("unknown algorithm \"" + name + "\" (expected wmmf or siso)");
}

const char* algorithm_name(Algorithm algorithm) {
  return algorithm == Algorithm::kWmmf ? "wmmf" : "siso";
}

namespace {

double number_at(const json& obj, const char* key, const std::string& path) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw ParseError(path + "/" + key + ": expected a number");
  return v.get<double>();
}

int integer_at(const json& obj, const char* key, const std::string& path) {
  const json& v = obj.at(key);
  if (!v.is_number_integer()) throw ParseError(path + "/" + key + ": expected an integer");
  return v.get<int>();
}

bool bool_at(const json& obj, const char* key, const std::string& path) {
  const json& v = obj.at(key);
  if (!v.is_boolean()) throw ParseError(path + "/" + key + ": expected true or false");
  return v.get<bool>();
}

void apply_solver_fields(const json& solver, const std::string& path, SolverOptions& out) {
  if (!solver.is_object()) throw ParseError(path + ": expected an object");
  static const char* const known[] = {"algorithm",     "step_size",        "inner_iters",
                                      "outer_iters",   "convergence_tol",  "bisection_tol",
                                      "mu_min",        "diminishing_step", "relative_step",
                                      "record_trace"};
  for (const auto& item : solver.items()) {
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return item.key() == k; }) == std::end(known))
      throw ParseError(path + "/" + item.key() + ": unknown solver option");
  }
  if (solver.contains("algorithm")) {
    if (!solver["algorithm"].is_string())
      throw ParseError(path + "/algorithm: expected a string");
    out.algorithm = parse_algorithm(solver["algorithm"].get<std::string>());
  }
  if (solver.contains("step_size"))
    out.wmmf.step_size = out.siso.step_size = number_at(solver, "step_size", path);
  if (solver.contains("inner_iters"))
    out.wmmf.inner_iters = out.siso.inner_iters = integer_at(solver, "inner_iters", path);
  if (solver.contains("outer_iters"))
    out.wmmf.outer_iters = out.siso.outer_iters = integer_at(solver, "outer_iters", path);
  if (solver.contains("convergence_tol"))
    out.wmmf.convergence_tol = out.siso.convergence_tol =
        number_at(solver, "convergence_tol", path);
  if (solver.contains("bisection_tol"))
    out.wmmf.bisection_tol = out.siso.bisection_tol = number_at(solver, "bisection_tol", path);
  if (solver.contains("mu_min"))
    out.wmmf.mu_min = out.siso.mu_min = number_at(solver, "mu_min", path);
  if (solver.contains("diminishing_step"))
    out.wmmf.diminishing_step = bool_at(solver, "diminishing_step", path);
  if (solver.contains("relative_step"))
    out.siso.relative_step = bool_at(solver, "relative_step", path);
  if (solver.contains("record_trace"))
    out.wmmf.record_trace = out.siso.record_trace = bool_at(solver, "record_trace", path);
}

void validate_options(const SolverOptions& options) {
  options.wmmf.validate();
  options.siso.validate();
}

}  // namespace

SolverOptions solver_options_from_json(const json& solver) {
  SolverOptions out;
  apply_solver_fields(solver, "/solver", out);
  validate_options(out);
  return out;
}

SolveConfig solve_config_from_json(const json& config) {
  SolveConfig out{scenario_from_json(config), {}};
  if (config.contains("solver")) out.options = solver_options_from_json(config["solver"]);
  return out;
}

SolveConfig load_solve_config(const std::filesystem::path& path) {
  return solve_config_from_json(read_json_file(path));
}

double max_kkt_residual(const Scenario& scenario, const WmmfResult& result) {
  const KktPoint point{result.tx, result.design_receivers, result.tx_lambda, result.duals};
  const KktReport report = kkt_residuals(scenario, point);
  return std::max(report.max_identity(), report.power_slackness);
}

RunOutcome run_solver(const Scenario& scenario, const SolverOptions& options) {
  validate_options(options);
  RunOutcome out;
  out.algorithm = options.algorithm;
  out.power_budget = scenario.power_budget;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (options.algorithm == Algorithm::kWmmf) {
      WmmfResult r = solve(scenario, options.wmmf);
      out.common_rate = r.common_rate;
      out.achieved_rate = r.objective;
      out.min_sinr = std::numeric_limits<double>::infinity();
      for (const auto& s : r.rx.sinr) out.min_sinr = std::min(out.min_sinr, s.minCoeff());
      out.power = r.power;
      out.outer_iterations = r.outer_iterations;
      out.iterations = r.inner_iterations;
      out.converged = r.converged;
      out.max_kkt_residual = max_kkt_residual(scenario, r);
      out.tx = std::move(r.tx);
      out.trace = std::move(r.trace);
    } else {
      SisoResult r = siso_solve(scenario, options.siso);
      StreamValues sinr;
      for (Eigen::Index k = 0; k < r.sinr.size(); ++k)
        sinr.push_back(Eigen::VectorXd::Constant(1, r.sinr(k)));
      out.common_rate = std::log2(1.0 + r.duals.gamma_common);
      out.achieved_rate = achieved_objective(scenario, sinr);
      out.min_sinr = r.min_sinr;
      out.power = r.power;
      out.outer_iterations = r.outer_iterations;
      out.iterations = r.inner_iterations;
      out.converged = r.converged;
      const double slack =
          r.duals.mu * std::abs(r.power - scenario.power_budget) / scenario.power_budget;
      out.max_kkt_residual = std::max(r.stationarity, slack);
      out.tx = std::move(r.tx);
      out.trace = std::move(r.trace);
    }
    out.ok = true;
  } catch (const SolveFailure& e) {
    out.error = e.what();
    out.failure = std::current_exception();
    out.trace = e.trace();
  } catch (const NumericalFailure& e) {
    out.error = e.what();
    out.failure = std::current_exception();
  } catch (const DegenerateDualError& e) {
    out.error = e.what();
    out.failure = std::current_exception();
  } catch (const PreconditionError& e) {
    out.error = e.what();
    out.failure = std::current_exception();
  }
  out.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

void ExperimentSpec::validate() const {
  if (sweep_parameter != "n_tx" && sweep_parameter != "n_rx" && sweep_parameter != "p_t_db")
    throw ValidationError("sweep parameter must be n_tx, n_rx or p_t_db, got \"" +
                          sweep_parameter + "\"");
  if (sweep_values.empty()) throw ValidationError("sweep needs at least one value");
  for (double v : sweep_values) {
    if (!std::isfinite(v)) throw ValidationError("sweep values must be finite");
    if (sweep_parameter != "p_t_db" && (v < 1.0 || v != std::floor(v)))
      throw ValidationError(sweep_parameter + " values must be positive integers");
  }
  if (seeds.empty()) throw ValidationError("experiment needs at least one seed");
  if (!scenario.is_object()) throw ValidationError("scenario template must be an object");
  if (scenario.contains("channels"))
    throw ValidationError("scenario template must not carry channels; they come from the seeds");
  if (output.empty()) throw ValidationError("output path is empty");
  validate_options(options);
}

ExperimentSpec experiment_from_json(const json& spec) {
  if (!spec.is_object()) throw ParseError("/: expected an object");
  static const char* const known[] = {"scenario", "sweep", "seeds", "solver",
                                      "wmmf",     "siso",  "output"};
  for (const auto& item : spec.items()) {
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return item.key() == k; }) == std::end(known))
      throw ParseError("/" + item.key() + ": unknown experiment field");
  }
  ExperimentSpec out;
  if (!spec.contains("scenario")) throw ParseError("/scenario: missing required field");
  out.scenario = spec["scenario"];
  if (!spec.contains("sweep")) throw ParseError("/sweep: missing required field");
  const json& sweep = spec["sweep"];
  if (!sweep.is_object() || !sweep.contains("parameter") || !sweep["parameter"].is_string())
    throw ParseError("/sweep: expected {\"parameter\": name, \"values\": [...]}");
  out.sweep_parameter = sweep["parameter"].get<std::string>();
  if (!sweep.contains("values") || !sweep["values"].is_array())
    throw ParseError("/sweep/values: expected an array");
  for (std::size_t i = 0; i < sweep["values"].size(); ++i) {
    if (!sweep["values"][i].is_number())
      throw ParseError("/sweep/values/" + std::to_string(i) + ": expected a number");
    out.sweep_values.push_back(sweep["values"][i].get<double>());
  }
  if (!spec.contains("seeds") || !spec["seeds"].is_array())
    throw ParseError("/seeds: expected an array");
  for (std::size_t i = 0; i < spec["seeds"].size(); ++i) {
    const json& s = spec["seeds"][i];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw ParseError("/seeds/" + std::to_string(i) + ": expected a non-negative integer");
    out.seeds.push_back(s.get<std::uint64_t>());
  }
  if (spec.contains("solver")) {
    if (!spec["solver"].is_string()) throw ParseError("/solver: expected a string");
    const std::string s = spec["solver"].get<std::string>();
    if (s == "wmmf") out.solver = SolverSelection::kWmmf;
    else if (s == "siso") out.solver = SolverSelection::kSiso;
    else if (s == "both") out.solver = SolverSelection::kBoth;
    else throw ParseError("/solver: expected wmmf, siso or both");
  }
  if (spec.contains("wmmf")) {
    SolverOptions tmp;
    apply_solver_fields(spec["wmmf"], "/wmmf", tmp);
    out.options.wmmf = tmp.wmmf;
  }
  if (spec.contains("siso")) {
    SolverOptions tmp;
    apply_solver_fields(spec["siso"], "/siso", tmp);
    out.options.siso = tmp.siso;
  }
  if (spec.contains("output")) {
    if (!spec["output"].is_string()) throw ParseError("/output: expected a string");
    out.output = spec["output"].get<std::string>();
  }
  out.validate();
  return out;
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
  return experiment_from_json(read_json_file(path));
}

Scenario sweep_scenario(const ExperimentSpec& spec, double value, std::uint64_t seed) {
  json config = spec.scenario;
  if (spec.sweep_parameter == "n_tx") {
    config["n_tx"] = static_cast<int>(value);
  } else if (spec.sweep_parameter == "n_rx") {
    if (!config.contains("groups") || !config["groups"].is_array())
      throw ParseError("/scenario/groups: expected an array");
    for (auto& group : config["groups"]) {
      if (!group.is_object() || !group.contains("users") || !group["users"].is_array())
        throw ParseError("/scenario/groups: each group needs a users array");
      for (auto& user : group["users"]) {
        if (!user.is_object()) throw ParseError("/scenario/groups: users must be objects");
        user["n_rx"] = static_cast<int>(value);
      }
    }
    config.erase("streams_per_group");
  } else {
    config["p_t_db"] = value;
    config.erase("power_budget");
  }
  config["seed"] = seed;
  return scenario_from_json(config);
}

std::filesystem::path resolve_output_path(const std::string& output) {
  std::filesystem::path p(output);
  if (p.is_absolute()) return p;
  if (const char* dir = std::getenv("WMMF_OUTPUT_DIR"); dir != nullptr && *dir != '\0')
    return std::filesystem::path(dir) / p;
  return p;
}

std::string format_real(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

namespace {

std::string sanitize(std::string text) {
  for (char& c : text)
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ';';
  return text;
}

std::vector<SolverSelection> expand(SolverSelection s) {
  if (s == SolverSelection::kBoth) return {SolverSelection::kWmmf, SolverSelection::kSiso};
  return {s};
}

}  // namespace

std::string csv_header() {
  std::string out;
  for (int i = 0; i < kNumResultColumns; ++i) {
    if (i > 0) out += ',';
    out += kResultColumns[i];
  }
  return out;
}

std::string csv_row(const ResultRow& r) {
  std::ostringstream os;
  os << r.sweep_param << ',' << format_real(r.sweep_value) << ',' << r.seed << ',' << r.solver
     << ',' << r.status << ',' << (r.converged ? 1 : 0) << ',' << format_real(r.common_rate)
     << ',' << format_real(r.achieved_rate) << ',' << format_real(r.total_power) << ','
     << format_real(r.power_budget) << ',' << r.outer_iterations << ',' << r.iterations << ','
     << format_real(r.max_kkt_residual) << ',' << sanitize(r.error) << ','
     << format_real(r.wall_time_s);
  return os.str();
}

SweepSummary run_sweep(const ExperimentSpec& spec, const std::filesystem::path& output,
                       const std::optional<std::filesystem::path>& trace_dir) {
  spec.validate();
  std::vector<std::vector<Scenario>> scenarios;
  for (double value : spec.sweep_values) {
    std::vector<Scenario> row;
    for (std::uint64_t seed : spec.seeds) row.push_back(sweep_scenario(spec, value, seed));
    scenarios.push_back(std::move(row));
  }

  std::error_code ec;
  if (output.has_parent_path()) std::filesystem::create_directories(output.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + output.parent_path().string());
  if (trace_dir) {
    std::filesystem::create_directories(*trace_dir, ec);
    if (ec) throw IoError("cannot create trace directory " + trace_dir->string());
  }
  std::ofstream out(output, std::ios::out | std::ios::trunc);
  if (!out) throw IoError("cannot open " + output.string() + " for writing");
  out << csv_header() << '\n' << std::flush;

  SweepSummary summary{output, 0, 0};
  for (std::size_t i = 0; i < spec.sweep_values.size(); ++i) {
    for (std::size_t j = 0; j < spec.seeds.size(); ++j) {
      for (SolverSelection sel : expand(spec.solver)) {
        SolverOptions options = spec.options;
        options.algorithm = sel == SolverSelection::kWmmf ? Algorithm::kWmmf : Algorithm::kSiso;
        const RunOutcome o = run_solver(scenarios[i][j], options);
        ResultRow row;
        row.sweep_param = spec.sweep_parameter;
        row.sweep_value = spec.sweep_values[i];
        row.seed = spec.seeds[j];
        row.solver = algorithm_name(options.algorithm);
        row.status = o.ok ? "ok" : "failed";
        row.converged = o.converged;
        row.common_rate = o.common_rate;
        row.achieved_rate = o.achieved_rate;
        row.total_power = o.power;
        row.power_budget = o.power_budget;
        row.outer_iterations = o.outer_iterations;
        row.iterations = o.iterations;
        row.max_kkt_residual = o.max_kkt_residual;
        row.error = o.error;
        row.wall_time_s = o.wall_time_s;
        out << csv_row(row) << '\n' << std::flush;
        if (!out) throw IoError("write to " + output.string() + " failed");
        ++summary.rows;
        if (!o.ok) ++summary.failed;
        if (trace_dir) {
          const std::string name = "trace_" + spec.sweep_parameter + "_" +
                                   format_real(spec.sweep_values[i]) + "_" +
                                   std::to_string(spec.seeds[j]) + "_" + row.solver + ".csv";
          write_text_file(*trace_dir / name, o.trace.to_csv());
        }
      }
    }
  }
  return summary;
}

namespace {

[[noreturn]] void row_error(int line, const std::string& what) {
  throw ParseError("line " + std::to_string(line) + ": " + what);
}

double parse_real(const std::string& field, int line, const char* column) {
  if (field.empty()) row_error(line, std::string(column) + " is empty");
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end != field.c_str() + field.size())
    row_error(line, std::string(column) + " is not a number: \"" + field + "\"");
  return v;
}

template <typename Int>
Int parse_int(const std::string& field, int line, const char* column) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size())
    row_error(line, std::string(column) + " is not an integer: \"" + field + "\"");
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

std::vector<ResultRow> parse_results(const std::string& text) {
  std::vector<std::string> lines;
  {
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      lines.push_back(line);
    }
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) row_error(1, "empty file");
  if (lines[0] != csv_header()) row_error(1, "unexpected header");

  std::vector<ResultRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const int line = static_cast<int>(i) + 1;
    if (lines[i].empty()) row_error(line, "empty row");
    const auto f = split(lines[i]);
    if (static_cast<int>(f.size()) != kNumResultColumns)
      row_error(line, "expected " + std::to_string(kNumResultColumns) + " fields, found " +
                          std::to_string(f.size()));
    ResultRow r;
    r.sweep_param = f[0];
    r.sweep_value = parse_real(f[1], line, "sweep_value");
    r.seed = parse_int<std::uint64_t>(f[2], line, "seed");
    r.solver = f[3];
    if (r.solver != "wmmf" && r.solver != "siso") row_error(line, "unknown solver " + r.solver);
    r.status = f[4];
    if (r.status != "ok" && r.status != "failed") row_error(line, "unknown status " + r.status);
    const int converged = parse_int<int>(f[5], line, "converged");
    if (converged != 0 && converged != 1) row_error(line, "converged must be 0 or 1");
    r.converged = converged == 1;
    r.common_rate = parse_real(f[6], line, "r_c");
    r.achieved_rate = parse_real(f[7], line, "achieved_rate");
    r.total_power = parse_real(f[8], line, "total_power");
    r.power_budget = parse_real(f[9], line, "power_budget");
    r.outer_iterations = parse_int<int>(f[10], line, "outer_iterations");
    r.iterations = parse_int<int>(f[11], line, "iterations");
    r.max_kkt_residual = parse_real(f[12], line, "max_kkt_residual");
    r.error = f[13];
    r.wall_time_s = parse_real(f[14], line, "wall_time_s");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ResultRow> read_results(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read from " + path.string() + " failed");
  return parse_results(ss.str());
}

bool ValidationReport::passed() const { return failures() == 0; }

int ValidationReport::failures() const {
  return static_cast<int>(
      std::count_if(checks.begin(), checks.end(), [](const RowCheck& c) { return !c.passed; }));
}

void ValidationReport::print(std::ostream& out) const {
  out << std::left << std::setw(6) << "line" << std::setw(18) << "check" << std::setw(6)
      << "result" << "detail\n";
  for (const auto& c : checks) {
    out << std::left << std::setw(6) << c.line << std::setw(18) << c.name << std::setw(6)
        << (c.passed ? "pass" : "FAIL") << c.detail << '\n';
  }
  out << rows << " rows, " << failed_solves << " failed solves, " << checks.size()
      << " checks, " << failures() << " failed\n";
}

ValidationReport validate_results(const std::vector<ResultRow>& rows,
                                  const ValidationLimits& limits) {
  ValidationReport report;
  report.rows = static_cast<int>(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ResultRow& r = rows[i];
    const int line = static_cast<int>(i) + 2;
    auto add = [&](const char* name, bool passed, std::string detail) {
      report.checks.push_back({line, name, passed, std::move(detail)});
    };
    if (r.status == "failed") {
      ++report.failed_solves;
      add("failure_recorded", !r.error.empty(), r.error.empty() ? "no error detail" : r.error);
      continue;
    }
    const bool finite = std::isfinite(r.sweep_value) && std::isfinite(r.common_rate) &&
                        std::isfinite(r.achieved_rate) && std::isfinite(r.total_power) &&
                        std::isfinite(r.power_budget) && std::isfinite(r.max_kkt_residual);
    add("finite", finite, finite ? "" : "non-finite value");
    const bool budget_ok = r.power_budget > 0.0;
    const double excess = budget_ok ? (r.total_power - r.power_budget) / r.power_budget : 0.0;
    const bool power_ok = budget_ok && r.total_power >= 0.0 && excess <= limits.power_tolerance;
    add("power_feasible", power_ok,
        "P=" + format_real(r.total_power) + " P_T=" + format_real(r.power_budget));
    const bool kkt_ok = r.max_kkt_residual >= 0.0 && r.max_kkt_residual <= limits.kkt_ceiling;
    add("kkt_ceiling", kkt_ok, "residual=" + format_real(r.max_kkt_residual));
    const bool rate_ok = r.achieved_rate >= 0.0;
    add("rate_nonnegative", rate_ok, "achieved=" + format_real(r.achieved_rate));
    const bool iters_ok = r.outer_iterations >= 1 && r.iterations >= r.outer_iterations;
    add("iterations", iters_ok,
        std::to_string(r.outer_iterations) + "/" + std::to_string(r.iterations));
  }
  return report;
}

}  // namespace wmmf
