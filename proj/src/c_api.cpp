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


#include "wmmf/wmmf.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "wmmf/bench.hpp"
#include "wmmf/errors.hpp"
#include "wmmf/oracle.hpp"
#include "wmmf/scenario.hpp"

struct wmmf_scenario {
  wmmf::Scenario value;
};

struct wmmf_result {
  wmmf::RunOutcome outcome;
};

namespace {

thread_local std::string last_error;

wmmf_status from_code(wmmf::Error::Code code) {
  using C = wmmf::Error::Code;
  switch (code) {
    case C::kValidation: return WMMF_ERR_VALIDATION;
    case C::kParse: return WMMF_ERR_PARSE;
    case C::kIo: return WMMF_ERR_IO;
    case C::kDomain: return WMMF_ERR_DOMAIN;
    case C::kDegenerateDual: return WMMF_ERR_DEGENERATE_DUAL;
    case C::kNumericalFailure: return WMMF_ERR_NUMERICAL;
    case C::kPrecondition: return WMMF_ERR_PRECONDITION;
    case C::kSize: return WMMF_ERR_SIZE;
  }
  return WMMF_ERR_INTERNAL;
}

wmmf_status fail(wmmf_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <typename F>
wmmf_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const wmmf::Error& e) {
    return fail(from_code(e.code()), e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(WMMF_ERR_PARSE, e.what());
  } catch (const std::bad_alloc&) {
    return fail(WMMF_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(WMMF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(WMMF_ERR_INTERNAL, "unknown exception");
  }
}

char* copy_string(const std::string& text) {
  char* out = static_cast<char*>(std::malloc(text.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

nlohmann::json parse_text(const char* text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw wmmf::ParseError(e.what());
  }
}

wmmf_status store_result(wmmf::RunOutcome outcome, wmmf_result** out) {
  if (!outcome.ok) {
    if (outcome.failure) std::rethrow_exception(outcome.failure);
    return fail(WMMF_ERR_NUMERICAL, outcome.error);
  }
  *out = new wmmf_result{std::move(outcome)};
  return WMMF_OK;
}

}  // namespace

extern "C" {

const char* wmmf_last_error(void) { return last_error.c_str(); }

const char* wmmf_status_name(wmmf_status status) {
  switch (status) {
    case WMMF_OK: return "ok";
    case WMMF_ERR_INVALID_ARGUMENT: return "invalid argument";
    case WMMF_ERR_VALIDATION: return "validation error";
    case WMMF_ERR_PARSE: return "parse error";
    case WMMF_ERR_IO: return "I/O error";
    case WMMF_ERR_DOMAIN: return "domain error";
    case WMMF_ERR_DEGENERATE_DUAL: return "degenerate dual";
    case WMMF_ERR_NUMERICAL: return "numerical failure";
    case WMMF_ERR_PRECONDITION: return "precondition violated";
    case WMMF_ERR_SIZE: return "instance too large";
    case WMMF_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* wmmf_version(void) { return "0.1.0"; }

void wmmf_string_free(char* text) { std::free(text); }

wmmf_status wmmf_scenario_load(const char* path, wmmf_scenario** out) {
  if (path == nullptr || out == nullptr) return fail(WMMF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new wmmf_scenario{wmmf::load_scenario(path)};
    return WMMF_OK;
  });
}

wmmf_status wmmf_scenario_from_json(const char* json_text, wmmf_scenario** out) {
  if (json_text == nullptr || out == nullptr)
    return fail(WMMF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = new wmmf_scenario{wmmf::scenario_from_json(parse_text(json_text))};
    return WMMF_OK;
  });
}

wmmf_status wmmf_scenario_generate(const wmmf_dimensions* dims, double p_t_db, double sigma2,
                                   uint64_t seed, wmmf_scenario** out) {
  if (dims == nullptr || out == nullptr) return fail(WMMF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  if (dims->num_groups < 1 || dims->users_per_group == nullptr ||
      dims->rx_antennas_per_user == nullptr)
    return fail(WMMF_ERR_INVALID_ARGUMENT, "dimensions need groups, users and antennas");
  return guarded([&] {
    wmmf::Dimensions d;
    d.num_tx_antennas = dims->num_tx_antennas;
    d.num_groups = dims->num_groups;
    d.users_per_group.assign(dims->users_per_group, dims->users_per_group + dims->num_groups);
    int users = 0;
    for (int g = 0; g < d.num_groups; ++g) {
      if (d.users_per_group[g] < 1)
        throw wmmf::ValidationError("group " + std::to_string(g) + " has no users");
      users += d.users_per_group[g];
    }
    d.rx_antennas_per_user.assign(dims->rx_antennas_per_user,
                                  dims->rx_antennas_per_user + users);
    if (dims->streams_per_group != nullptr)
      d.streams_per_group.assign(dims->streams_per_group,
                                 dims->streams_per_group + d.num_groups);
    else
      d.set_default_streams();
    std::vector<double> weights;
    if (dims->weights != nullptr) weights.assign(dims->weights, dims->weights + d.num_groups);
    *out = new wmmf_scenario{
        wmmf::generate_scenario(std::move(d), p_t_db, sigma2, std::move(weights), seed)};
    return WMMF_OK;
  });
}

wmmf_status wmmf_scenario_save(const wmmf_scenario* scenario, const char* path) {
  if (scenario == nullptr || path == nullptr)
    return fail(WMMF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    wmmf::save_scenario(scenario->value, path);
    return WMMF_OK;
  });
}

wmmf_status wmmf_scenario_to_json(const wmmf_scenario* scenario, char** out) {
  if (scenario == nullptr || out == nullptr)
    return fail(WMMF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    *out = copy_string(wmmf::scenario_to_json(scenario->value).dump(2));
    return WMMF_OK;
  });
}

int wmmf_scenario_num_users(const wmmf_scenario* s) {
  return s ? s->value.dims.num_users() : 0;
}
int wmmf_scenario_num_groups(const wmmf_scenario* s) { return s ? s->value.dims.num_groups : 0; }
int wmmf_scenario_num_tx_antennas(const wmmf_scenario* s) {
  return s ? s->value.dims.num_tx_antennas : 0;
}
double wmmf_scenario_power_budget(const wmmf_scenario* s) {
  return s ? s->value.power_budget : 0.0;
}
void wmmf_scenario_free(wmmf_scenario* scenario) { delete scenario; }

wmmf_status wmmf_solve(const wmmf_scenario* scenario, wmmf_algorithm algorithm,
                       const char* options_json, wmmf_result** out) {
  if (scenario == nullptr || out == nullptr)
    return fail(WMMF_ERR_INVALID_ARGUMENT, "null argument");
  if (algorithm != WMMF_ALGORITHM_WMMF && algorithm != WMMF_ALGORITHM_SISO)
    return fail(WMMF_ERR_INVALID_ARGUMENT, "unknown algorithm");
  *out = nullptr;
  return guarded([&] {
    wmmf::SolverOptions options;
    if (options_json != nullptr)
      options = wmmf::solver_options_from_json(parse_text(options_json));
    options.algorithm =
        algorithm == WMMF_ALGORITHM_WMMF ? wmmf::Algorithm::kWmmf : wmmf::Algorithm::kSiso;
    return store_result(wmmf::run_solver(scenario->value, options), out);
  });
}

wmmf_status wmmf_solve_config(const char* config_path, wmmf_result** out) {
  if (config_path == nullptr || out == nullptr)
    return fail(WMMF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const wmmf::SolveConfig config = wmmf::load_solve_config(config_path);
    return store_result(wmmf::run_solver(config.scenario, config.options), out);
  });
}

double wmmf_result_common_rate(const wmmf_result* r) { return r ? r->outcome.common_rate : 0.0; }
double wmmf_result_objective(const wmmf_result* r) { return r ? r->outcome.achieved_rate : 0.0; }
double wmmf_result_min_sinr(const wmmf_result* r) { return r ? r->outcome.min_sinr : 0.0; }
double wmmf_result_power(const wmmf_result* r) { return r ? r->outcome.power : 0.0; }
double wmmf_result_max_kkt_residual(const wmmf_result* r) {
  return r ? r->outcome.max_kkt_residual : 0.0;
}
int wmmf_result_converged(const wmmf_result* r) { return r && r->outcome.converged ? 1 : 0; }
int wmmf_result_outer_iterations(const wmmf_result* r) {
  return r ? r->outcome.outer_iterations : 0;
}
int wmmf_result_inner_iterations(const wmmf_result* r) { return r ? r->outcome.iterations : 0; }
int wmmf_result_num_groups(const wmmf_result* r) {
  return r ? static_cast<int>(r->outcome.tx.beamformers.size()) : 0;
}

wmmf_status wmmf_result_beamformer(const wmmf_result* result, int group, int* rows, int* cols,
                                   double* data, size_t capacity) {
  if (result == nullptr || rows == nullptr || cols == nullptr)
    return fail(WMMF_ERR_INVALID_ARGUMENT, "null argument");
  const auto& bf = result->outcome.tx.beamformers;
  if (group < 0 || group >= static_cast<int>(bf.size()))
    return fail(WMMF_ERR_INVALID_ARGUMENT, "group index out of range");
  const Eigen::MatrixXcd& w = bf[group];
  *rows = static_cast<int>(w.rows());
  *cols = static_cast<int>(w.cols());
  if (data == nullptr) return WMMF_OK;
  const size_t needed = 2 * static_cast<size_t>(w.size());
  if (capacity < needed) return fail(WMMF_ERR_INVALID_ARGUMENT, "buffer too small");
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    data[2 * i] = w.data()[i].real();
    data[2 * i + 1] = w.data()[i].imag();
  }
  return WMMF_OK;
}

wmmf_status wmmf_result_write_trace(const wmmf_result* result, const char* path) {
  if (result == nullptr || path == nullptr)
    return fail(WMMF_ERR_INVALID_ARGUMENT, "null argument");
  return guarded([&] {
    wmmf::write_text_file(path, result->outcome.trace.to_csv());
    return WMMF_OK;
  });
}

wmmf_status wmmf_result_summary_json(const wmmf_result* result, char** out) {
  if (result == nullptr || out == nullptr)
    return fail(WMMF_ERR_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    const wmmf::RunOutcome& o = result->outcome;
    nlohmann::json j;
    j["solver"] = wmmf::algorithm_name(o.algorithm);
    j["common_rate"] = o.common_rate;
    j["achieved_rate"] = o.achieved_rate;
    j["min_sinr"] = o.min_sinr;
    j["total_power"] = o.power;
    j["power_budget"] = o.power_budget;
    j["converged"] = o.converged;
    j["outer_iterations"] = o.outer_iterations;
    j["iterations"] = o.iterations;
    j["max_kkt_residual"] = o.max_kkt_residual;
    j["wall_time_s"] = o.wall_time_s;
    *out = copy_string(j.dump(2));
    return WMMF_OK;
  });
}

void wmmf_result_free(wmmf_result* result) { delete result; }

wmmf_status wmmf_oracle(const wmmf_scenario* scenario, const char* grid_json,
                        char** report_json) {
  if (scenario == nullptr || report_json == nullptr)
    return fail(WMMF_ERR_INVALID_ARGUMENT, "null argument");
  *report_json = nullptr;
  return guarded([&] {
    wmmf::GridSpec spec;
    if (grid_json != nullptr) {
      const nlohmann::json g = parse_text(grid_json);
      if (!g.is_object()) throw wmmf::ParseError("grid: expected an object");
      for (const auto& item : g.items()) {
        if (!item.value().is_number_integer())
          throw wmmf::ParseError("grid/" + item.key() + ": expected an integer");
        const int v = item.value().get<int>();
        if (item.key() == "phase_steps") spec.phase_steps = v;
        else if (item.key() == "amplitude_steps") spec.amplitude_steps = v;
        else if (item.key() == "power_steps") spec.power_steps = v;
        else if (item.key() == "refinement_rounds") spec.refinement_rounds = v;
        else throw wmmf::ParseError("grid/" + item.key() + ": unknown grid option");
      }
    }
    const wmmf::GridResult r = wmmf::grid_search_mmf(scenario->value, spec);
    nlohmann::json j;
    j["objective"] = r.objective;
    j["min_sinr"] = r.min_sinr;
    j["evaluations"] = r.evaluations;
    j["round_objectives"] = r.round_objectives;
    *report_json = copy_string(j.dump(2));
    return WMMF_OK;
  });
}

wmmf_status wmmf_sweep_run(const char* experiment_path, const char* trace_dir,
                           char** summary_json) {
  if (experiment_path == nullptr) return fail(WMMF_ERR_INVALID_ARGUMENT, "null argument");
  if (summary_json != nullptr) *summary_json = nullptr;
  return guarded([&] {
    const wmmf::ExperimentSpec spec = wmmf::load_experiment(experiment_path);
    std::optional<std::filesystem::path> traces;
    if (trace_dir != nullptr) traces = wmmf::resolve_output_path(trace_dir);
    const wmmf::SweepSummary s =
        wmmf::run_sweep(spec, wmmf::resolve_output_path(spec.output), traces);
    if (summary_json != nullptr) {
      nlohmann::json j;
      j["output"] = s.output.string();
      j["rows"] = s.rows;
      j["failed"] = s.failed;
      *summary_json = copy_string(j.dump(2));
    }
    return WMMF_OK;
  });
}

wmmf_status wmmf_validate_results(const char* csv_path, char** report_text, int* all_passed) {
  if (csv_path == nullptr || all_passed == nullptr)
    return fail(WMMF_ERR_INVALID_ARGUMENT, "null argument");
  if (report_text != nullptr) *report_text = nullptr;
  *all_passed = 0;
  return guarded([&] {
    const wmmf::ValidationReport report =
        wmmf::validate_results(wmmf::read_results(csv_path));
    *all_passed = report.passed() ? 1 : 0;
    if (report_text != nullptr) {
      std::ostringstream os;
      report.print(os);
      *report_text = copy_string(os.str());
    }
    return WMMF_OK;
  });
}

}  // extern "C"
