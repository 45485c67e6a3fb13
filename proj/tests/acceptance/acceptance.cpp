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

#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wmmf/bench.hpp"
#include "wmmf/kernels.hpp"
#include "wmmf/oracle.hpp"
#include "wmmf/scenario.hpp"
#include "wmmf/siso_solver.hpp"
#include "wmmf/wmmf_solver.hpp"

namespace {

using namespace wmmf;
namespace fs = std::filesystem;

struct Verdict {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // <= 0: no runtime bound
  std::function<Verdict()> run;
};

std::string fmt(const char* format, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, a);
  return buf;
}

// Uniform in [0, 1) from 53 high bits.
double uniform(std::mt19937_64& g) { return double(g() >> 11) * 0x1.0p-53; }
int uniform_int(std::mt19937_64& g, int lo, int hi) {
  return lo + int(g() % std::uint64_t(hi - lo + 1));
}

Scenario make_scenario(int n_tx, int groups, int users_per_group, int n_rx, double p_t_db,
                       std::uint64_t seed) {
  Dimensions d;
  d.num_tx_antennas = n_tx;
  d.num_groups = groups;
  d.users_per_group.assign(groups, users_per_group);
  d.rx_antennas_per_user.assign(groups * users_per_group, n_rx);
  d.set_default_streams();
  return generate_scenario(d, p_t_db, 1.0, {}, seed);
}

Verdict mmse_identity() {
  std::mt19937_64 g(0x4d4d5345);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    Dimensions d;
    d.num_tx_antennas = uniform_int(g, 1, 16);
    const int users = uniform_int(g, 1, 8);
    d.num_groups = uniform_int(g, 1, users);
    d.users_per_group.assign(d.num_groups, 1);
    for (int k = d.num_groups; k < users; ++k)
      ++d.users_per_group[uniform_int(g, 0, d.num_groups - 1)];
    for (int k = 0; k < users; ++k) d.rx_antennas_per_user.push_back(uniform_int(g, 1, 3));
    d.set_default_streams();
    const Scenario s = generate_scenario(d, 20.0 * uniform(g), 1.0, {}, 1000 + i);
    const TransmitState tx = random_transmit_state(s);
    const ReceiveState rx = mmse_receivers(s, tx);
    const StreamValues gamma = sinr(s, tx, rx.receivers);
    const StreamValues eps = mse(s, tx, rx.receivers);
    for (std::size_t k = 0; k < eps.size(); ++k)
      worst = std::max(worst, (gamma[k].array() - (1.0 / eps[k].array() - 1.0)).abs().maxCoeff());
  }
  return {worst < 1e-9, "200 instances, max |sinr - (1/mse - 1)| = " + fmt("%.3e", worst)};
}

Verdict taylor_majorization() {
  std::mt19937_64 g(0x5441594c);
  int above = 0, below = 0, total = 0;
  double worst_touch = 0.0, worst_gap = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double eps = 1.0 - uniform(g);  // (0, 1]
    const TaylorPoint p = taylor_point(eps);
    worst_touch = std::max(worst_touch, std::abs(p(p.t_bar) - std::exp2(-p.t_bar)));
    for (int j = 0; j < 1000; ++j) {
      const double t = p.t_bar - 10.0 + 20.0 * j / 999.0;
      const double gap = p(t) - std::exp2(-t);
      ++total;
      if (gap >= 0.0) ++above;
      if (gap <= 1e-12) ++below;
      worst_gap = std::min(worst_gap, gap);
    }
  }
  const bool passed = above == total && worst_touch < 1e-12;
  std::string detail = "tangent >= 2^-t at " + std::to_string(above) + "/" + std::to_string(total) +
                       " grid points (most negative gap " + fmt("%.3e", worst_gap) +
                       "); tangent <= 2^-t at " + std::to_string(below) + "/" +
                       std::to_string(total) + "; |tangent - 2^-t| at the expansion point " +
                       fmt("%.1e", worst_touch);
  return {passed, detail};
}

StreamValues random_values(const Dimensions& d, std::mt19937_64& g, double lo, double hi) {
  StreamValues v = make_stream_values(d, 0.0);
  for (auto& vk : v)
    for (Eigen::Index l = 0; l < vk.size(); ++l) vk(l) = lo + (hi - lo) * uniform(g);
  return v;
}

Verdict lagrangian_gradient() {
  std::mt19937_64 g(0x4c41474e);
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  double worst_at_1e5 = 0.0, worst_excess = 0.0, ratio_lo = 1e300, ratio_hi = 0.0;
  bool floor_ok = true;
  for (int i = 0; i < 20; ++i) {
    const Scenario s =
        make_scenario(uniform_int(g, 2, 6), uniform_int(g, 1, 3), uniform_int(g, 1, 3),
                      uniform_int(g, 1, 3), 20.0 * uniform(g), 500 + i);
    const TransmitState tx = random_transmit_state(s);
    const ReceiveState rx = mmse_receivers(s, tx);
    const StreamValues v = random_values(s.dims, g, 0.05, 1.0);
    LagrangianPoint p;
    p.mse = rx.mse;
    p.stream_rates = solver_stream_rates(s, p.mse, v);
    p.common_rate = common_rate(s, p.mse, v);
    p.lambda = random_values(s.dims, g, 0.1, 2.0);
    p.mu = uniform(g);
    p.power = total_power(tx);
    const double scale = std::max(1.0, std::abs(lagrangian(s, p, v)));
    for (double h : {1e-3, 1e-4, 1e-5}) {
      const double err = lagrangian_gradient_error(s, p, v, h);
      if (h == 1e-5) worst_at_1e5 = std::max(worst_at_1e5, err);
      // Truncation error of order h^2 on top of the round-off of a central difference.
      const double bound = h * h + 64.0 * kEps * scale / h;
      worst_excess = std::max(worst_excess, err / bound);
      if (err > bound) floor_ok = false;
    }
    // The same checker on a field with non-zero third derivatives.
    const auto curved = [](const StreamValues& x) {
      double sum = 0.0;
      for (const auto& xk : x) sum += xk.array().exp().sum();
      return sum;
    };
    StreamValues grad = v;
    for (auto& gk : grad) gk = gk.array().exp().matrix();
    const double ratio =
        finite_diff_check(curved, v, grad, 1e-3) / finite_diff_check(curved, v, grad, 1e-4);
    ratio_lo = std::min(ratio_lo, ratio);
    ratio_hi = std::max(ratio_hi, ratio);
  }
  const bool decay = floor_ok && ratio_lo > 90.0 && ratio_hi < 110.0;
  const bool passed = worst_at_1e5 < 1e-6 && decay;
  return {passed, "20 points, max error at h=1e-5 " + fmt("%.3e", worst_at_1e5) +
                      ", max err/(h^2 + roundoff) " + fmt("%.3f", worst_excess) +
                      ", error ratio h=1e-3 vs 1e-4 on a curved field in [" +
                      fmt("%.1f", ratio_lo) + ", " + fmt("%.1f", ratio_hi) + "]"};
}

Verdict kkt_at_convergence() {
  SolverConfig config;
  config.outer_iters = 100;
  config.record_trace = false;
  int converged = 0, residual_ok = 0, power_ok = 0;
  double worst_identity = 0.0, worst_power = 0.0;
  std::string unconverged;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Scenario s = make_scenario(8, 3, 2, 2, 10.0, seed);
    const WmmfResult w = solve(s, config);
    const KktReport r = kkt_residuals(s, {w.tx, w.design_receivers, w.tx_lambda, w.duals});
    worst_identity = std::max(worst_identity, r.max_identity());
    worst_power = std::max(worst_power, r.power);
    if (w.converged)
      ++converged;
    else if (unconverged.size() < 60)
      unconverged += " " + std::to_string(seed);
    if (r.max_identity() < 1e-6) ++residual_ok;
    if (r.power < 1e-6) ++power_ok;
  }
  const bool passed = converged == 50 && residual_ok == 50 && power_ok == 50;
  std::string detail = std::to_string(converged) + "/50 converged within 100 outer iterations; " +
                       "residuals < 1e-6 on " + std::to_string(residual_ok) + "/50 (worst " +
                       fmt("%.2e", worst_identity) + "); power within 1e-6 on " +
                       std::to_string(power_ok) + "/50 (worst " + fmt("%.2e", worst_power) + ")";
  if (!unconverged.empty()) detail += "; first unconverged seeds:" + unconverged;
  return {passed, detail};
}

double objective(const Scenario& s, Algorithm algorithm) {
  SolverOptions options;
  options.algorithm = algorithm;
  options.wmmf.record_trace = false;
  options.siso.record_trace = false;
  const RunOutcome r = run_solver(s, options);
  if (!r.ok) throw std::runtime_error(r.error);
  return r.achieved_rate;
}

Verdict oracle_equivalence() {
  double worst_wmmf = 0.0, worst_siso = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Scenario s = make_scenario(2, 2, 1, 1, 10.0, seed);
    const double grid = grid_search_mmf(s).objective;
    const double w = objective(s, Algorithm::kWmmf);
    const double q = objective(s, Algorithm::kSiso);
    worst_wmmf = std::max(worst_wmmf, std::abs(w - grid) / grid);
    worst_siso = std::max(worst_siso, std::abs(q - grid) / grid);
  }
  return {worst_wmmf <= 0.02 && worst_siso <= 0.02,
          "20 instances, worst relative gap to grid search: wmmf " +
              fmt("%.3f%%", 100 * worst_wmmf) + ", siso " + fmt("%.3f%%", 100 * worst_siso)};
}

Verdict cross_solver() {
  double worst = 0.0;
  std::uint64_t worst_seed = 0;
  int failing = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Scenario s = make_scenario(8, 3, 2, 1, 10.0, seed);
    const double w = objective(s, Algorithm::kWmmf);
    const double q = objective(s, Algorithm::kSiso);
    const double gap = std::abs(w - q) / std::max(w, q);
    if (gap > 0.03) ++failing;
    if (gap > worst) {
      worst = gap;
      worst_seed = seed;
    }
  }
  return {failing == 0, "20 scenarios, " + std::to_string(failing) + " outside 3%, worst " +
                            fmt("%.2f%%", 100 * worst) + " (seed " + std::to_string(worst_seed) +
                            ")"};
}

double mean_common_rate(int n_tx, int n_rx, double p_t_db) {
  SolverOptions options;
  options.wmmf.record_trace = false;
  double sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed)
    sum += run_solver(make_scenario(n_tx, 3, 2, n_rx, p_t_db, seed), options).common_rate;
  return sum / 10.0;
}

struct Trend {
  std::string axis;
  std::vector<double> x, mean;
};

Verdict trends() {
  std::vector<Trend> sweeps;
  sweeps.push_back({"P_T dB", {0, 5, 10, 15, 20}, {}});
  for (double p : sweeps.back().x) sweeps.back().mean.push_back(mean_common_rate(8, 2, p));
  sweeps.push_back({"N_T", {6, 8, 10, 12}, {}});
  for (double n : sweeps.back().x) sweeps.back().mean.push_back(mean_common_rate(int(n), 2, 10.0));
  sweeps.push_back({"N_R", {1, 2, 3, 4}, {}});
  for (double n : sweeps.back().x) sweeps.back().mean.push_back(mean_common_rate(12, int(n), 10.0));
  bool passed = true;
  std::string detail;
  for (const Trend& t : sweeps) {
    detail += (detail.empty() ? "" : "; ") + t.axis + ":";
    for (std::size_t i = 0; i < t.mean.size(); ++i) {
      detail += " " + fmt("%.3f", t.mean[i]);
      if (i > 0 && t.mean[i] < t.mean[i - 1] - 1e-3) {
        passed = false;
        detail += "(drop)";
      }
    }
  }
  return {passed, "mean r_c over 10 seeds; " + detail};
}

std::string strip_last_column(const fs::path& path) {
  std::ifstream in(path);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

Verdict determinism() {
  const fs::path dir =
      fs::temp_directory_path() / ("wmmf_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path spec = dir / "experiment.json";
  std::ofstream(spec) << R"({
  "scenario": {"n_tx": 6, "sigma2": 1.0, "p_t_db": 10,
               "groups": [{"users": [{"n_rx": 1}, {"n_rx": 1}]},
                          {"users": [{"n_rx": 1}, {"n_rx": 1}]}]},
  "sweep": {"parameter": "p_t_db", "values": [0, 10, 20]},
  "seeds": [1, 2, 3],
  "solver": "both",
  "output": "run.csv"
})";
  std::string a, b;
  for (std::string* target : {&a, &b}) {
    const std::string cmd = "WMMF_OUTPUT_DIR=\"" + dir.string() +
                            "\" \"" WMMF_CLI_PATH "\" sweep \"" + spec.string() + "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) {
      fs::remove_all(dir);
      return {false, "sweep command failed"};
    }
    *target = strip_last_column(dir / "run.csv");
    fs::remove(dir / "run.csv");
  }
  fs::remove_all(dir);
  const long rows = std::count(a.begin(), a.end(), '\n') - 1;
  return {a == b && rows == 18, "two sweep runs, " + std::to_string(rows) + " rows each, " +
                                    (a == b ? "identical" : "different") +
                                    " apart from wall_time_s"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "MMSE identity", 30, mmse_identity},
      {2, "Taylor majorization", 5, taylor_majorization},
      {3, "Lagrangian gradient", 10, lagrangian_gradient},
      {4, "KKT residuals at convergence", 300, kkt_at_convergence},
      {5, "oracle equivalence", 600, oracle_equivalence},
      {6, "cross-solver consistency", 0, cross_solver},
      {7, "qualitative trends", 900, trends},
      {8, "sweep determinism", 0, determinism},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  bool all = true;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_s <= 0 || secs < c.budget_s;
    const bool ok = v.passed && in_time;
    all = all && ok;
    std::string timing = fmt("%.1fs", secs);
    if (c.budget_s > 0) timing += fmt(" of %.0fs", c.budget_s);
    std::printf("criterion %d %-30s %s [%s] %s\n", c.id, c.name, ok ? "PASS" : "FAIL",
                timing.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
