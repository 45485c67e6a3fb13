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

#include "wmmf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "wmmf/errors.hpp"

namespace wmmf {

namespace {

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * i / (n - 1);
  return out;
}

double spacing(const std::vector<double>& axis) {
  return axis.size() > 1 ? axis[1] - axis[0] : 0.0;
}

// One refinement window: [x - step, x + step] clipped to [lo, hi].
std::vector<double> window(double x, double step, double lo, double hi, int n) {
  return linspace(std::max(lo, x - step), std::min(hi, x + step), n);
}

struct Axes {
  std::vector<std::vector<double>> amplitude;  // per group, angle in [0, pi/2]
  std::vector<std::vector<double>> phase;      // per group; {0} when N_T = 1
  std::vector<std::vector<double>> power;      // per free power coordinate
};

struct Incumbent {
  std::vector<double> amplitude;
  std::vector<double> phase;
  std::vector<double> power_share;  // G entries summing to 1
  double objective = -std::numeric_limits<double>::infinity();
};

// Unit vector [cos(angle), sin(angle) e^{j phase}].
Eigen::VectorXcd direction(int n_tx, double angle, double phase) {
  Eigen::VectorXcd d(n_tx);
  if (n_tx == 1) {
    d(0) = 1.0;
  } else {
    d(0) = std::cos(angle);
    d(1) = std::sin(angle) * std::polar(1.0, phase);
  }
  return d;
}

constexpr double kQuarterTurn = 0.5 * std::numbers::pi;

std::vector<std::vector<double>> power_tuples(const Axes& axes, int groups) {
  std::vector<std::vector<double>> tuples;
  if (groups == 1) return {{1.0}};
  std::vector<std::size_t> idx(groups - 1, 0);
  while (true) {
    std::vector<double> share(groups);
    double used = 0.0;
    for (int j = 0; j < groups - 1; ++j) {
      share[j] = axes.power[j][idx[j]];
      used += share[j];
    }
    if (used <= 1.0 + 1e-12) {
      share[groups - 1] = std::max(0.0, 1.0 - used);
      tuples.push_back(std::move(share));
    }
    int pos = groups - 2;
    while (pos >= 0 && ++idx[pos] == axes.power[pos].size()) idx[pos--] = 0;
    if (pos < 0) break;
  }
  return tuples;
}

// Saturates at UINT64_MAX.
std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  return (a != 0 && b > kMax / a) ? kMax : a * b;
}

std::uint64_t axes_size(const Axes& axes, std::uint64_t power_count) {
  std::uint64_t total = power_count;
  for (std::size_t g = 0; g < axes.amplitude.size(); ++g) {
    total = saturating_mul(total, axes.amplitude[g].size());
    total = saturating_mul(total, axes.phase[g].size());
  }
  return total;
}

void check_tiny(const Scenario& scenario) {
  const auto& dims = scenario.dims;
  if (dims.num_tx_antennas > 2) throw SizeError("grid search needs N_T <= 2");
  if (dims.num_users() > 3) throw SizeError("grid search needs at most 3 users");
  for (int n : dims.rx_antennas_per_user)
    if (n != 1) throw SizeError("grid search needs single-antenna users");
  for (int l : dims.streams_per_group)
    if (l != 1) throw SizeError("grid search needs one stream per group");
}

Axes initial_axes(const Scenario& scenario, const GridSpec& spec) {
  const int groups = scenario.dims.num_groups;
  const bool two = scenario.dims.num_tx_antennas == 2;
  Axes axes;
  for (int g = 0; g < groups; ++g) {
    axes.amplitude.push_back(two ? linspace(0.0, kQuarterTurn, spec.amplitude_steps)
                                 : std::vector<double>{0.0});
    std::vector<double> phase(two ? spec.phase_steps : 1, 0.0);
    for (std::size_t i = 0; i < phase.size(); ++i)
      phase[i] = 2.0 * std::numbers::pi * double(i) / double(phase.size());
    axes.phase.push_back(std::move(phase));
  }
  for (int j = 0; j + 1 < groups; ++j) axes.power.push_back(linspace(0.0, 1.0, spec.power_steps));
  return axes;
}

std::uint64_t power_count_bound(const Axes& axes) {
  std::uint64_t n = 1;
  for (const auto& p : axes.power) n = saturating_mul(n, p.size());
  return n;
}

// Searches one grid, updating the incumbent on strict improvement.
std::uint64_t search(const Scenario& scenario, const Axes& axes, Incumbent& best) {
  const auto& dims = scenario.dims;
  const int groups = dims.num_groups;
  const int users = dims.num_users();
  const int n_tx = dims.num_tx_antennas;

  struct Direction {
    double amplitude;
    double phase;
    Eigen::VectorXd gain;  // |H_k d|^2 for every user
  };
  std::vector<std::vector<Direction>> dirs(groups);
  for (int g = 0; g < groups; ++g) {
    for (double a : axes.amplitude[g]) {
      for (double phi : axes.phase[g]) {
        const Eigen::VectorXcd d = direction(n_tx, a, phi);
        Eigen::VectorXd gain(users);
        for (int k = 0; k < users; ++k) gain(k) = (scenario.channels[k] * d).squaredNorm();
        dirs[g].push_back({a, phi, std::move(gain)});
      }
    }
  }
  const auto shares = power_tuples(axes, groups);
  const double budget = scenario.power_budget;

  std::vector<int> group_of(users);
  for (int k = 0; k < users; ++k) group_of[k] = dims.group_of(k);

  std::uint64_t evaluations = 0;
  std::vector<std::size_t> idx(groups, 0);
  std::vector<double> group_min(groups);
  while (true) {
    for (const auto& share : shares) {
      ++evaluations;
      std::fill(group_min.begin(), group_min.end(), std::numeric_limits<double>::infinity());
      for (int k = 0; k < users; ++k) {
        const int g = group_of[k];
        double interference = 0.0;
        for (int j = 0; j < groups; ++j)
          if (j != g) interference += share[j] * dirs[j][idx[j]].gain(k);
        const double s = budget * share[g] * dirs[g][idx[g]].gain(k) /
                         (scenario.noise_power[k] + budget * interference);
        group_min[g] = std::min(group_min[g], s);
      }
      double objective = std::numeric_limits<double>::infinity();
      for (int g = 0; g < groups; ++g)
        objective = std::min(objective, scenario.weights[g] * std::log2(1.0 + group_min[g]));
      if (objective > best.objective) {
        best.objective = objective;
        best.power_share = share;
        for (int g = 0; g < groups; ++g) {
          best.amplitude[g] = dirs[g][idx[g]].amplitude;
          best.phase[g] = dirs[g][idx[g]].phase;
        }
      }
    }
    int pos = groups - 1;
    while (pos >= 0 && ++idx[pos] == dirs[pos].size()) idx[pos--] = 0;
    if (pos < 0) break;
  }
  return evaluations;
}

Axes refine(const Axes& prev, const Incumbent& best, const GridSpec& spec, int n_tx) {
  Axes next;
  const int groups = static_cast<int>(prev.amplitude.size());
  for (int g = 0; g < groups; ++g) {
    if (n_tx == 1) {
      next.amplitude.push_back({0.0});
      next.phase.push_back({0.0});
      continue;
    }
    next.amplitude.push_back(window(best.amplitude[g], spacing(prev.amplitude[g]), 0.0,
                                    kQuarterTurn, spec.amplitude_steps));
    const double dphi = prev.phase[g].size() > 1 ? spacing(prev.phase[g]) : 0.0;
    next.phase.push_back(linspace(best.phase[g] - dphi, best.phase[g] + dphi, spec.phase_steps));
  }
  for (int j = 0; j + 1 < groups; ++j)
    next.power.push_back(
        window(best.power_share[j], spacing(prev.power[j]), 0.0, 1.0, spec.power_steps));
  return next;
}

}  // namespace

void GridSpec::validate() const {
  if (phase_steps < 1) throw ValidationError("phase_steps must be positive");
  if (amplitude_steps < 2) throw ValidationError("amplitude_steps must be at least 2");
  if (power_steps < 2) throw ValidationError("power_steps must be at least 2");
  if (refinement_rounds < 0) throw ValidationError("refinement_rounds must be non-negative");
}

std::uint64_t grid_evaluations(const Scenario& scenario, const GridSpec& spec) {
  spec.validate();
  check_tiny(scenario);
  const Axes axes = initial_axes(scenario, spec);
  const std::uint64_t later = axes_size(axes, power_count_bound(axes));
  if (later > kMaxGridEvaluations) return later;
  const std::uint64_t first = axes_size(axes, power_tuples(axes, scenario.dims.num_groups).size());
  const std::uint64_t refined =
      saturating_mul(later, static_cast<std::uint64_t>(spec.refinement_rounds));
  return refined > kMaxGridEvaluations ? refined : first + refined;
}

GridResult grid_search_mmf(const Scenario& scenario, const GridSpec& spec) {
  scenario.validate();
  const std::uint64_t needed = grid_evaluations(scenario, spec);
  if (needed > kMaxGridEvaluations)
    throw SizeError("grid needs " + std::to_string(needed) + " evaluations, limit is " +
                    std::to_string(kMaxGridEvaluations));
  const auto& dims = scenario.dims;
  const int groups = dims.num_groups;

  GridResult result;
  Incumbent best;
  best.amplitude.assign(groups, 0.0);
  best.phase.assign(groups, 0.0);
  Axes axes = initial_axes(scenario, spec);
  for (int round = 0; round <= spec.refinement_rounds; ++round) {
    if (round > 0) axes = refine(axes, best, spec, dims.num_tx_antennas);
    result.evaluations += search(scenario, axes, best);
    result.round_objectives.push_back(best.objective);
  }

  for (int g = 0; g < groups; ++g) {
    const double p = scenario.power_budget * best.power_share[g];
    result.tx.beamformers.push_back(
        std::sqrt(p) * direction(dims.num_tx_antennas, best.amplitude[g], best.phase[g]));
  }
  const ReceiveState rx = mmse_receivers(scenario, result.tx);
  result.objective = achieved_objective(scenario, rx.sinr);
  result.min_sinr = std::numeric_limits<double>::infinity();
  for (const auto& s : rx.sinr) result.min_sinr = std::min(result.min_sinr, s.minCoeff());
  return result;
}

double KktReport::max_identity() const { return std::max({stationarity, normalization, lambda}); }

KktReport kkt_residuals(const Scenario& scenario, const KktPoint& point) {
  const auto& dims = scenario.dims;
  KktReport report;
  const RegularizedSystem sys = transmit_system(scenario, point.receivers, point.beamformer_lambda);
  const Eigen::MatrixXcd w = stacked_beamformers(point.tx);
  const double mu = point.duals.mu;
  const double scale = sys.rhs.norm();
  const double r = (sys.gram * w + mu * w - sys.rhs).norm();
  report.stationarity = scale > 0.0 ? r / scale : r;

  const StreamValues& v = point.duals.v;
  const StreamValues eps = mse(scenario, point.tx, point.receivers);
  for (int l = 0; l < dims.max_streams(); ++l) {
    double sum = 0.0;
    for (int k = 0; k < dims.num_users(); ++k)
      if (v[k].size() > l) sum += v[k](l) / scenario.weights[dims.group_of(k)];
    report.normalization = std::max(report.normalization, std::abs(sum - 1.0));
  }
  for (int g = 0; g < dims.num_groups; ++g) {
    const int first = dims.first_user(g);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int l = 0; l < dims.streams_per_group[g]; ++l) {
      double z = 0.0;
      for (int k = first; k < first + dims.users_per_group[g]; ++k) z += v[k](l);
      z /= scenario.weights[g];
      lo = std::min(lo, z);
      hi = std::max(hi, z);
    }
    report.zeta = std::max(report.zeta, hi - lo);
  }
  for (int k = 0; k < dims.num_users(); ++k) {
    for (Eigen::Index l = 0; l < v[k].size(); ++l) {
      const double lam = point.duals.lambda[k](l);
      report.lambda = std::max(report.lambda,
                               std::abs(lam - v[k](l) / eps[k](l)) / std::max(1.0, std::abs(lam)));
    }
  }
  const double power = total_power(point.tx);
  report.power = std::abs(power - scenario.power_budget) / scenario.power_budget;
  report.power_slackness = mu * report.power;

  const auto rates = solver_stream_rates(scenario, eps, v);
  for (int k = 0; k < dims.num_users(); ++k) {
    const int g = dims.group_of(k);
    for (Eigen::Index l = 0; l < v[k].size(); ++l)
      report.rate_slackness =
          std::max(report.rate_slackness, v[k](l) * std::abs(rates[g](l) + std::log2(eps[k](l))));
  }
  report.mu = mu;
  report.mu_at_optimum = mu_at_optimum(scenario, point.receivers, point.beamformer_lambda);
  return report;
}

std::vector<std::vector<TaylorPoint>> LagrangianPoint::taylor() const {
  std::vector<std::vector<TaylorPoint>> out;
  for (const auto& e : mse) {
    std::vector<TaylorPoint> row;
    for (Eigen::Index l = 0; l < e.size(); ++l) row.push_back(taylor_point(e(l)));
    out.push_back(std::move(row));
  }
  return out;
}

double lagrangian(const Scenario& scenario, const LagrangianPoint& point, const StreamValues& v) {
  const auto& dims = scenario.dims;
  const auto taylor = point.taylor();
  double value = -point.common_rate;
  for (int g = 0; g < dims.num_groups; ++g) {
    const int first = dims.first_user(g);
    double mass = 0.0;
    for (int k = first; k < first + dims.users_per_group[g]; ++k) mass += v[k].sum();
    const double zeta = mass / (scenario.weights[g] * dims.streams_per_group[g]);
    value += zeta * (point.common_rate - scenario.weights[g] * point.stream_rates[g].sum());
  }
  value += point.mu * (point.power - scenario.power_budget);
  for (int k = 0; k < dims.num_users(); ++k) {
    const int g = dims.group_of(k);
    for (Eigen::Index l = 0; l < v[k].size(); ++l) {
      const double t = -std::log2(point.mse[k](l));
      value += v[k](l) * (point.stream_rates[g](l) - t);
      value += point.lambda[k](l) * (point.mse[k](l) - taylor[k][l](t));
    }
  }
  return value;
}

double finite_diff_check(const ScalarField& f, const StreamValues& v, const StreamValues& analytic,
                         double h) {
  if (!(h >= 1e-7 && h <= 1e-3))
    throw DomainError("finite-difference step must lie in [1e-7, 1e-3]");
  StreamValues probe = v;
  double worst = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    for (Eigen::Index l = 0; l < v[k].size(); ++l) {
      probe[k](l) = v[k](l) + h;
      const double up = f(probe);
      probe[k](l) = v[k](l) - h;
      const double down = f(probe);
      probe[k](l) = v[k](l);
      worst = std::max(worst, std::abs((up - down) / (2.0 * h) - analytic[k](l)));
    }
  }
  return worst;
}

double lagrangian_gradient_error(const Scenario& scenario, const LagrangianPoint& point,
                                 const StreamValues& v, double h) {
  const StreamValues analytic =
      subgradient(scenario, point.common_rate, point.stream_rates, point.mse);
  return finite_diff_check([&](const StreamValues& x) { return lagrangian(scenario, point, x); }, v,
                           analytic, h);
}

}  // namespace wmmf
