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

#include "wmmf/wmmf_solver.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "wmmf/errors.hpp"

namespace wmmf {

namespace {

double log2_inverse(double epsilon) { return -std::log(epsilon) * std::numbers::log2e; }

bool all_finite(const StreamValues& values) {
  for (const auto& x : values)
    if (!x.allFinite()) return false;
  return true;
}

bool all_zero(const StreamValues& values) {
  for (const auto& x : values)
    if ((x.array() != 0.0).any()) return false;
  return true;
}

std::vector<Eigen::MatrixXcd> split_columns(const Scenario& scenario,
                                            const Eigen::MatrixXcd& stacked) {
  std::vector<Eigen::MatrixXcd> out;
  Eigen::Index c = 0;
  for (int g = 0; g < scenario.dims.num_groups; ++g) {
    const int l = scenario.dims.streams_per_group[g];
    out.push_back(stacked.middleCols(c, l));
    c += l;
  }
  return out;
}

// Relative residual ||(A + mu I) W - B|| / ||B||.
double stationarity_residual(const RegularizedSystem& system, const TransmitState& tx,
                             double mu) {
  const Eigen::MatrixXcd w = stacked_beamformers(tx);
  const Eigen::MatrixXcd r = system.gram * w + mu * w - system.rhs;
  const double scale = system.rhs.norm();
  return scale > 0.0 ? r.norm() / scale : r.norm();
}

// max_l |sum_g alpha_g^{-1} sum_k v_{k,l} - 1|
double normalization_error(const Scenario& scenario, const StreamValues& v) {
  const auto& dims = scenario.dims;
  double worst = 0.0;
  for (int l = 0; l < dims.max_streams(); ++l) {
    double sum = 0.0;
    for (int k = 0; k < dims.num_users(); ++k)
      if (v[k].size() > l) sum += v[k](l) / scenario.weights[dims.group_of(k)];
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

}  // namespace

Eigen::VectorXd DualState::zeta(const Scenario& scenario) const {
  const auto& dims = scenario.dims;
  Eigen::VectorXd z = Eigen::VectorXd::Zero(dims.num_groups);
  for (int k = 0; k < dims.num_users(); ++k) z(dims.group_of(k)) += v[k].sum();
  for (int g = 0; g < dims.num_groups; ++g)
    z(g) /= scenario.weights[g] * dims.streams_per_group[g];
  return z;
}

void SolverConfig::validate() const {
  if (!(step_size > 0.0)) throw ValidationError("step_size must be positive");
  if (inner_iters < 1) throw ValidationError("inner_iters must be at least 1");
  if (outer_iters < 1) throw ValidationError("outer_iters must be at least 1");
  if (!(convergence_tol > 0.0)) throw ValidationError("convergence_tol must be positive");
  if (!(bisection_tol > 0.0)) throw ValidationError("bisection_tol must be positive");
  if (!(mu_min > 0.0)) throw ValidationError("mu_min must be positive");
}

RegularizedSystem transmit_system(const Scenario& scenario,
                                  const std::vector<Eigen::MatrixXcd>& receivers,
                                  const StreamValues& lambda) {
  const auto& dims = scenario.dims;
  const int n = dims.num_tx_antennas;
  RegularizedSystem sys;
  sys.gram = Eigen::MatrixXcd::Zero(n, n);
  sys.rhs = Eigen::MatrixXcd::Zero(n, dims.total_streams());
  int offset = 0;
  for (int g = 0; g < dims.num_groups; ++g) {
    const int first = dims.first_user(g);
    for (int k = first; k < first + dims.users_per_group[g]; ++k) {
      if (lambda[k].minCoeff() < 0.0)
        throw ValidationError("lambda must be non-negative");
      const Eigen::MatrixXcd hu = scenario.channels[k].adjoint() * receivers[k];  // N_T x L_g
      const Eigen::MatrixXcd scaled = hu * lambda[k].cwiseSqrt().asDiagonal();
      sys.gram.noalias() += scaled * scaled.adjoint();
      sys.rhs.middleCols(offset, dims.streams_per_group[g]) += hu * lambda[k].asDiagonal();
    }
    offset += dims.streams_per_group[g];
  }
  return sys;
}

TransmitState transmit_beamformer(const Scenario& scenario,
                                  const std::vector<Eigen::MatrixXcd>& receivers,
                                  const StreamValues& lambda, double mu) {
  if (all_zero(lambda)) throw DegenerateDualError("all MSE duals are zero");
  if (!(mu > 0.0)) throw ValidationError("mu must be positive");
  const RegularizedSystem sys = transmit_system(scenario, receivers, lambda);
  return TransmitState{split_columns(scenario, solve_regularized(sys, mu))};
}

MuSearch bisect_mu(const Scenario& scenario, const std::vector<Eigen::MatrixXcd>& receivers,
                   const StreamValues& lambda, const SolverConfig& config) {
  if (all_zero(lambda)) throw DegenerateDualError("all MSE duals are zero");
  const RegularizedSystem sys = transmit_system(scenario, receivers, lambda);
  const BisectionResult b = bisect_power({sys}, scenario.power_budget,
                                         {config.bisection_tol, config.mu_min});
  return MuSearch{b.mu, TransmitState{split_columns(scenario, b.solutions.front())}};
}

double mu_at_optimum(const Scenario& scenario, const std::vector<Eigen::MatrixXcd>& receivers,
                     const StreamValues& lambda) {
  double sum = 0.0;
  for (int k = 0; k < scenario.dims.num_users(); ++k)
    sum += (receivers[k].colwise().squaredNorm().transpose().array() * lambda[k].array()).sum();
  return sum / scenario.power_budget;
}

double common_rate(const Scenario& scenario, const StreamValues& mse, const StreamValues& v) {
  double rc = 0.0;
  for (int k = 0; k < scenario.dims.num_users(); ++k)
    for (Eigen::Index l = 0; l < v[k].size(); ++l) rc += v[k](l) * log2_inverse(mse[k](l));
  return rc;
}

StreamValues subgradient(const Scenario& scenario, double r_c,
                         const std::vector<Eigen::VectorXd>& group_stream_rates,
                         const StreamValues& mse) {
  const auto& dims = scenario.dims;
  StreamValues grad = make_stream_values(dims, 0.0);
  for (int k = 0; k < dims.num_users(); ++k) {
    const int g = dims.group_of(k);
    const double alpha = scenario.weights[g];
    const int streams = dims.streams_per_group[g];
    const double shared = (r_c - alpha * group_stream_rates[g].sum()) / (alpha * streams);
    for (int l = 0; l < streams; ++l)
      grad[k](l) = shared + group_stream_rates[g](l) + std::log2(mse[k](l));
  }
  return grad;
}

StreamValues update_duals(const Scenario& scenario, const StreamValues& v_prev,
                          const StreamValues& gradient, double beta) {
  const auto& dims = scenario.dims;
  const int users = dims.num_users();
  StreamValues v(v_prev.size());
  for (int k = 0; k < users; ++k) v[k] = (v_prev[k] + beta * gradient[k]).cwiseMax(0.0);
  for (int l = 0; l < dims.max_streams(); ++l) {
    double norm = 0.0;
    for (int k = 0; k < users; ++k)
      if (v[k].size() > l) norm += v[k](l) / scenario.weights[dims.group_of(k)];
    if (!(norm > 0.0)) {
      norm = 0.0;
      for (int k = 0; k < users; ++k) {
        if (v[k].size() <= l) continue;
        const double alpha = scenario.weights[dims.group_of(k)];
        v[k](l) = alpha / users;
        norm += v[k](l) / alpha;
      }
    }
    for (int k = 0; k < users; ++k)
      if (v[k].size() > l) v[k](l) /= norm;
  }
  return v;
}

StreamValues mse_duals(const StreamValues& v, const StreamValues& mse) {
  StreamValues lambda(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) lambda[k] = v[k].cwiseQuotient(mse[k]);
  return lambda;
}

std::vector<Eigen::VectorXd> solver_stream_rates(const Scenario& scenario,
                                                 const StreamValues& mse, const StreamValues& v) {
  const auto& dims = scenario.dims;
  std::vector<Eigen::VectorXd> rates;
  for (int g = 0; g < dims.num_groups; ++g) {
    const int first = dims.first_user(g);
    Eigen::VectorXd r(dims.streams_per_group[g]);
    for (int l = 0; l < r.size(); ++l) {
      double mass = 0.0;
      for (int k = first; k < first + dims.users_per_group[g]; ++k) mass += v[k](l);
      if (mass > 0.0) {
        r(l) = per_stream_rate(scenario, mse, v, g, l);
      } else {
        r(l) = std::numeric_limits<double>::infinity();
        for (int k = first; k < first + dims.users_per_group[g]; ++k)
          r(l) = std::min(r(l), log2_inverse(mse[k](l)));
      }
    }
    rates.push_back(std::move(r));
  }
  return rates;
}

WmmfResult solve(const Scenario& scenario, const SolverConfig& config) {
  scenario.validate();
  config.validate();
  const auto& dims = scenario.dims;

  WmmfResult best;
  best.objective = -std::numeric_limits<double>::infinity();
  SolveTrace trace;

  auto fail = [&](const std::string& what) -> void { throw SolveFailure(what, trace); };

  TransmitState tx = random_transmit_state(scenario);
  StreamValues v = make_stream_values(dims, 0.0);
  for (int k = 0; k < dims.num_users(); ++k)
    v[k].setConstant(scenario.weights[dims.group_of(k)] / dims.num_users());
  StreamValues lambda = v;

  int global = 0;
  double prev_outer = std::numeric_limits<double>::quiet_NaN();
  for (int outer = 0; outer < config.outer_iters; ++outer) {
    const ReceiveState design = mmse_receivers(scenario, tx);
    if (!all_finite(design.mse)) fail("non-finite MSE after receiver update");

    double prev_rc = std::numeric_limits<double>::quiet_NaN();
    double objective = 0.0;
    int inner = 0;
    while (inner < config.inner_iters) {
      ++inner;
      ++global;
      const double beta =
          config.diminishing_step ? config.step_size / std::sqrt(double(global)) : config.step_size;

      const RegularizedSystem sys = transmit_system(scenario, design.receivers, lambda);
      if (!sys.gram.allFinite() || !sys.rhs.allFinite()) fail("non-finite transmit system");
      const BisectionResult b = bisect_power({sys}, scenario.power_budget,
                                             {config.bisection_tol, config.mu_min});
      TransmitState next{split_columns(scenario, b.solutions.front())};

      const StreamValues eps = mse(scenario, next, design.receivers);
      if (!all_finite(eps)) fail("non-finite MSE");
      const auto rates = solver_stream_rates(scenario, eps, v);
      const double rc = common_rate(scenario, eps, v);
      const StreamValues grad = subgradient(scenario, rc, rates, eps);
      StreamValues v_next = update_duals(scenario, v, grad, beta);
      StreamValues lambda_next = mse_duals(v_next, eps);
      if (!std::isfinite(rc) || !all_finite(v_next) || !all_finite(lambda_next))
        fail("non-finite dual update");

      ReceiveState achieved_rx = mmse_receivers(scenario, next);
      objective = achieved_objective(scenario, achieved_rx.sinr);
      if (!std::isfinite(objective)) fail("non-finite objective");

      if (config.record_trace) {
        InnerRecord rec;
        rec.outer = outer;
        rec.inner = inner;
        rec.common_rate = rc;
        for (int g = 0; g < dims.num_groups; ++g)
          rec.group_rates.push_back(scenario.weights[g] * rates[g].sum());
        rec.power = b.power;
        rec.mu = b.mu;
        rec.stationarity = stationarity_residual(sys, next, b.mu);
        rec.constraint_violation =
            std::max(std::max(b.power - scenario.power_budget, 0.0) / scenario.power_budget,
                     normalization_error(scenario, v_next));
        rec.achieved = objective;
        trace.inner.push_back(std::move(rec));
      }

      if (objective > best.objective) {
        best.tx = next;
        best.rx = std::move(achieved_rx);
        best.common_rate = rc;
        best.objective = objective;
        best.power = b.power;
        best.duals.v = v_next;
        best.duals.lambda = lambda_next;
        best.duals.mu = b.mu;
        best.duals.taylor.clear();
        for (const auto& e : design.mse) {
          std::vector<TaylorPoint> row;
          for (Eigen::Index l = 0; l < e.size(); ++l) row.push_back(taylor_point(e(l)));
          best.duals.taylor.push_back(std::move(row));
        }
        best.tx_lambda = lambda;
        best.design_receivers = design.receivers;
        best.design_mse = eps;
      }

      tx = std::move(next);
      v = std::move(v_next);
      lambda = std::move(lambda_next);
      const bool settled = std::abs(rc - prev_rc) < config.convergence_tol;
      prev_rc = rc;
      if (settled) break;
    }

    best.outer_iterations = outer + 1;
    best.inner_iterations += inner;
    if (config.record_trace) {
      OuterRecord rec;
      rec.outer = outer;
      rec.inner_iterations = inner;
      rec.achieved = objective;
      rec.best_achieved = best.objective;
      const ReceiveState now = mmse_receivers(scenario, tx);
      double weakest = std::numeric_limits<double>::infinity();
      for (const auto& s : now.sinr) weakest = std::min(weakest, std::log2(1.0 + s.minCoeff()));
      rec.min_stream_rate = weakest;
      trace.outer.push_back(rec);
    }
    if (std::abs(objective - prev_outer) < config.convergence_tol) {
      best.converged = true;
      break;
    }
    prev_outer = objective;
  }

  best.trace = std::move(trace);
  return best;
}

}  // namespace wmmf
