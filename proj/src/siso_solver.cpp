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

#include "wmmf/siso_solver.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "wmmf/errors.hpp"
#include "wmmf/power_bisection.hpp"

namespace wmmf {

namespace {

void check_single_antenna(const Scenario& scenario) {
  const auto& dims = scenario.dims;
  for (int k = 0; k < dims.num_users(); ++k)
    if (dims.rx_antennas_per_user[k] != 1)
      throw PreconditionError("user " + std::to_string(k) +
                              " has several receive antennas; use the WMMF solver");
  for (int g = 0; g < dims.num_groups; ++g)
    if (dims.streams_per_group[g] != 1)
      throw PreconditionError("group " + std::to_string(g) +
                              " carries several streams; use the WMMF solver");
}

// h_k as a column: the conjugate transpose of the 1 x N_T channel row.
Eigen::VectorXcd channel_column(const Scenario& scenario, int k) {
  return scenario.channels[k].row(0).adjoint();
}

std::vector<RegularizedSystem> beamformer_systems(const Scenario& scenario,
                                                  const Eigen::VectorXd& lambda,
                                                  const TransmitState& w_prev, double gamma_prev) {
  const auto& dims = scenario.dims;
  const int n = dims.num_tx_antennas;
  Eigen::MatrixXcd all = Eigen::MatrixXcd::Zero(n, n);
  std::vector<Eigen::MatrixXcd> own(dims.num_groups, Eigen::MatrixXcd::Zero(n, n));
  std::vector<RegularizedSystem> systems(dims.num_groups);
  for (int g = 0; g < dims.num_groups; ++g) systems[g].rhs = Eigen::MatrixXcd::Zero(n, 1);
  for (int k = 0; k < dims.num_users(); ++k) {
    const int g = dims.group_of(k);
    const Eigen::VectorXcd h = channel_column(scenario, k);
    const Eigen::MatrixXcd outer = lambda(k) * h * h.adjoint();
    all += outer;
    own[g] += outer;
    const std::complex<double> projection = h.dot(w_prev.beamformers[g].col(0));  // h^H w
    systems[g].rhs.col(0) += (lambda(k) / gamma_prev) * projection * h;
  }
  for (int g = 0; g < dims.num_groups; ++g) systems[g].gram = all - own[g];
  return systems;
}

TransmitState from_columns(const std::vector<Eigen::MatrixXcd>& columns) {
  return TransmitState{columns};
}

}  // namespace

void SisoConfig::validate() const {
  if (!(step_size > 0.0)) throw ValidationError("step_size must be positive");
  if (inner_iters < 1) throw ValidationError("inner_iters must be at least 1");
  if (outer_iters < 1) throw ValidationError("outer_iters must be at least 1");
  if (!(convergence_tol > 0.0)) throw ValidationError("convergence_tol must be positive");
  if (!(bisection_tol > 0.0)) throw ValidationError("bisection_tol must be positive");
  if (!(mu_min > 0.0)) throw ValidationError("mu_min must be positive");
}

TransmitState siso_beamformer(const Scenario& scenario, const Eigen::VectorXd& lambda, double mu,
                              const TransmitState& w_prev, double gamma_prev) {
  check_single_antenna(scenario);
  if (!(mu > 0.0)) throw ValidationError("mu must be positive");
  if (!(gamma_prev > 0.0)) throw ValidationError("previous common SINR must be positive");
  if (lambda.size() != scenario.dims.num_users() || lambda.minCoeff() < 0.0)
    throw ValidationError("lambda must hold one non-negative value per user");
  const auto systems = beamformer_systems(scenario, lambda, w_prev, gamma_prev);
  std::vector<Eigen::MatrixXcd> columns;
  for (const auto& sys : systems) columns.push_back(solve_regularized(sys, mu));
  return from_columns(columns);
}

GammaEstimate gamma_estimate(const Scenario& scenario, const Eigen::VectorXd& lambda,
                             const TransmitState& w_prev, double gamma_prev) {
  double denom = 0.0;
  for (int k = 0; k < scenario.dims.num_users(); ++k) {
    const int g = scenario.dims.group_of(k);
    denom += lambda(k) * std::norm((scenario.channels[k] * w_prev.beamformers[g].col(0))(0));
  }
  if (!(denom > 0.0)) return {gamma_prev, true};
  return {std::sqrt(gamma_prev * gamma_prev / denom), false};
}

Eigen::VectorXd siso_lambda_update(const Eigen::VectorXd& lambda_prev, double beta,
                                   double gamma_common, const Eigen::VectorXd& per_user_sinr) {
  return (lambda_prev.array() + beta * (gamma_common - per_user_sinr.array())).cwiseMax(0.0);
}

Eigen::VectorXd user_sinr(const Scenario& scenario, const TransmitState& tx) {
  const auto& dims = scenario.dims;
  Eigen::VectorXd out(dims.num_users());
  for (int k = 0; k < dims.num_users(); ++k) {
    const int g = dims.group_of(k);
    double signal = 0.0;
    double interference = 0.0;
    for (int j = 0; j < dims.num_groups; ++j) {
      const double gain = (scenario.channels[k] * tx.beamformers[j]).squaredNorm();
      (j == g ? signal : interference) += gain;
    }
    out(k) = signal / (interference + scenario.noise_power[k]);
  }
  return out;
}

SisoResult siso_solve(const Scenario& scenario, const SisoConfig& config) {
  scenario.validate();
  config.validate();
  check_single_antenna(scenario);
  const auto& dims = scenario.dims;
  const int users = dims.num_users();

  SisoResult best;
  best.min_sinr = -std::numeric_limits<double>::infinity();
  SolveTrace trace;

  TransmitState tx = random_transmit_state(scenario);
  Eigen::VectorXd lambda = Eigen::VectorXd::Constant(users, 1.0 / users);

  double prev_outer = std::numeric_limits<double>::quiet_NaN();
  for (int outer = 0; outer < config.outer_iters; ++outer) {
    const TransmitState anchor = tx;
    const Eigen::VectorXd anchor_sinr = user_sinr(scenario, anchor);
    const double anchor_gamma = anchor_sinr.minCoeff();
    if (!(anchor_gamma > 0.0)) throw SolveFailure("linearization point has zero SINR", trace);

    int inner = 0;
    double prev_gamma = std::numeric_limits<double>::quiet_NaN();
    Eigen::VectorXd sinr;
    while (inner < config.inner_iters) {
      ++inner;
      const auto systems = beamformer_systems(scenario, lambda, anchor, anchor_gamma);
      const BisectionResult b =
          bisect_power(systems, scenario.power_budget, {config.bisection_tol, config.mu_min});
      TransmitState next = from_columns(b.solutions);
      const GammaEstimate est = gamma_estimate(scenario, lambda, anchor, anchor_gamma);
      sinr = user_sinr(scenario, next);
      const double beta =
          config.relative_step ? config.step_size * lambda.mean() / est.gamma : config.step_size;
      Eigen::VectorXd lambda_next = siso_lambda_update(lambda, beta, est.gamma, sinr);
      if (!sinr.allFinite() || !lambda_next.allFinite() || !std::isfinite(est.gamma))
        throw SolveFailure("non-finite value in SINR iteration", trace);
      if (!(lambda_next.array() > 0.0).any()) lambda_next = lambda;

      const double achieved = sinr.minCoeff();
      double residual = 0.0;
      for (int g = 0; g < dims.num_groups; ++g) {
        const auto& sys = systems[g];
        const Eigen::MatrixXcd& w = b.solutions[g];
        const double scale = sys.rhs.norm();
        const double r = (sys.gram * w + b.mu * w - sys.rhs).norm();
        residual = std::max(residual, scale > 0.0 ? r / scale : r);
      }
      if (config.record_trace) {
        InnerRecord rec;
        rec.outer = outer;
        rec.inner = inner;
        rec.common_rate = est.gamma;
        for (int g = 0; g < dims.num_groups; ++g) {
          const int first = dims.first_user(g);
          rec.group_rates.push_back(sinr.segment(first, dims.users_per_group[g]).minCoeff());
        }
        rec.power = b.power;
        rec.mu = b.mu;
        rec.stationarity = residual;
        rec.constraint_violation =
            std::max(b.power - scenario.power_budget, 0.0) / scenario.power_budget;
        rec.achieved = achieved;
        rec.degenerate = est.degenerate;
        trace.inner.push_back(std::move(rec));
      }

      if (achieved > best.min_sinr) {
        best.tx = next;
        best.sinr = sinr;
        best.min_sinr = achieved;
        best.power = b.power;
        best.stationarity = residual;
        best.duals = SisoDualState{lambda_next, b.mu, est.gamma};
      }
      tx = std::move(next);
      lambda = std::move(lambda_next);
      const bool settled =
          std::abs(est.gamma - prev_gamma) < config.convergence_tol * std::max(1.0, est.gamma);
      prev_gamma = est.gamma;
      if (settled) break;
    }

    best.outer_iterations = outer + 1;
    best.inner_iterations += inner;
    const double achieved = sinr.minCoeff();
    if (config.record_trace) {
      OuterRecord rec;
      rec.outer = outer;
      rec.inner_iterations = inner;
      rec.achieved = achieved;
      rec.best_achieved = best.min_sinr;
      rec.min_stream_rate = std::log2(1.0 + achieved);
      trace.outer.push_back(rec);
    }
    if (std::abs(achieved - prev_outer) < config.convergence_tol * std::max(1.0, achieved)) {
      best.converged = true;
      break;
    }
    prev_outer = achieved;
  }
  best.trace = std::move(trace);
  return best;
}

}  // namespace wmmf
