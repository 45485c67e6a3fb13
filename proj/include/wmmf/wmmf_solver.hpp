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

#include <vector>

#include <Eigen/Dense>

#include "wmmf/kernels.hpp"
#include "wmmf/power_bisection.hpp"
#include "wmmf/scenario.hpp"
#include "wmmf/trace.hpp"

namespace wmmf {

/// Dual variables of the convexified weighted max-min problem.
struct DualState {
  StreamValues v;       // stream-rate duals
  StreamValues lambda;  // MSE duals
  double mu = 0.0;      // power dual
  /// Linearization of 2^{-t} at the MSEs of the current receivers.
  std::vector<std::vector<TaylorPoint>> taylor;

  /// Common-rate duals, zeta_g = sum_{k,l} v_{k,l} / (alpha_g L_g).
  Eigen::VectorXd zeta(const Scenario& scenario) const;
};

struct SolverConfig {
  double step_size = 1e-2;
  int inner_iters = 50;
  int outer_iters = 100;
  double convergence_tol = 1e-5;  // on |delta r_c| (inner) and |delta objective| (outer)
  double bisection_tol = 1e-8;
  double mu_min = 1e-9;
  bool diminishing_step = false;  // beta / sqrt(i) over the global inner count
  bool record_trace = true;

  void validate() const;
};

/// (sum_{k,l} lambda_{k,l} H_k^H u u^H H_k, {sum_{k in g} lambda_{k,l} H_k^H u_{k,l}}_g)
/// for the transmit beamformer equation.
RegularizedSystem transmit_system(const Scenario& scenario,
                                  const std::vector<Eigen::MatrixXcd>& receivers,
                                  const StreamValues& lambda);

/// Closed-form beamformers for fixed receivers and duals. One factorization of
/// the shared matrix serves every (g, l). Throws DegenerateDualError if all
/// lambda vanish.
TransmitState transmit_beamformer(const Scenario& scenario,
                                  const std::vector<Eigen::MatrixXcd>& receivers,
                                  const StreamValues& lambda, double mu);

struct MuSearch {
  double mu = 0.0;
  TransmitState tx;
};

/// Power dual meeting the budget through bisection on mu.
MuSearch bisect_mu(const Scenario& scenario, const std::vector<Eigen::MatrixXcd>& receivers,
                   const StreamValues& lambda, const SolverConfig& config = {});

/// The power dual that holds at an optimal lambda:
/// (1/P_T) sum_{k,l} lambda_{k,l} ||u_{k,l}||^2. Diagnostic only.
double mu_at_optimum(const Scenario& scenario, const std::vector<Eigen::MatrixXcd>& receivers,
                     const StreamValues& lambda);

/// r_c = sum_{g,k,l} v_{k,l} log2(1/eps_{k,l}).
double common_rate(const Scenario& scenario, const StreamValues& mse, const StreamValues& v);

/// Gradient of the Lagrangian with respect to every v_{k,l} at the point
/// (r_c, r_{g,l}, eps) with the common-rate duals eliminated.
StreamValues subgradient(const Scenario& scenario, double r_c,
                         const std::vector<Eigen::VectorXd>& group_stream_rates,
                         const StreamValues& mse);

/// Projected sub-gradient step followed by per-stream normalization
/// sum_g alpha_g^{-1} sum_{k in g} v_{k,l} = 1. A stream whose projected
/// duals all vanish restarts from alpha_g / K.
StreamValues update_duals(const Scenario& scenario, const StreamValues& v_prev,
                          const StreamValues& gradient, double beta);

/// lambda = v / eps.
StreamValues mse_duals(const StreamValues& v, const StreamValues& mse);

/// r_{g,l} for every group. Groups whose duals for a stream carry no mass
/// get the rate of their weakest user for that stream.
std::vector<Eigen::VectorXd> solver_stream_rates(const Scenario& scenario,
                                                 const StreamValues& mse, const StreamValues& v);

struct WmmfResult {
  TransmitState tx;
  ReceiveState rx;           // MMSE receivers for tx and the SINRs they achieve
  double common_rate = 0.0;  // r_c of the returned iterate
  double objective = 0.0;    // min_g alpha_g sum_l min_k log2(1 + sinr)
  double power = 0.0;
  DualState duals;           // v and lambda after the returned iterate's update
  StreamValues tx_lambda;    // lambda that produced tx
  std::vector<Eigen::MatrixXcd> design_receivers;  // receivers that produced tx
  StreamValues design_mse;   // mse of tx under design_receivers
  int outer_iterations = 0;
  int inner_iterations = 0;
  bool converged = false;
  SolveTrace trace;
};

/// Alternates MMSE receiver updates (outer loop) with closed-form transmit
/// beamformers, closed-form rates and projected sub-gradient dual updates
/// (inner loop). Returns the best iterate by true objective.
WmmfResult solve(const Scenario& scenario, const SolverConfig& config = {});

}  // namespace wmmf
