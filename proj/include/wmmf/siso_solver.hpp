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
#include "wmmf/scenario.hpp"
#include "wmmf/trace.hpp"

namespace wmmf {

struct SisoDualState {
  Eigen::VectorXd lambda;     // one per user
  double mu = 0.0;
  double gamma_common = 0.0;  // linear SINR
};

struct SisoConfig {
  double step_size = 1e-2;
  bool relative_step = true;  // scale the step by mean(lambda) / gamma
  int inner_iters = 100;      // dual steps per linearization point
  int outer_iters = 100;      // linearization updates
  double convergence_tol = 1e-6;  // on the relative change of the common SINR
  double bisection_tol = 1e-8;
  double mu_min = 1e-9;
  bool record_trace = true;

  void validate() const;
};

/// w_i = (mu I + sum_{j != i} sum_{k in j} lambda_k h_k h_k^H)^{-1}
///       (1 / gamma_prev) sum_{k in i} lambda_k (h_k^H w_prev_i) h_k
/// for every group, each from the previous iterate only.
TransmitState siso_beamformer(const Scenario& scenario, const Eigen::VectorXd& lambda, double mu,
                              const TransmitState& w_prev, double gamma_prev);

struct GammaEstimate {
  double gamma = 0.0;
  bool degenerate = false;  // zero denominator; gamma is the previous value
};

/// sqrt(gamma_prev^2 / sum_k lambda_k |h_k^H w_prev_{g(k)}|^2)
GammaEstimate gamma_estimate(const Scenario& scenario, const Eigen::VectorXd& lambda,
                             const TransmitState& w_prev, double gamma_prev);

/// [lambda + beta (gamma_common - sinr)]^+
Eigen::VectorXd siso_lambda_update(const Eigen::VectorXd& lambda_prev, double beta,
                                   double gamma_common, const Eigen::VectorXd& per_user_sinr);

/// Plain SINR of every single-antenna user.
Eigen::VectorXd user_sinr(const Scenario& scenario, const TransmitState& tx);

struct SisoResult {
  TransmitState tx;
  Eigen::VectorXd sinr;
  double min_sinr = 0.0;
  double power = 0.0;
  double stationarity = 0.0;  // relative residual of the beamformer equations
  SisoDualState duals;
  int outer_iterations = 0;
  int inner_iterations = 0;
  bool converged = false;
  SolveTrace trace;
};

/// Max-min SINR beamforming for single-antenna users.
///
/// Each outer iteration fixes a linearization point (w_prev, gamma_prev),
/// with gamma_prev the minimum SINR that w_prev achieves. The inner loop
/// then alternates the bisected beamformer update, the common-SINR estimate
/// and the projected dual step for that point. Returns the best iterate by
/// true minimum SINR. Throws PreconditionError if any user has more than one
/// antenna or any group more than one stream.
SisoResult siso_solve(const Scenario& scenario, const SisoConfig& config = {});

}  // namespace wmmf
