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
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "wmmf/kernels.hpp"
#include "wmmf/scenario.hpp"
#include "wmmf/wmmf_solver.hpp"

namespace wmmf {

// Brute-force reference for tiny single-antenna instances.
//
// Every group's beamformer is sqrt(p_g) [cos(theta), sin(theta) e^{j phi}]
// with theta in [0, pi/2] on the amplitude grid and the first coefficient
// real and non-negative. The powers p_g sum to P_T. Each refinement round
// re-grids every parameter over one step on either side of the incumbent and
// keeps the incumbent.
struct GridSpec {
  int phase_steps = 32;
  int amplitude_steps = 16;
  int power_steps = 32;
  int refinement_rounds = 2;

  void validate() const;
};

inline constexpr std::uint64_t kMaxGridEvaluations = 100'000'000;

struct GridResult {
  TransmitState tx;
  double objective = 0.0;   // min_g alpha_g log2(1 + min_{k in g} sinr_k)
  double min_sinr = 0.0;
  std::uint64_t evaluations = 0;
  std::vector<double> round_objectives;  // incumbent after each round
};

/// Exhaustive search. Ties resolve to the lexicographically smallest grid
/// index. Throws SizeError unless N_T <= 2, K <= 3, all N_k = 1 and L_g = 1,
/// or if the grid needs more than kMaxGridEvaluations evaluations.
GridResult grid_search_mmf(const Scenario& scenario, const GridSpec& spec = {});

/// Number of objective evaluations grid_search_mmf would perform.
std::uint64_t grid_evaluations(const Scenario& scenario, const GridSpec& spec);

/// A primal-dual point of the convexified problem for fixed receivers.
/// beamformer_lambda produced tx together with duals.mu; duals.v and
/// duals.lambda are the updated duals at the MSEs of tx.
struct KktPoint {
  TransmitState tx;
  std::vector<Eigen::MatrixXcd> receivers;
  StreamValues beamformer_lambda;
  DualState duals;
};

/// Max-norm residuals of the optimality conditions.
struct KktReport {
  double stationarity = 0.0;     // ||(A + mu I) W - B|| / ||B||
  double zeta = 0.0;             // spread over l of alpha_g^{-1} sum_k v_{k,l}
  double normalization = 0.0;    // |sum_g alpha_g^{-1} sum_k v_{k,l} - 1|
  double lambda = 0.0;           // |lambda - v / eps| / max(1, |lambda|)
  double power = 0.0;            // |P - P_T| / P_T
  double power_slackness = 0.0;  // mu |P - P_T| / P_T
  double rate_slackness = 0.0;   // v_{k,l} |r_{g,l} - log2(1/eps_{k,l})|
  double mu = 0.0;
  double mu_at_optimum = 0.0;

  /// Residuals that every iterate of the solver satisfies up to round-off.
  double max_identity() const;
};

KktReport kkt_residuals(const Scenario& scenario, const KktPoint& point);

/// Point for the Lagrangian with the common-rate duals eliminated through
/// zeta_g = sum_{k,l} v_{k,l} / (alpha_g L_g).
struct LagrangianPoint {
  double common_rate = 0.0;
  std::vector<Eigen::VectorXd> stream_rates;  // r_{g,l}
  StreamValues mse;
  StreamValues lambda;
  double mu = 0.0;
  double power = 0.0;

  /// Derived from the MSEs of the point.
  std::vector<std::vector<TaylorPoint>> taylor() const;
};

/// The Lagrangian of the convexified problem as a function of v, with every
/// primal quantity held at `point` and t_{k,l} = log2(1/eps_{k,l}).
double lagrangian(const Scenario& scenario, const LagrangianPoint& point, const StreamValues& v);

using ScalarField = std::function<double(const StreamValues&)>;

/// Central differences of f at v compared entry-wise with `analytic`;
/// returns the max absolute error. Throws DomainError unless
/// 1e-7 <= h <= 1e-3.
double finite_diff_check(const ScalarField& f, const StreamValues& v,
                         const StreamValues& analytic, double h);

/// finite_diff_check of the Lagrangian against subgradient().
double lagrangian_gradient_error(const Scenario& scenario, const LagrangianPoint& point,
                                 const StreamValues& v, double h);

}  // namespace wmmf
