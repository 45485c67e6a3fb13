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

#include "wmmf/scenario.hpp"

namespace wmmf {

/// Per-user, per-stream real quantities: entry [k](l) for user k and stream
/// l of the user's group.
using StreamValues = std::vector<Eigen::VectorXd>;

StreamValues make_stream_values(const Dimensions& dims, double fill);

/// W_g for every group, each N_T x L_g. Columns are the stream beamformers.
struct TransmitState {
  std::vector<Eigen::MatrixXcd> beamformers;
};

/// Receive filters u_{k,l} (columns of an N_k x L_g matrix per user) with the
/// MSE and SINR they achieve against one TransmitState.
struct ReceiveState {
  std::vector<Eigen::MatrixXcd> receivers;
  StreamValues mse;
  StreamValues sinr;
};

/// Linearization of 2^{-t} at t_bar: a_bar * t + b_bar.
struct TaylorPoint {
  double t_bar = 0.0;
  double a_bar = 0.0;
  double b_bar = 0.0;

  double operator()(double t) const { return a_bar * t + b_bar; }
};

/// All beamformers stacked column-wise, group by group.
Eigen::MatrixXcd stacked_beamformers(const TransmitState& tx);

double total_power(const TransmitState& tx);

/// Linear MMSE receivers for every stream. One Hermitian factorization of
/// H_k W W^H H_k^H + sigma_k^2 I per user serves all of its streams.
ReceiveState mmse_receivers(const Scenario& scenario, const TransmitState& tx);

/// MSE of each stream estimate under arbitrary receivers.
StreamValues mse(const Scenario& scenario, const TransmitState& tx,
                 const std::vector<Eigen::MatrixXcd>& receivers);

/// SINR of each stream under arbitrary receivers; 0 for an all-zero receiver.
StreamValues sinr(const Scenario& scenario, const TransmitState& tx,
                  const std::vector<Eigen::MatrixXcd>& receivers);

/// Tangent of 2^{-t} at t_bar = -log2(epsilon). Throws DomainError unless
/// 0 < epsilon <= 1.
TaylorPoint taylor_point(double epsilon);

/// Dual-weighted mean of log2(1/eps) over the users of group g for stream l.
/// Throws DegenerateDualError when the group's duals for l sum to zero.
double per_stream_rate(const Scenario& scenario, const StreamValues& mse,
                       const StreamValues& v, int group, int stream);

/// r_{g,l} for every group (outer index) and stream.
std::vector<Eigen::VectorXd> stream_rates(const Scenario& scenario, const StreamValues& mse,
                                          const StreamValues& v);

/// log2(1 + sinr) of the weakest user of each (g, l), summed over l and
/// weighted by alpha_g.
std::vector<double> achieved_group_rates(const Scenario& scenario, const StreamValues& sinr);

/// min over groups of achieved_group_rates: the true max-min objective.
double achieved_objective(const Scenario& scenario, const StreamValues& sinr);

/// Random beamformers drawn from the scenario's initialization stream, scaled
/// to total power P_T.
TransmitState random_transmit_state(const Scenario& scenario);

}  // namespace wmmf
