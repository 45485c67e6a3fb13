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

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "wmmf/kernels.hpp"
#include "wmmf/scenario.hpp"

namespace wmmf::testing {

using cd = std::complex<double>;

/// N_T = 3, groups of 1 and 2 users, N_k = (2, 1, 2), L = (2, 1).
inline Scenario instance_a() {
  Scenario s;
  s.dims.num_tx_antennas = 3;
  s.dims.num_groups = 2;
  s.dims.users_per_group = {1, 2};
  s.dims.rx_antennas_per_user = {2, 1, 2};
  s.dims.streams_per_group = {2, 1};
  Eigen::MatrixXcd h0(2, 3), h1(1, 3), h2(2, 3);
  h0 << cd(0.8, -0.3), cd(-0.5, 0.9), cd(0.2, 0.4), cd(-1.1, 0.2), cd(0.3, -0.6), cd(0.7, 0.5);
  h1 << cd(0.4, 0.7), cd(1.2, -0.2), cd(-0.3, -0.8);
  h2 << cd(-0.6, -0.4), cd(0.9, 0.1), cd(0.5, -1.0), cd(0.1, 0.6), cd(-0.7, -0.3), cd(1.3, 0.2);
  s.channels = {h0, h1, h2};
  s.noise_power = {0.5, 1.0, 0.8};
  s.weights = {1.0, 1.5};
  s.power_budget = 2.0;
  s.seed = 11;
  return s;
}

inline TransmitState instance_a_tx() {
  Eigen::MatrixXcd w0(3, 2), w1(3, 1);
  w0 << cd(0.6, 0.1), cd(-0.2, 0.5), cd(-0.3, 0.4), cd(0.7, -0.1), cd(0.2, -0.5), cd(0.1, 0.3);
  w1 << cd(0.5, -0.2), cd(0.4, 0.6), cd(-0.6, 0.1);
  return {{w0, w1}};
}

inline std::vector<Eigen::MatrixXcd> instance_a_arbitrary_receivers() {
  Eigen::MatrixXcd u0(2, 2), u1(1, 1), u2(2, 1);
  u0 << cd(0.3, -0.2), cd(-0.1, 0.4), cd(0.5, 0.1), cd(0.2, -0.3);
  u1 << cd(0.6, 0.2);
  u2 << cd(-0.2, 0.3), cd(0.4, -0.1);
  return {u0, u1, u2};
}

inline StreamValues instance_a_lambda() {
  return {Eigen::Vector2d(0.7, 1.3), Eigen::VectorXd::Constant(1, 0.4),
          Eigen::VectorXd::Constant(1, 0.9)};
}
inline constexpr double kInstanceAMu = 0.35;

inline StreamValues instance_a_v() {
  return {Eigen::Vector2d(0.6, 0.25), Eigen::VectorXd::Constant(1, 0.2),
          Eigen::VectorXd::Constant(1, 0.35)};
}

/// Single-antenna users, N_T = 2, groups of 2 and 1 users. H_k = h_k^H.
inline Scenario instance_b() {
  Scenario s;
  s.dims.num_tx_antennas = 2;
  s.dims.num_groups = 2;
  s.dims.users_per_group = {2, 1};
  s.dims.rx_antennas_per_user = {1, 1, 1};
  s.dims.streams_per_group = {1, 1};
  Eigen::VectorXcd h0(2), h1(2), h2(2);
  h0 << cd(0.9, -0.4), cd(0.3, 0.8);
  h1 << cd(-0.5, 0.6), cd(1.1, 0.2);
  h2 << cd(0.2, 0.9), cd(-0.8, -0.5);
  s.channels = {h0.adjoint(), h1.adjoint(), h2.adjoint()};
  s.noise_power = {1.0, 1.0, 1.0};
  s.weights = {1.0, 1.0};
  s.power_budget = 1.0;
  s.seed = 5;
  return s;
}

inline TransmitState instance_b_tx() {
  Eigen::MatrixXcd w0(2, 1), w1(2, 1);
  w0 << cd(0.7, 0.2), cd(-0.4, 0.5);
  w1 << cd(0.3, -0.6), cd(0.8, 0.1);
  return {{w0, w1}};
}

inline Eigen::VectorXd instance_b_lambda() { return Eigen::Vector3d(0.8, 0.5, 1.2); }
inline constexpr double kInstanceBMu = 0.3;
inline constexpr double kInstanceBGammaPrev = 0.8;

/// Scalar single-user scenario: N_T = N_k = 1, h = 1.
inline Scenario scalar_scenario(double power_budget, double sigma2 = 1.0) {
  Scenario s;
  s.dims.num_tx_antennas = 1;
  s.dims.num_groups = 1;
  s.dims.users_per_group = {1};
  s.dims.rx_antennas_per_user = {1};
  s.dims.streams_per_group = {1};
  s.channels = {Eigen::MatrixXcd::Constant(1, 1, cd(1.0, 0.0))};
  s.noise_power = {sigma2};
  s.weights = {1.0};
  s.power_budget = power_budget;
  return s;
}

/// Two single-antenna users in two groups, N_T = 1, h_1 = h_2 = 1.
inline Scenario symmetric_scalar_pair(double power_budget) {
  Scenario s;
  s.dims.num_tx_antennas = 1;
  s.dims.num_groups = 2;
  s.dims.users_per_group = {1, 1};
  s.dims.rx_antennas_per_user = {1, 1};
  s.dims.streams_per_group = {1, 1};
  s.channels = {Eigen::MatrixXcd::Constant(1, 1, cd(1.0, 0.0)),
                Eigen::MatrixXcd::Constant(1, 1, cd(1.0, 0.0))};
  s.noise_power = {1.0, 1.0};
  s.weights = {1.0, 1.0};
  s.power_budget = power_budget;
  return s;
}

/// Seeded scenario with equal-sized groups and a common receive antenna count.
inline Scenario random_scenario(int n_tx, int groups, int users_per_group, int n_rx, double p_t_db,
                                std::uint64_t seed) {
  Dimensions d;
  d.num_tx_antennas = n_tx;
  d.num_groups = groups;
  d.users_per_group.assign(groups, users_per_group);
  d.rx_antennas_per_user.assign(groups * users_per_group, n_rx);
  d.set_default_streams();
  return generate_scenario(d, p_t_db, 1.0, {}, seed);
}

inline double max_abs(const StreamValues& a, const StreamValues& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, (a[k] - b[k]).cwiseAbs().maxCoeff());
  return m;
}

}  // namespace wmmf::testing
