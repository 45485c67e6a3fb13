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

#include "wmmf/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wmmf/errors.hpp"
#include "wmmf/rng.hpp"

namespace wmmf {

namespace {

// Column offset of group g's first stream in the stacked beamformer matrix.
std::vector<int> stream_offsets(const Dimensions& dims) {
  std::vector<int> offsets(dims.num_groups + 1, 0);
  for (int g = 0; g < dims.num_groups; ++g)
    offsets[g + 1] = offsets[g] + dims.streams_per_group[g];
  return offsets;
}

void check_shapes(const Scenario& scenario, const TransmitState& tx) {
  const auto& dims = scenario.dims;
  if (static_cast<int>(tx.beamformers.size()) != dims.num_groups)
    throw ValidationError("transmit state must hold one W_g per group");
  for (int g = 0; g < dims.num_groups; ++g) {
    if (tx.beamformers[g].rows() != dims.num_tx_antennas ||
        tx.beamformers[g].cols() != dims.streams_per_group[g]) {
      throw ValidationError("W_" + std::to_string(g) + " must be N_T x L_g");
    }
  }
}

void check_receivers(const Scenario& scenario, const std::vector<Eigen::MatrixXcd>& receivers) {
  const auto& dims = scenario.dims;
  if (static_cast<int>(receivers.size()) != dims.num_users())
    throw ValidationError("expected one receiver matrix per user");
  for (int k = 0; k < dims.num_users(); ++k) {
    if (receivers[k].rows() != dims.rx_antennas_per_user[k] ||
        receivers[k].cols() != dims.streams_per_group[dims.group_of(k)]) {
      throw ValidationError("receiver of user " + std::to_string(k) + " must be N_k x L_g");
    }
  }
}

constexpr double kLog2E = std::numbers::log2e;

}  // namespace

StreamValues make_stream_values(const Dimensions& dims, double fill) {
  StreamValues values;
  values.reserve(dims.num_users());
  for (int k = 0; k < dims.num_users(); ++k)
    values.push_back(Eigen::VectorXd::Constant(dims.streams_per_group[dims.group_of(k)], fill));
  return values;
}

Eigen::MatrixXcd stacked_beamformers(const TransmitState& tx) {
  Eigen::Index rows = tx.beamformers.empty() ? 0 : tx.beamformers.front().rows();
  Eigen::Index cols = 0;
  for (const auto& w : tx.beamformers) cols += w.cols();
  Eigen::MatrixXcd all(rows, cols);
  Eigen::Index c = 0;
  for (const auto& w : tx.beamformers) {
    all.middleCols(c, w.cols()) = w;
    c += w.cols();
  }
  return all;
}

double total_power(const TransmitState& tx) {
  double power = 0.0;
  for (const auto& w : tx.beamformers) power += w.squaredNorm();
  return power;
}

ReceiveState mmse_receivers(const Scenario& scenario, const TransmitState& tx) {
  check_shapes(scenario, tx);
  const auto& dims = scenario.dims;
  const Eigen::MatrixXcd all = stacked_beamformers(tx);
  ReceiveState rx;
  rx.receivers.reserve(dims.num_users());
  for (int k = 0; k < dims.num_users(); ++k) {
    const int g = dims.group_of(k);
    const Eigen::MatrixXcd hw = scenario.channels[k] * all;  // N_k x total streams
    Eigen::MatrixXcd covariance = hw * hw.adjoint();
    covariance.diagonal().array() += scenario.noise_power[k];
    const Eigen::LLT<Eigen::MatrixXcd> llt(covariance);
    rx.receivers.push_back(llt.solve(scenario.channels[k] * tx.beamformers[g]));
  }
  rx.mse = mse(scenario, tx, rx.receivers);
  rx.sinr = sinr(scenario, tx, rx.receivers);
  return rx;
}

StreamValues mse(const Scenario& scenario, const TransmitState& tx,
                 const std::vector<Eigen::MatrixXcd>& receivers) {
  check_shapes(scenario, tx);
  check_receivers(scenario, receivers);
  const auto& dims = scenario.dims;
  const auto offsets = stream_offsets(dims);
  const Eigen::MatrixXcd all = stacked_beamformers(tx);
  StreamValues out = make_stream_values(dims, 0.0);
  for (int k = 0; k < dims.num_users(); ++k) {
    const int g = dims.group_of(k);
    const Eigen::MatrixXcd gains = receivers[k].adjoint() * scenario.channels[k] * all;
    for (int l = 0; l < dims.streams_per_group[g]; ++l) {
      const int self = offsets[g] + l;
      const std::complex<double> desired = gains(l, self);
      const double interference = gains.row(l).squaredNorm() - std::norm(desired);
      out[k](l) = std::norm(1.0 - desired) + std::max(interference, 0.0) +
                  scenario.noise_power[k] * receivers[k].col(l).squaredNorm();
    }
  }
  return out;
}

StreamValues sinr(const Scenario& scenario, const TransmitState& tx,
                  const std::vector<Eigen::MatrixXcd>& receivers) {
  check_shapes(scenario, tx);
  check_receivers(scenario, receivers);
  const auto& dims = scenario.dims;
  const auto offsets = stream_offsets(dims);
  const Eigen::MatrixXcd all = stacked_beamformers(tx);
  StreamValues out = make_stream_values(dims, 0.0);
  for (int k = 0; k < dims.num_users(); ++k) {
    const int g = dims.group_of(k);
    const Eigen::MatrixXcd gains = receivers[k].adjoint() * scenario.channels[k] * all;
    for (int l = 0; l < dims.streams_per_group[g]; ++l) {
      const double noise = scenario.noise_power[k] * receivers[k].col(l).squaredNorm();
      if (noise == 0.0) continue;  // zero receiver
      const double signal = std::norm(gains(l, offsets[g] + l));
      const double interference = std::max(gains.row(l).squaredNorm() - signal, 0.0);
      out[k](l) = signal / (interference + noise);
    }
  }
  return out;
}

TaylorPoint taylor_point(double epsilon) {
  if (!(epsilon > 0.0) || epsilon > 1.0)
    throw DomainError("taylor_point: MSE must lie in (0, 1], got " + std::to_string(epsilon));
  TaylorPoint p;
  p.t_bar = -std::log2(epsilon);
  const double inv_f = std::exp2(-p.t_bar);
  p.a_bar = -std::numbers::ln2 * inv_f;
  p.b_bar = inv_f * (1.0 + p.t_bar * std::numbers::ln2);
  return p;
}

double per_stream_rate(const Scenario& scenario, const StreamValues& mse, const StreamValues& v,
                       int group, int stream) {
  const auto& dims = scenario.dims;
  const int first = dims.first_user(group);
  double mass = 0.0;
  double weighted = 0.0;
  for (int k = first; k < first + dims.users_per_group[group]; ++k) {
    mass += v[k](stream);
    weighted += v[k](stream) * -std::log(mse[k](stream)) * kLog2E;
  }
  if (!(mass > 0.0))
    throw DegenerateDualError("zero dual mass for group " + std::to_string(group) + " stream " +
                              std::to_string(stream));
  return weighted / mass;
}

std::vector<Eigen::VectorXd> stream_rates(const Scenario& scenario, const StreamValues& mse,
                                          const StreamValues& v) {
  const auto& dims = scenario.dims;
  std::vector<Eigen::VectorXd> rates;
  for (int g = 0; g < dims.num_groups; ++g) {
    Eigen::VectorXd r(dims.streams_per_group[g]);
    for (int l = 0; l < r.size(); ++l) r(l) = per_stream_rate(scenario, mse, v, g, l);
    rates.push_back(std::move(r));
  }
  return rates;
}

std::vector<double> achieved_group_rates(const Scenario& scenario, const StreamValues& sinr) {
  const auto& dims = scenario.dims;
  std::vector<double> rates(dims.num_groups, 0.0);
  for (int g = 0; g < dims.num_groups; ++g) {
    const int first = dims.first_user(g);
    double sum = 0.0;
    for (int l = 0; l < dims.streams_per_group[g]; ++l) {
      double weakest = std::numeric_limits<double>::infinity();
      for (int k = first; k < first + dims.users_per_group[g]; ++k)
        weakest = std::min(weakest, std::log1p(sinr[k](l)) * kLog2E);
      sum += weakest;
    }
    rates[g] = scenario.weights[g] * sum;
  }
  return rates;
}

double achieved_objective(const Scenario& scenario, const StreamValues& sinr) {
  const auto rates = achieved_group_rates(scenario, sinr);
  return *std::min_element(rates.begin(), rates.end());
}

TransmitState random_transmit_state(const Scenario& scenario) {
  const auto& dims = scenario.dims;
  GaussianSource source(scenario.seed, RngStream::kInitialBeamformers);
  TransmitState tx;
  for (int g = 0; g < dims.num_groups; ++g) {
    Eigen::MatrixXcd w(dims.num_tx_antennas, dims.streams_per_group[g]);
    for (Eigen::Index c = 0; c < w.cols(); ++c)
      for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = source.complex_normal();
    tx.beamformers.push_back(std::move(w));
  }
  const double scale = std::sqrt(scenario.power_budget / total_power(tx));
  for (auto& w : tx.beamformers) w *= scale;
  return tx;
}

}  // namespace wmmf
