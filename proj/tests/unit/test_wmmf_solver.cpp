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


#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "frozen_values.hpp"
#include "wmmf/errors.hpp"
#include "wmmf/kernels.hpp"
#include "wmmf/power_bisection.hpp"
#include "wmmf/wmmf_solver.hpp"

namespace wmmf {
namespace {

namespace fz = testing::frozen;
using testing::cd;

std::vector<Eigen::MatrixXcd> unit_receiver() { return {Eigen::MatrixXcd::Ones(1, 1)}; }
StreamValues unit_lambda() { return {Eigen::VectorXd::Ones(1)}; }

double normalization_error(const Scenario& s, const StreamValues& v) {
  double worst = 0.0;
  for (int l = 0; l < s.dims.max_streams(); ++l) {
    double sum = 0.0;
    for (int k = 0; k < s.dims.num_users(); ++k)
      if (v[k].size() > l) sum += v[k](l) / s.weights[s.dims.group_of(k)];
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

TEST(PowerBisection, ScalarSolve) {
  RegularizedSystem sys{Eigen::MatrixXcd::Ones(1, 1), Eigen::MatrixXcd::Ones(1, 1)};
  EXPECT_NEAR(solve_regularized(sys, 1.0)(0, 0).real(), 0.5, 1e-15);
}

TEST(PowerBisection, MeetsBudgetAcrossSystems) {
  const Scenario s = testing::random_scenario(4, 2, 2, 2, 10.0, 3);
  const ReceiveState rx = mmse_receivers(s, random_transmit_state(s));
  const RegularizedSystem sys = transmit_system(s, rx.receivers, make_stream_values(s.dims, 0.3));
  const BisectionResult r = bisect_power({sys, sys}, 7.0, {1e-10, 1e-9});
  double p = 0.0;
  for (const auto& x : r.solutions) p += x.squaredNorm();
  EXPECT_NEAR(p, 7.0, 7.0 * 1e-9);
  EXPECT_NEAR(r.power, p, 1e-9);
}

TEST(PowerBisection, NonFiniteInputFails) {
  RegularizedSystem sys{Eigen::MatrixXcd::Ones(1, 1),
                        Eigen::MatrixXcd::Constant(1, 1, cd(std::nan(""), 0.0))};
  EXPECT_THROW(bisect_power({sys}, 1.0, {}), NumericalFailure);
}

TEST(TransmitBeamformer, ScalarClosedForm) {
  const Scenario s = testing::scalar_scenario(1.0);
  const TransmitState tx = transmit_beamformer(s, unit_receiver(), unit_lambda(), 1.0);
  EXPECT_NEAR(tx.beamformers[0](0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(tx.beamformers[0](0, 0).imag(), 0.0, 1e-15);
}

TEST(TransmitBeamformer, MatchesReference) {
  const Scenario s = testing::instance_a();
  const ReceiveState rx = mmse_receivers(s, testing::instance_a_tx());
  const TransmitState tx =
      transmit_beamformer(s, rx.receivers, testing::instance_a_lambda(), testing::kInstanceAMu);
  std::size_t i = 0;
  for (const auto& w : tx.beamformers) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      for (Eigen::Index r = 0; r < w.rows(); ++r, ++i) {
        EXPECT_NEAR(w(r, c).real(), fz::kInstanceATransmit[i][0], 1e-14) << i;
        EXPECT_NEAR(w(r, c).imag(), fz::kInstanceATransmit[i][1], 1e-14) << i;
      }
    }
  }
  EXPECT_EQ(i, fz::kInstanceATransmit.size());
}

TEST(TransmitBeamformer, ShrinksAsMuGrows) {
  const Scenario s = testing::random_scenario(4, 2, 2, 2, 10.0, 8);
  const ReceiveState rx = mmse_receivers(s, random_transmit_state(s));
  const StreamValues lambda = make_stream_values(s.dims, 0.5);
  double prev = std::numeric_limits<double>::infinity();
  for (double mu : {1e-3, 1e-2, 1e-1, 1.0, 10.0, 1e3, 1e6}) {
    const double p = total_power(transmit_beamformer(s, rx.receivers, lambda, mu));
    EXPECT_LT(p, prev);
    prev = p;
  }
  EXPECT_LT(prev, 1e-6);
}

TEST(TransmitBeamformer, SatisfiesStationarity) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Scenario s = testing::random_scenario(5, 2, 2, 2, 10.0, seed);
    const ReceiveState rx = mmse_receivers(s, random_transmit_state(s));
    StreamValues lambda = make_stream_values(s.dims, 0.0);
    for (std::size_t k = 0; k < lambda.size(); ++k)
      for (Eigen::Index l = 0; l < lambda[k].size(); ++l)
        lambda[k](l) = 0.1 + 0.3 * static_cast<double>((k + 2 * l) % 4);
    const double mu = 0.2;
    const TransmitState tx = transmit_beamformer(s, rx.receivers, lambda, mu);
    // Independent assembly of the linear system by explicit rank-1 sums.
    const int n = s.dims.num_tx_antennas;
    Eigen::MatrixXcd a = mu * Eigen::MatrixXcd::Identity(n, n);
    for (int k = 0; k < s.dims.num_users(); ++k)
      for (Eigen::Index l = 0; l < lambda[k].size(); ++l) {
        const Eigen::VectorXcd q = s.channels[k].adjoint() * rx.receivers[k].col(l);
        a += lambda[k](l) * q * q.adjoint();
      }
    for (int g = 0; g < s.dims.num_groups; ++g)
      for (int l = 0; l < s.dims.streams_per_group[g]; ++l) {
        Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
        for (int k = s.dims.first_user(g); k < s.dims.first_user(g) + s.dims.users_per_group[g];
             ++k)
          b += lambda[k](l) * s.channels[k].adjoint() * rx.receivers[k].col(l);
        EXPECT_LT((a * tx.beamformers[g].col(l) - b).norm(), 1e-10);
      }
  }
}

TEST(TransmitBeamformer, AllZeroLambdaIsDegenerate) {
  const Scenario s = testing::instance_a();
  const ReceiveState rx = mmse_receivers(s, testing::instance_a_tx());
  EXPECT_THROW(transmit_beamformer(s, rx.receivers, make_stream_values(s.dims, 0.0), 1.0),
               DegenerateDualError);
}

TEST(BisectMu, ScalarQuarterBudget) {
  const Scenario s = testing::scalar_scenario(0.25);
  SolverConfig c;
  c.bisection_tol = 1e-12;
  const MuSearch r = bisect_mu(s, unit_receiver(), unit_lambda(), c);
  EXPECT_NEAR(r.mu, 1.0, 1e-9);
  EXPECT_NEAR(total_power(r.tx), 0.25, 1e-12);
}

TEST(BisectMu, HugeBudgetPinsMuMin) {
  const Scenario s = testing::scalar_scenario(1e9);
  const MuSearch r = bisect_mu(s, unit_receiver(), unit_lambda());
  EXPECT_EQ(r.mu, SolverConfig{}.mu_min);
  EXPECT_LT(total_power(r.tx), 1e9);
}

TEST(BisectMu, MeetsBudgetOnRandomInstances) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Scenario s = testing::random_scenario(6, 3, 2, 2, 10.0, seed);
    const ReceiveState rx = mmse_receivers(s, random_transmit_state(s));
    const MuSearch r = bisect_mu(s, rx.receivers, make_stream_values(s.dims, 1.0 / 6.0));
    const double p = total_power(r.tx);
    if (r.mu > SolverConfig{}.mu_min) {
      EXPECT_LT(std::abs(p - s.power_budget) / s.power_budget, 1e-6);
    }
    EXPECT_LE(p, s.power_budget * (1.0 + 1e-8));
  }
}

TEST(BisectMu, OptimumDiagnostic) {
  const Scenario s = testing::instance_a();
  const auto u = testing::instance_a_arbitrary_receivers();
  const StreamValues lambda = testing::instance_a_lambda();
  double expected = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k)
    for (Eigen::Index l = 0; l < lambda[k].size(); ++l)
      expected += lambda[k](l) * u[k].col(l).squaredNorm();
  EXPECT_NEAR(mu_at_optimum(s, u, lambda), expected / s.power_budget, 1e-15);
}

TEST(Rates, CommonRateAndGradientMatchReference) {
  const Scenario s = testing::instance_a();
  const ReceiveState rx = mmse_receivers(s, testing::instance_a_tx());
  const StreamValues v = testing::instance_a_v();
  const double rc = common_rate(s, rx.mse, v);
  EXPECT_NEAR(rc, fz::kInstanceACommonRate, 1e-14);
  const StreamValues g = subgradient(s, rc, stream_rates(s, rx.mse, v), rx.mse);
  EXPECT_NEAR(g[0](0), fz::kInstanceAGradient[0], 1e-14);
  EXPECT_NEAR(g[0](1), fz::kInstanceAGradient[1], 1e-14);
  EXPECT_NEAR(g[1](0), fz::kInstanceAGradient[2], 1e-14);
  EXPECT_NEAR(g[2](0), fz::kInstanceAGradient[3], 1e-14);
}

TEST(Rates, BalancedPointHasZeroGradient) {
  const Scenario s = testing::scalar_scenario(1.0);
  const StreamValues eps{Eigen::VectorXd::Constant(1, 0.25)};
  const StreamValues g = subgradient(s, 2.0, {Eigen::VectorXd::Constant(1, 2.0)}, eps);
  EXPECT_NEAR(g[0](0), 0.0, 1e-15);
}

TEST(Rates, UnitMseGivesZeroCommonRate) {
  const Scenario s = testing::instance_a();
  EXPECT_EQ(common_rate(s, make_stream_values(s.dims, 1.0), testing::instance_a_v()), 0.0);
}

TEST(Rates, EmptyGroupMassUsesWeakestUser) {
  const Scenario s = testing::instance_a();
  StreamValues eps = make_stream_values(s.dims, 0.5);
  eps[2](0) = 0.25;
  StreamValues v = make_stream_values(s.dims, 1.0);
  v[1](0) = 0.0;
  v[2](0) = 0.0;
  const auto r = solver_stream_rates(s, eps, v);
  EXPECT_DOUBLE_EQ(r[1](0), 1.0);
  EXPECT_DOUBLE_EQ(r[0](0), 1.0);
}

Scenario two_user_group() {
  Scenario s = testing::symmetric_scalar_pair(1.0);
  s.dims.num_groups = 1;
  s.dims.users_per_group = {2};
  s.dims.streams_per_group = {1};
  s.weights = {1.0};
  return s;
}

TEST(DualUpdate, StepBeforeNormalization) {
  const Scenario s = two_user_group();
  const StreamValues v{Eigen::VectorXd::Constant(1, 0.5), Eigen::VectorXd::Constant(1, 0.5)};
  const StreamValues g{Eigen::VectorXd::Constant(1, -0.2), Eigen::VectorXd::Constant(1, 0.0)};
  const StreamValues next = update_duals(s, v, g, 0.01);
  EXPECT_NEAR(next[0](0), 0.498 / 0.998, 1e-15);
  EXPECT_NEAR(next[1](0), 0.5 / 0.998, 1e-15);
}

TEST(DualUpdate, ClampsNegative) {
  const Scenario s = two_user_group();
  const StreamValues v{Eigen::VectorXd::Constant(1, 0.5), Eigen::VectorXd::Constant(1, 0.5)};
  const StreamValues g{Eigen::VectorXd::Constant(1, -100.0), Eigen::VectorXd::Constant(1, 0.0)};
  const StreamValues next = update_duals(s, v, g, 0.01);
  EXPECT_EQ(next[0](0), 0.0);
  EXPECT_DOUBLE_EQ(next[1](0), 1.0);
}

TEST(DualUpdate, NormalizationHoldsPerStream) {
  const Scenario s = testing::instance_a();
  const ReceiveState rx = mmse_receivers(s, testing::instance_a_tx());
  const StreamValues v = testing::instance_a_v();
  const double rc = common_rate(s, rx.mse, v);
  const StreamValues g = subgradient(s, rc, stream_rates(s, rx.mse, v), rx.mse);
  for (double beta : {1e-3, 1e-2, 0.5}) {
    const StreamValues next = update_duals(s, v, g, beta);
    EXPECT_LT(normalization_error(s, next), 1e-12);
    for (const auto& x : next) EXPECT_TRUE((x.array() >= 0.0).all());
  }
}

TEST(DualUpdate, ZeroNormalizerResetsStream) {
  const Scenario s = testing::instance_a();
  const StreamValues v = make_stream_values(s.dims, 0.1);
  StreamValues g = make_stream_values(s.dims, 0.0);
  g[0](1) = -1e3;
  const StreamValues next = update_duals(s, v, g, 1.0);
  EXPECT_DOUBLE_EQ(next[0](1), 1.0);
  EXPECT_NEAR(next[1](0) / next[0](0), 1.0, 1e-15);
  EXPECT_LT(normalization_error(s, next), 1e-12);
}

TEST(DualUpdate, LambdaIsVOverMse) {
  const StreamValues v{Eigen::Vector2d(0.2, 0.4)};
  const StreamValues e{Eigen::Vector2d(0.5, 0.8)};
  const StreamValues lambda = mse_duals(v, e);
  EXPECT_DOUBLE_EQ(lambda[0](0), 0.4);
  EXPECT_DOUBLE_EQ(lambda[0](1), 0.5);
}

TEST(Duals, ZetaFromV) {
  const Scenario s = testing::instance_a();
  DualState d;
  d.v = testing::instance_a_v();
  const Eigen::VectorXd z = d.zeta(s);
  EXPECT_NEAR(z(0), (0.6 + 0.25) / (1.0 * 2.0), 1e-15);
  EXPECT_NEAR(z(1), (0.2 + 0.35) / (1.5 * 1.0), 1e-15);
}

TEST(SolverConfig, RejectsInvalid) {
  SolverConfig c;
  EXPECT_NO_THROW(c.validate());
  c.step_size = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.inner_iters = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.outer_iters = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.mu_min = -1.0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = {};
  c.convergence_tol = 0.0;
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Solve, SingleUserCapacity) {
  const WmmfResult r = solve(testing::scalar_scenario(1.0));
  EXPECT_NEAR(r.common_rate, 1.0, 1e-6);
  EXPECT_NEAR(r.objective, 1.0, 1e-6);
  EXPECT_NEAR(r.power, 1.0, 1e-8);
  EXPECT_TRUE(r.converged);
}

TEST(Solve, SymmetricPairSplitsPower) {
  const WmmfResult r = solve(testing::symmetric_scalar_pair(2.0));
  EXPECT_NEAR(r.objective, std::log2(1.5), 0.02 * std::log2(1.5));
}

TEST(Solve, IterateInvariants) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Scenario s = testing::random_scenario(6, 2, 2, 2, 10.0, seed);
    const WmmfResult r = solve(s);
    ASSERT_FALSE(r.trace.inner.empty());
    for (const auto& rec : r.trace.inner) {
      EXPECT_LE(rec.power, s.power_budget * (1.0 + SolverConfig{}.bisection_tol));
      EXPECT_LT(rec.stationarity, 1e-8);
      EXPECT_LT(rec.constraint_violation, 1e-8);
    }
    for (std::size_t i = 1; i < r.trace.outer.size(); ++i)
      EXPECT_GE(r.trace.outer[i].best_achieved, r.trace.outer[i - 1].best_achieved);
    EXPECT_LT(normalization_error(s, r.duals.v), 1e-12);
    EXPECT_LT(testing::max_abs(r.duals.lambda, mse_duals(r.duals.v, r.design_mse)), 1e-12);
    EXPECT_NEAR(r.objective, achieved_objective(s, mmse_receivers(s, r.tx).sinr), 1e-12);
  }
}

TEST(Solve, Deterministic) {
  const Scenario s = testing::random_scenario(4, 2, 2, 2, 10.0, 21);
  const WmmfResult a = solve(s), b = solve(s);
  EXPECT_EQ(a.objective, b.objective);
  EXPECT_EQ(a.common_rate, b.common_rate);
  EXPECT_EQ(a.inner_iterations, b.inner_iterations);
}

TEST(Solve, NoOverReportingWhenConverged) {
  int converged = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Scenario s = testing::random_scenario(4, 2, 2, 2, 10.0, seed);
    const WmmfResult r = solve(s);
    if (!r.converged) continue;
    ++converged;
    EXPECT_LE(r.common_rate, r.objective + 1e-3) << "seed " << seed;
  }
  EXPECT_GT(converged, 0);
}

TEST(Solve, WeightScaling) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Scenario s = testing::random_scenario(4, 2, 2, 1, 10.0, seed);
    const double base = solve(s).objective;
    for (auto& w : s.weights) w *= 2.0;
    const double scaled = solve(s).objective;
    EXPECT_NEAR(scaled / base, 2.0, 0.1) << "seed " << seed;
  }
}

TEST(Solve, CommonRateGrowsWithPower) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    double prev = -1.0;
    for (double p_t_db : {0.0, 5.0, 10.0, 15.0}) {
      const WmmfResult r = solve(testing::random_scenario(6, 2, 2, 2, p_t_db, seed));
      EXPECT_GE(r.common_rate, prev - 1e-3) << "seed " << seed << " P_T " << p_t_db;
      prev = r.common_rate;
    }
  }
}

TEST(Solve, TraceCsvHasOneRowPerInnerIteration) {
  const WmmfResult r = solve(testing::random_scenario(4, 2, 1, 2, 5.0, 2));
  const std::string csv = r.trace.to_csv();
  const auto lines = std::count(csv.begin(), csv.end(), '\n');
  EXPECT_EQ(static_cast<std::size_t>(lines), r.trace.inner.size() + 1);
  EXPECT_EQ(csv.rfind("outer,inner,common_rate", 0), 0u);
}

}  // namespace
}  // namespace wmmf
