// Copyright 2026 The rstm Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <rstm/rstm.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

namespace rstm {
namespace {

TEST(Coefficients, Initial) {
  EXPECT_EQ(initial_coefficient(2.0), 0.5);
  EXPECT_EQ(initial_coefficient(1.0), 0.0);
  EXPECT_DOUBLE_EQ(initial_coefficient(10.0), 0.9);
  EXPECT_THROW(initial_coefficient(0.5), std::invalid_argument);
}

TEST(Coefficients, FirstSteps) {
  const auto c1 = next_coefficients(0.5, 2.0);
  EXPECT_DOUBLE_EQ(c1.alpha, 0.5);
  EXPECT_DOUBLE_EQ(c1.A, 1.0);
  const auto c2 = next_coefficients(1.0, 2.0);
  EXPECT_NEAR(c2.alpha, (1 + std::sqrt(17.0)) / 8, 1e-15);
  EXPECT_NEAR(c2.alpha, 0.6403882, 1e-7);
  EXPECT_NEAR(c2.A, 1.6403882, 1e-7);
  const auto d = next_coefficients(0.0, 1.0);
  EXPECT_EQ(d.alpha, 1.0);
  EXPECT_EQ(d.A, 1.0);
}

TEST(Coefficients, AlphaOneIsOneOverRho) {
  for (double rho : {1.0, 1.5, 3.0, 50.0}) {
    const auto c = next_coefficients(initial_coefficient(rho), rho);
    EXPECT_NEAR(c.alpha, 1.0 / rho, 1e-15);
    EXPECT_NEAR(c.A, 1.0, 1e-15);
  }
}

TEST(Coefficients, SandwichSmall) {
  for (double rho : {1.0, 2.0, 7.0}) {
    double A = initial_coefficient(rho);
    for (std::size_t k = 1; k <= 500; ++k) {
      A = next_coefficients(A, rho).A;
      const auto [lo, hi] = coefficient_bounds(k, rho);
      EXPECT_LE(lo, A * (1 + 1e-12));
      EXPECT_LE(A, hi * (1 + 1e-12));
    }
  }
}

TEST(Gamma, KnownRows) {
  EXPECT_EQ(gamma_table(0, 3.0).coefficients, std::vector<double>{1.0});
  EXPECT_EQ(gamma_table(1, 3.0).coefficients, (std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(gamma_table(1, 1.0).coefficients, (std::vector<double>{0.0, 1.0}));
  const auto g = gamma_table(5, 3.0).coefficients;
  ASSERT_EQ(g.size(), 6u);
  for (double v : g) EXPECT_GE(v, 0.0);
  EXPECT_NEAR(std::accumulate(g.begin(), g.end(), 0.0), 1.0, 1e-12);
}

TEST(Gamma, RepresentsIterates) {
  // x_k = sum_l gamma_k^l u_l along an actual run
  Rng r(4);
  const auto p = make_separable_quadratic({1, 2, 3, 4}, {1, 1, 1, 1}, Eigen::Vector4d(1, -1, 0.5, 2));
  RunConfig cfg;
  cfg.oracle.variant = OracleVariant::coord;
  cfg.oracle.seed = 9;
  cfg.stop = StopRule::fixed(40);
  std::vector<Eigen::VectorXd> us{default_start(*p)};
  std::vector<Eigen::VectorXd> xs{default_start(*p)};
  solve(p, cfg, [&](const RstmState&, const IterateResult& res) {
    us.push_back(res.state.u.point().values());
    xs.push_back(res.state.x.values());
  });
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const auto g = gamma_table(k, 4.0).coefficients;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(4);
    for (std::size_t l = 0; l <= k; ++l) sum += g[l] * us[l];
    EXPECT_LT((sum - xs[k]).norm(), 1e-10 * (1 + xs[k].norm())) << "k=" << k;
  }
}

TEST(Schedule, DeltaSchedule) {
  EXPECT_DOUBLE_EQ(delta_schedule(1.0, 2.0, 1.0), 0.125);
  EXPECT_DOUBLE_EQ(delta_schedule(1.0, 2.0, 2.0), 0.0625);
  EXPECT_DOUBLE_EQ(delta_schedule(4.0, 10.0, 25.0), 0.004);
  EXPECT_THROW(delta_schedule(0.0, 2.0, 1.0), std::invalid_argument);
}

TEST(Schedule, IterationsForAccuracy) {
  EXPECT_EQ(iterations_for_accuracy(6.0, 1.0, 1.0), 0u);
  EXPECT_EQ(iterations_for_accuracy(0.06, 1.0, 10.0), 81u);
  // quartering epsilon roughly doubles the count
  const double a = double(iterations_for_accuracy(1e-4, 1.0, 10.0));
  const double b = double(iterations_for_accuracy(0.25e-4, 1.0, 10.0));
  EXPECT_NEAR(b / a, 2.0, 0.02);
  EXPECT_THROW(iterations_for_accuracy(0.0, 1.0, 1.0), std::invalid_argument);
}

TEST(Schedule, TheoreticalBound) {
  EXPECT_DOUBLE_EQ(theoretical_bound(3.0, 1.0, 2.0, 0.0, Regime::controlled), 0.5);
  EXPECT_DOUBLE_EQ(theoretical_bound(4.0, 3.0, 2.0, 0.0, Regime::uncontrolled), 2 * 9.0 / 4.0);
  EXPECT_DOUBLE_EQ(theoretical_bound(1.0, 1.0, 2.0, 0.1, Regime::uncontrolled), 2.16);
}

TEST(Solve, ZeroIterationsGivesStartOnly) {
  const auto p = make_tridiagonal_quadratic(6, 2.0);
  RunConfig cfg;
  cfg.oracle.variant = OracleVariant::full;
  cfg.stop = StopRule::fixed(0);
  const Trace t = solve(p, cfg);
  ASSERT_EQ(t.records.size(), 1u);
  EXPECT_EQ(t.records[0].k, 0u);
  EXPECT_EQ(t.x_final, default_start(*p));
}

TEST(Solve, StationaryStartIsFixed) {
  const auto p = make_separable_quadratic({1, 3}, {1, 1}, Eigen::Vector2d(0.5, -1));
  RunConfig cfg;
  cfg.oracle.variant = OracleVariant::block;
  cfg.u0 = Eigen::Vector2d(0.5, -1);
  cfg.stop = StopRule::fixed(25);
  const Trace t = solve(p, cfg);
  EXPECT_EQ(t.records.size(), 26u);
  EXPECT_EQ(t.x_final, Eigen::Vector2d(0.5, -1));
  EXPECT_GT(t.records.back().A, t.records.front().A);
}

TEST(Solve, DeterministicModeMatchesClosedForm) {
  // rho = 1 and A_0 = 0: the first step is u_1 = x_1 = u_0 - grad f(u_0) / L
  const auto p = make_separable_quadratic({2}, {1}, Eigen::VectorXd::Constant(1, 3.0));
  RunConfig cfg;
  cfg.oracle.variant = OracleVariant::full;
  cfg.stop = StopRule::fixed(1);
  const Trace t = solve(p, cfg);
  EXPECT_DOUBLE_EQ(t.x_final[0], 3.0);
  EXPECT_EQ(t.records[1].residual, 0.0);
}

TEST(Solve, AccuracyStopUsesIterationCount) {
  const auto p = make_separable_quadratic({1, 2, 3}, {1, 1, 1}, Eigen::Vector3d(1, 1, 1));
  RunConfig cfg;
  cfg.oracle.variant = OracleVariant::coord;
  cfg.stop = StopRule::accuracy(1e-3);
  const Trace t = solve(p, cfg);
  EXPECT_EQ(t.iterations, iterations_for_accuracy(1e-3, t.P0, 3.0));
  EXPECT_EQ(t.status, "target_accuracy");
}

TEST(Solve, SameSeedSameTrace) {
  const auto p = make_tridiagonal_quadratic(10, 4.0);
  RunConfig cfg;
  cfg.oracle.variant = OracleVariant::coord;
  cfg.oracle.seed = 17;
  cfg.stop = StopRule::fixed(200);
  const Trace a = solve(p, cfg), b = solve(p, cfg);
  EXPECT_EQ(a.x_final, b.x_final);
  cfg.oracle.seed = 18;
  EXPECT_NE(solve(p, cfg).x_final, a.x_final);
}

TEST(Solve, ControlledNeedsP0AndBalancedTau) {
  const auto p = make_tridiagonal_quadratic(4, 1.0);
  RunConfig cfg;
  cfg.oracle.variant = OracleVariant::df_coord;
  cfg.oracle.noise = {NoiseKind::uniform, 1e-6};
  cfg.oracle.tau_policy = TauPolicy::fixed;
  cfg.oracle.tau = 1e-3;
  cfg.regime = Regime::controlled;
  EXPECT_THROW(solve(p, cfg), std::invalid_argument);
}

TEST(Solve, ControlledLevelFollowsSchedule) {
  const auto p = make_tridiagonal_quadratic(5, 2.0);
  RunConfig cfg;
  cfg.oracle.variant = OracleVariant::coord;
  cfg.oracle.noise = {NoiseKind::adversarial, 0.0};
  cfg.regime = Regime::controlled;
  cfg.stop = StopRule::fixed(30);
  const Trace t = solve(p, cfg);
  for (std::size_t k = 1; k < t.records.size(); ++k)
    EXPECT_NEAR(t.records[k].delta, delta_schedule(t.P0, t.rho, t.records[k].A), 1e-15 * t.records[k].delta);
}

TEST(Solve, InitialPotential) {
  // separable, u0 = 0, beta = L: V[u0](x*) = f(u0) - f* when the optimum is interior
  const auto p = make_separable_quadratic({1, 4}, {1, 1}, Eigen::Vector2d(1, 1));
  RunConfig cfg;
  cfg.oracle.variant = OracleVariant::coord;
  cfg.stop = StopRule::fixed(0);
  const Trace t = solve(p, cfg);
  const double gap = 0.5 * 1 + 0.5 * 4;
  EXPECT_NEAR(t.P0 * t.P0, 0.5 * gap + gap, 1e-14);
}

}  // namespace
}  // namespace rstm
