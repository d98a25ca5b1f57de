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

#include <rstm/prox.hpp>
#include <rstm/random.hpp>

#include <gtest/gtest.h>

#include <cmath>

namespace rstm {
namespace {

ProxSetup euclid(double beta, std::size_t d = 1) {
  return ProxSetup::uniform(BlockStructure::uniform({d}, {beta}, NormKind::euclidean), ProxKind::euclidean_unconstrained);
}

ProxSetup simplex(double beta, std::size_t d) {
  return ProxSetup::uniform(BlockStructure::uniform({d}, {beta}, NormKind::l1), ProxKind::entropy_simplex);
}

ProxSetup interval(double lo, double hi) {
  const auto s = BlockStructure::uniform({1}, {1}, NormKind::euclidean);
  return ProxSetup(s, {BlockProx::interval(Eigen::VectorXd::Constant(1, lo), Eigen::VectorXd::Constant(1, hi))});
}

BlockPoint pt(const ProxSetup& p, Eigen::VectorXd v) { return BlockPoint(p.structure(), std::move(v)); }

SparseBlockDual g1(const ProxSetup& p, Eigen::VectorXd v) { return dual_embed(p.structure(), 0, std::move(v)); }

TEST(ProxValue, Euclidean) { EXPECT_DOUBLE_EQ(prox_value(euclid(1, 2), pt(euclid(1, 2), Eigen::Vector2d(3, 4))), 12.5); }

TEST(ProxValue, EntropyUniform) {
  const auto p = simplex(1, 2);
  EXPECT_NEAR(prox_value(p, pt(p, Eigen::Vector2d(0.5, 0.5))), std::log(0.5), 1e-15);
}

TEST(ProxValue, EntropyAtVertexUsesZeroLogZero) {
  const auto p = simplex(2, 2);
  EXPECT_EQ(prox_value(p, pt(p, Eigen::Vector2d(1, 0))), 0.0);
  EXPECT_NEAR(prox_value(p, pt(p, Eigen::Vector2d(1 - 1e-300, 1e-300))), 0.0, 1e-290);
}

TEST(ProxValue, RejectsInfeasible) {
  const auto p = simplex(1, 2);
  EXPECT_THROW(prox_value(p, pt(p, Eigen::Vector2d(0.7, 0.7))), std::domain_error);
}

TEST(Bregman, Euclidean) {
  const auto p = euclid(1);
  EXPECT_DOUBLE_EQ(bregman(p, pt(p, Eigen::VectorXd::Constant(1, 0)), pt(p, Eigen::VectorXd::Constant(1, 2))), 2.0);
}

TEST(Bregman, EntropyIsKl) {
  const auto p = simplex(1, 2);
  const double v = bregman(p, pt(p, Eigen::Vector2d(0.5, 0.5)), pt(p, Eigen::Vector2d(1.0 / 3, 2.0 / 3)));
  EXPECT_NEAR(v, 0.056633, 5e-7);
  EXPECT_NEAR(v, (1.0 / 3) * std::log(2.0 / 3) + (2.0 / 3) * std::log(4.0 / 3), 1e-15);
}

TEST(Bregman, ZeroOnDiagonal) {
  Rng r(1);
  const auto p = simplex(3, 4);
  for (int t = 0; t < 20; ++t) {
    Eigen::Vector4d z(r.uniform() + 0.01, r.uniform() + 0.01, r.uniform() + 0.01, r.uniform() + 0.01);
    z /= z.sum();
    EXPECT_NEAR(bregman(p, pt(p, z), pt(p, z)), 0.0, 1e-15);
  }
}

TEST(Bregman, RejectsCentreOnBoundary) {
  const auto p = simplex(1, 2);
  EXPECT_THROW(bregman(p, pt(p, Eigen::Vector2d(1, 0)), pt(p, Eigen::Vector2d(0.5, 0.5))), std::domain_error);
}

TEST(ProxMap, GradientStep) {
  const auto p = euclid(1);
  const auto u = FeasiblePoint::make(p, pt(p, Eigen::VectorXd::Zero(1)));
  EXPECT_DOUBLE_EQ(prox_map(p, u, 1.0, g1(p, Eigen::VectorXd::Constant(1, 3))).point().values()[0], -3.0);
}

TEST(ProxMap, EntropyClosedForm) {
  const auto p = simplex(1, 2);
  const auto u = FeasiblePoint::make(p, pt(p, Eigen::Vector2d(0.5, 0.5)));
  const auto x = prox_map(p, u, 1.0, g1(p, Eigen::Vector2d(std::log(2.0), 0))).point().values();
  EXPECT_NEAR(x[0], 1.0 / 3, 1e-15);
  EXPECT_NEAR(x[1], 2.0 / 3, 1e-15);
}

TEST(ProxMap, EntropyMatchesGridSearch) {
  const auto p = simplex(1, 2);
  const auto u = FeasiblePoint::make(p, pt(p, Eigen::Vector2d(0.5, 0.5)));
  const double a = prox_map(p, u, 1.0, g1(p, Eigen::Vector2d(std::log(2.0), 0))).point().values()[0];
  double best = 0, bv = 1e300;
  for (int i = 1; i < 1000000; ++i) {
    const double t = i * 1e-6;
    const double v = t * std::log(t / 0.5) + (1 - t) * std::log((1 - t) / 0.5) + t * std::log(2.0);
    if (v < bv) {
      bv = v;
      best = t;
    }
  }
  EXPECT_NEAR(a, best, 1e-6);
}

TEST(ProxMap, IntervalClamps) {
  const auto p = interval(0, 1);
  const auto u = FeasiblePoint::make(p, pt(p, Eigen::VectorXd::Constant(1, 0.5)));
  EXPECT_EQ(prox_map(p, u, 1.0, g1(p, Eigen::VectorXd::Constant(1, 3))).point().values()[0], 0.0);
}

TEST(ProxMap, EntropySurvivesHugeSteps) {
  const auto p = simplex(1, 3);
  const auto u = FeasiblePoint::make(p, pt(p, Eigen::Vector3d(1.0 / 3, 1.0 / 3, 1.0 / 3)));
  const auto x = prox_map(p, u, 1e6, g1(p, Eigen::Vector3d(1, 0, 2))).point().values();
  EXPECT_NEAR(x[1], 1.0, 1e-15);
  EXPECT_GT(x[0], 0.0);
  EXPECT_GT(x[2], 0.0);
  EXPECT_TRUE(p.violation(pt(p, x), true).empty());
}

TEST(ProxMap, OffSupportBlocksUnchanged) {
  const auto s = BlockStructure::uniform({1, 2}, {1, 1}, NormKind::euclidean);
  const ProxSetup p = ProxSetup::uniform(s, ProxKind::euclidean_unconstrained);
  const auto u = FeasiblePoint::make(p, BlockPoint(s, Eigen::Vector3d(1, 2, 3)));
  const auto x = prox_map(p, u, 2.0, dual_embed(s, 0, Eigen::VectorXd::Constant(1, 1))).point().values();
  EXPECT_EQ(x, Eigen::Vector3d(-1, 2, 3));
}

TEST(ProxMap, MatrixBlockSolvesMetric) {
  Eigen::Matrix2d B;
  B << 2, 0.5, 0.5, 1;
  const auto s = std::make_shared<const BlockStructure>(std::vector<BlockSpec>{{2, 2.0, NormKind::euclidean_matrix, B}});
  const ProxSetup p(s, {BlockProx::matrix()});
  const auto u = FeasiblePoint::make(p, BlockPoint(s, Eigen::Vector2d(1, 1)));
  const Eigen::Vector2d g(1, -1);
  const auto x = prox_map(p, u, 0.5, dual_embed(s, 0, g)).point().values();
  // stationarity: beta B (x - u) + alpha g = 0
  EXPECT_LT((2.0 * B * (x - Eigen::Vector2d(1, 1)) + 0.5 * g).norm(), 1e-14);
}

TEST(ProxMap, RejectsBadAlphaAndBoundaryCentre) {
  const auto p = euclid(1);
  const auto u = FeasiblePoint::make(p, pt(p, Eigen::VectorXd::Zero(1)));
  EXPECT_THROW(prox_map(p, u, 0.0, g1(p, Eigen::VectorXd::Zero(1))), std::invalid_argument);
  EXPECT_THROW(FeasiblePoint::make(simplex(1, 2), pt(simplex(1, 2), Eigen::Vector2d(1, 0))), std::domain_error);
}

TEST(Setup, NormMustMatchProx) {
  EXPECT_THROW(ProxSetup::uniform(BlockStructure::uniform({2}, {1}, NormKind::euclidean), ProxKind::entropy_simplex),
               std::invalid_argument);
}

}  // namespace
}  // namespace rstm
