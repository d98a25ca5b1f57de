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

#include <rstm/problems.hpp>

#include <gtest/gtest.h>

#include <cmath>

namespace rstm {
namespace {

TEST(Separable, UnconstrainedOptimum) {
  const auto p = make_separable_quadratic({1, 4}, {1, 1}, Eigen::Vector2d::Zero());
  EXPECT_EQ(p->optimum()->value, 0.0);
  EXPECT_EQ(p->optimum()->point, Eigen::Vector2d::Zero());
  EXPECT_EQ(p->lipschitz(), (std::vector<double>{1, 4}));
}

TEST(Separable, BoxedOptimumIsClamped) {
  const auto p = make_separable_quadratic({1}, {1}, Eigen::VectorXd::Constant(1, 2.0),
                                          std::make_pair(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Ones(1)));
  EXPECT_EQ(p->optimum()->point[0], 1.0);
  EXPECT_DOUBLE_EQ(p->optimum()->value, 0.5);
  EXPECT_EQ(p->feasible_set()[0].kind, ProxKind::euclidean_interval);
}

TEST(Separable, GradientVanishesAtCentre) {
  const Eigen::Vector3d c(1, -2, 0.5);
  const auto p = make_separable_quadratic({1, 2, 3}, {1, 1, 1}, c);
  EXPECT_EQ(p->gradient(Eigen::VectorXd(c)), Eigen::Vector3d::Zero());
}

TEST(Separable, InfiniteBoxBlockIsUnconstrained) {
  const double inf = std::numeric_limits<double>::infinity();
  const auto p = make_separable_quadratic({1, 1}, {1, 1}, Eigen::Vector2d(3, 3),
                                          std::make_pair(Eigen::Vector2d(-inf, 0), Eigen::Vector2d(inf, 1)));
  EXPECT_EQ(p->feasible_set()[0].kind, ProxKind::euclidean_unconstrained);
  EXPECT_EQ(p->feasible_set()[1].kind, ProxKind::euclidean_interval);
}

TEST(Coupled, IdentityReducesToSeparable) {
  const auto p = make_coupled_quadratic(Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero(), {1, 1, 1});
  EXPECT_EQ(p->lipschitz(), (std::vector<double>{1, 1, 1}));
  EXPECT_EQ(p->optimum()->value, 0.0);
}

TEST(Coupled, TwoByTwo) {
  Eigen::Matrix2d A;
  A << 2, 1, 1, 2;
  const auto p = make_coupled_quadratic(A, Eigen::Vector2d(1, 1), {1, 1});
  EXPECT_NEAR(p->optimum()->point[0], 1.0 / 3, 1e-15);
  EXPECT_NEAR(p->optimum()->point[1], 1.0 / 3, 1e-15);
  EXPECT_NEAR(p->optimum()->value, -1.0 / 3, 1e-15);
  EXPECT_NEAR(p->lipschitz()[0], 2.0, 1e-14);
  EXPECT_NEAR(p->lipschitz()[1], 2.0, 1e-14);
  EXPECT_NEAR(p->global_lipschitz(), 3.0, 1e-14);
}

TEST(Coupled, RejectsIndefinite) {
  Eigen::Matrix2d A;
  A << 1, 2, 2, 1;
  EXPECT_THROW(make_coupled_quadratic(A, Eigen::Vector2d::Zero(), {1, 1}), std::invalid_argument);
}

TEST(Simplex, IdentityRecoversFeasibleTarget) {
  const Eigen::VectorXd b = (Eigen::VectorXd(5) << 0.2, 0.3, 0.5, 0.6, 0.4).finished();
  const auto p = make_simplex_quadratic(Eigen::MatrixXd::Identity(5, 5), b, {3, 2});
  EXPECT_LT((p->optimum()->point - b).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_NEAR(p->optimum()->value, 0.0, 1e-15);
  EXPECT_LE(p->optimum()->tolerance, 1e-12);
}

TEST(Simplex, BoundaryOptimumHasSmallGap) {
  Rng r(3);
  Eigen::MatrixXd M(8, 6);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 6; ++j) M(i, j) = r.normal();
  Eigen::VectorXd b(8);
  for (int i = 0; i < 8; ++i) b[i] = 3.0 * r.normal();
  const auto p = make_simplex_quadratic(M, b, {3, 3});
  const auto& o = *p->optimum();
  EXPECT_LE(p->frank_wolfe_gap(o.point), 1e-10);
  EXPECT_GE(o.tolerance, p->frank_wolfe_gap(o.point) - 1e-18);
  for (int j = 0; j < 6; ++j) EXPECT_GE(o.point[j], 0.0);
  EXPECT_NEAR(o.point.head(3).sum(), 1.0, 1e-12);
  EXPECT_NEAR(o.point.tail(3).sum(), 1.0, 1e-12);
}

TEST(Tridiagonal, ClosedFormOptimum) {
  const auto p = make_tridiagonal_quadratic(9, 4.0);
  const auto& o = *p->optimum();
  for (int j = 0; j < 9; ++j) EXPECT_NEAR(o.point[j], 1.0 - (j + 1) / 10.0, 1e-15);
  EXPECT_LT(p->gradient(o.point).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(o.value, -0.5 * 1.0 * o.point[0], 1e-15);
}

TEST(Tridiagonal, BlockConstantsAreTight) {
  const auto p = make_tridiagonal_quadratic(8, 4.0, {4, 4});
  // block of size m: c (2 + 2 cos(pi / (m + 1)))
  EXPECT_NEAR(p->lipschitz()[0], 2.0 + 2.0 * std::cos(M_PI / 5), 1e-12);
  EXPECT_LE(p->global_lipschitz(), 4.0);
}

TEST(NoisyValue, ZeroLevelIsExact) {
  const auto p = make_tridiagonal_quadratic(3, 1.0);
  NoisyValueOracle o(*p, {NoiseKind::uniform, 0.0}, Rng(1));
  const Eigen::Vector3d x(0.1, 0.2, 0.3);
  EXPECT_EQ(o.value(x), p->value(x));
}

TEST(NoisyValue, WithinLevel) {
  const auto p = make_tridiagonal_quadratic(3, 1.0);
  NoisyValueOracle u(*p, {NoiseKind::uniform, 1e-3}, Rng(1));
  NoisyValueOracle a(*p, {NoiseKind::adversarial, 1e-3}, Rng(1));
  const Eigen::Vector3d x(0.1, 0.2, 0.3);
  for (int t = 0; t < 1000; ++t) EXPECT_LE(std::abs(u.value(x) - p->value(x)), 1e-3);
  EXPECT_DOUBLE_EQ(a.value(x, Evaluation::probe) - p->value(x), 1e-3);
  EXPECT_DOUBLE_EQ(a.value(x, Evaluation::base) - p->value(x), -1e-3);
  EXPECT_THROW(u.set_level(-1.0), std::invalid_argument);
}

TEST(GradCheck, PassesOnQuadratic) {
  const auto p = make_separable_quadratic({1, 2, 3}, {1, 1, 1}, Eigen::Vector3d(1, 2, 3));
  EXPECT_TRUE(grad_check(*p, Eigen::Vector3d(0.3, -0.7, 4)).pass);
}

class Linear final : public Problem {
 public:
  explicit Linear(Eigen::VectorXd c, double corrupt = 0.0) : c_(std::move(c)), corrupt_(corrupt) {
    init_blocks(std::vector<std::size_t>(c_.size(), 1),
                std::vector<BlockProx>(c_.size(), BlockProx::unconstrained()));
    lipschitz_.assign(c_.size(), 1.0);
    global_lipschitz_ = 1.0;
  }
  using Problem::gradient;
  using Problem::value;
  std::string name() const override { return "linear"; }
  double value(const Eigen::VectorXd& x) const override { return c_.dot(x); }
  Eigen::VectorXd gradient(const Eigen::VectorXd&) const override {
    Eigen::VectorXd g = c_;
    g[1] += corrupt_;
    return g;
  }

 private:
  Eigen::VectorXd c_;
  double corrupt_;
};

TEST(GradCheck, LinearIsExact) {
  const Linear f(Eigen::Vector3d(1, -2, 0.5));
  const auto r = grad_check(f, Eigen::Vector3d(1, 1, 1));
  EXPECT_TRUE(r.pass);
  EXPECT_LT(r.max_error, 1e-10);
}

TEST(GradCheck, NamesCorruptedCoordinate) {
  const Linear f(Eigen::Vector3d(1, -2, 0.5), 1.0);
  const auto r = grad_check(f, Eigen::Vector3d(1, 1, 1));
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.worst_coordinate, 1u);
  EXPECT_NE(r.message.find("coordinate 1"), std::string::npos);
}

TEST(Audit, LipschitzRatioAtMostOne) {
  Rng r(2);
  Eigen::Matrix3d A;
  A << 3, 1, 0, 1, 2, 0.5, 0, 0.5, 1;
  const auto p = make_coupled_quadratic(A, Eigen::Vector3d(1, 0, -1), {2, 1});
  const double ratio = block_lipschitz_ratio(*p, 2000, r);
  EXPECT_LE(ratio, 1.0 + 1e-12);
  EXPECT_GT(ratio, 0.5);
  EXPECT_LE(block_smoothness_violation(*p, 2000, r), 1e-12);
}

}  // namespace
}  // namespace rstm
