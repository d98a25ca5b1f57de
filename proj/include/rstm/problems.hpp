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

#ifndef RSTM_PROBLEMS_HPP
#define RSTM_PROBLEMS_HPP

#include <rstm/method.hpp>
#include <rstm/random.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rstm {

struct Optimum {
  double value = 0.0;
  Eigen::VectorXd point;
  /// Upper bound on value - f_* (0 for closed-form optima).
  double tolerance = 0.0;
};

/// Smooth convex objective on a block-structured domain.
///
/// Evaluations accept points carrying any structure with matching
/// dimensions; the structure only decides the weights used by norms.
/// Formulas extend to all of R^p, so points near (not in) Q are fine.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::string name() const = 0;
  virtual double value(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd gradient(const Eigen::VectorXd& x) const = 0;
  virtual Eigen::VectorXd block_gradient(std::size_t i, const Eigen::VectorXd& x) const {
    return gradient(x).segment(static_cast<Eigen::Index>(offsets_[i]), static_cast<Eigen::Index>(dims_[i]));
  }
  /// f(x) - f_*; overridden where a cancellation-free form exists.
  virtual double suboptimality(const Eigen::VectorXd& x) const {
    if (!optimum_) return std::numeric_limits<double>::quiet_NaN();
    return value(x) - optimum_->value;
  }

  double value(const BlockPoint& x) const { return value(checked(x)); }
  BlockDual gradient(const BlockPoint& x) const { return BlockDual(x.structure(), gradient(checked(x))); }
  Eigen::VectorXd block_gradient(std::size_t i, const BlockPoint& x) const {
    x.structure()->spec(i);
    return block_gradient(i, checked(x));
  }
  double directional_derivative(const BlockPoint& x, const BlockPoint& e) const { return pairing(gradient(x), e); }
  double suboptimality(const BlockPoint& x) const { return suboptimality(checked(x)); }

  std::size_t num_blocks() const { return dims_.size(); }
  std::size_t total_dim() const { return offsets_.back(); }
  const std::vector<std::size_t>& dims() const { return dims_; }
  /// Block-wise Lipschitz constants L_i of U_i^T grad f w.r.t. the block norms.
  const std::vector<double>& lipschitz() const { return lipschitz_; }
  /// Lipschitz constant of grad f w.r.t. the plain Euclidean norm.
  double global_lipschitz() const { return global_lipschitz_; }
  const std::vector<BlockProx>& feasible_set() const { return feasible_; }
  const std::optional<Optimum>& optimum() const { return optimum_; }

  /// Structure with beta_i = L_i and block norms matching the feasible set.
  StructurePtr structure() const { return make_structure(lipschitz_); }
  /// Structure with every beta_i equal to the global constant.
  StructurePtr uniform_structure() const {
    return make_structure(std::vector<double>(dims_.size(), global_lipschitz_));
  }
  ProxSetup setup() const { return ProxSetup(structure(), feasible_); }
  ProxSetup setup(StructurePtr s) const { return ProxSetup(std::move(s), feasible_); }

  BlockPoint point(const StructurePtr& s, Eigen::VectorXd v) const { return BlockPoint(s, std::move(v)); }

 protected:
  void init_blocks(std::vector<std::size_t> dims, std::vector<BlockProx> feasible) {
    if (dims.empty()) throw std::invalid_argument("problem needs at least one block");
    if (feasible.size() != dims.size()) throw std::invalid_argument("feasible set does not match block count");
    dims_ = std::move(dims);
    feasible_ = std::move(feasible);
    offsets_.assign(1, 0);
    for (auto d : dims_) {
      if (d == 0) throw std::invalid_argument("block dimension must be positive");
      offsets_.push_back(offsets_.back() + d);
    }
  }

  Eigen::Index offset(std::size_t i) const { return static_cast<Eigen::Index>(offsets_[i]); }
  Eigen::Index dim(std::size_t i) const { return static_cast<Eigen::Index>(dims_[i]); }

  std::vector<std::size_t> dims_;
  std::vector<std::size_t> offsets_;
  std::vector<double> lipschitz_;
  double global_lipschitz_ = 0.0;
  std::vector<BlockProx> feasible_;
  std::optional<Optimum> optimum_;

 private:
  const Eigen::VectorXd& checked(const BlockPoint& x) const {
    if (x.size() != total_dim())
      throw std::invalid_argument(name() + ": point has dimension " + std::to_string(x.size()) + ", expected " +
                                  std::to_string(total_dim()));
    return x.values();
  }

  StructurePtr make_structure(const std::vector<double>& weights) const {
    std::vector<BlockSpec> specs;
    for (std::size_t i = 0; i < dims_.size(); ++i) specs.push_back({dims_[i], weights[i], norm_for(feasible_[i].kind), {}});
    return std::make_shared<const BlockStructure>(std::move(specs));
  }
};

using ProblemPtr = std::shared_ptr<const Problem>;

namespace detail {

inline double lambda_max(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

inline std::vector<std::size_t> offsets_of(const std::vector<std::size_t>& dims) {
  std::vector<std::size_t> off{0};
  for (auto d : dims) off.push_back(off.back() + d);
  return off;
}

}  // namespace detail

/// f(x) = 0.5 sum_i L_i ||x^(i) - c^(i)||^2 on R^p or on a box.
///
/// A block whose box bounds are all infinite is treated as unconstrained.
class SeparableQuadratic final : public Problem {
 public:
  SeparableQuadratic(std::vector<double> L, std::vector<std::size_t> dims, Eigen::VectorXd centre,
                     std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> box = std::nullopt)
      : c_(std::move(centre)) {
    if (L.size() != dims.size()) throw std::invalid_argument("separable quadratic: L and dims differ in length");
    for (double l : L)
      if (!(l > 0.0)) throw std::invalid_argument("separable quadratic: L_i must be positive");
    std::vector<BlockProx> feasible;
    const auto off = detail::offsets_of(dims);
    if (static_cast<std::size_t>(c_.size()) != off.back())
      throw std::invalid_argument("separable quadratic: centre has wrong dimension");
    Eigen::VectorXd xs = c_;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (box) {
        const auto o = static_cast<Eigen::Index>(off[i]);
        const auto d = static_cast<Eigen::Index>(dims[i]);
        if (box->first.size() != c_.size() || box->second.size() != c_.size())
          throw std::invalid_argument("separable quadratic: box bounds have wrong dimension");
        const Eigen::VectorXd lo = box->first.segment(o, d), hi = box->second.segment(o, d);
        const double inf = std::numeric_limits<double>::infinity();
        if ((lo.array() == -inf).all() && (hi.array() == inf).all())
          feasible.push_back(BlockProx::unconstrained());
        else
          feasible.push_back(BlockProx::interval(lo, hi));
      } else {
        feasible.push_back(BlockProx::unconstrained());
      }
    }
    init_blocks(std::move(dims), std::move(feasible));
    if (box) xs = c_.cwiseMax(box->first).cwiseMin(box->second);
    weights_ = Eigen::VectorXd(c_.size());
    for (std::size_t i = 0; i < dims_.size(); ++i) weights_.segment(offset(i), dim(i)).setConstant(L[i]);
    lipschitz_ = std::move(L);
    global_lipschitz_ = *std::max_element(lipschitz_.begin(), lipschitz_.end());
    optimum_ = Optimum{value(xs), xs, 0.0};
  }

  using Problem::block_gradient;
  using Problem::gradient;
  using Problem::suboptimality;
  using Problem::value;

  std::string name() const override { return "separable_quadratic"; }
  double value(const Eigen::VectorXd& x) const override {
    double total = 0.0;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const double d = x[j] - c_[j];
      total += weights_[j] * d * d;
    }
    return 0.5 * total;
  }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override { return weights_.cwiseProduct(x - c_); }
  Eigen::VectorXd block_gradient(std::size_t i, const Eigen::VectorXd& x) const override {
    return lipschitz_[i] * (x.segment(offset(i), dim(i)) - c_.segment(offset(i), dim(i)));
  }
  double suboptimality(const Eigen::VectorXd& x) const override {
    // exact for the box case too: f is separable per coordinate
    double total = 0.0;
    const auto& xs = optimum_->point;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const double a = x[j] - c_[j];
      const double b = xs[j] - c_[j];
      total += weights_[j] * (a - b) * (a + b);
    }
    return 0.5 * total;
  }

  const Eigen::VectorXd& centre() const { return c_; }

 private:
  Eigen::VectorXd c_;
  Eigen::VectorXd weights_;
};

/// f(x) = 0.5 x^T A x - b^T x, A symmetric positive definite, unconstrained.
class CoupledQuadratic final : public Problem {
 public:
  CoupledQuadratic(Eigen::MatrixXd A, Eigen::VectorXd b, std::vector<std::size_t> dims)
      : A_(std::move(A)), b_(std::move(b)) {
    if (A_.rows() != A_.cols() || A_.rows() != b_.size())
      throw std::invalid_argument("coupled quadratic: A must be square and match b");
    if (!A_.isApprox(A_.transpose(), 1e-14) && (A_ - A_.transpose()).norm() != 0.0)
      throw std::invalid_argument("coupled quadratic: A is not symmetric");
    const auto off = detail::offsets_of(dims);
    if (off.back() != static_cast<std::size_t>(b_.size()))
      throw std::invalid_argument("coupled quadratic: block dims do not sum to the matrix size");
    Eigen::LLT<Eigen::MatrixXd> llt(A_);
    if (llt.info() != Eigen::Success) throw std::invalid_argument("coupled quadratic: A is not positive definite");
    init_blocks(dims, std::vector<BlockProx>(dims.size(), BlockProx::unconstrained()));
    for (std::size_t i = 0; i < dims_.size(); ++i)
      lipschitz_.push_back(detail::lambda_max(A_.block(offset(i), offset(i), dim(i), dim(i))));
    global_lipschitz_ = detail::lambda_max(A_);
    Eigen::VectorXd xs = llt.solve(b_);
    optimum_ = Optimum{-0.5 * b_.dot(xs), xs, 0.0};
  }

  using Problem::block_gradient;
  using Problem::gradient;
  using Problem::suboptimality;
  using Problem::value;

  std::string name() const override { return "coupled_quadratic"; }
  double value(const Eigen::VectorXd& x) const override { return 0.5 * x.dot(A_ * x) - b_.dot(x); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override { return A_ * x - b_; }
  Eigen::VectorXd block_gradient(std::size_t i, const Eigen::VectorXd& x) const override {
    return A_.middleRows(offset(i), dim(i)) * x - b_.segment(offset(i), dim(i));
  }
  double suboptimality(const Eigen::VectorXd& x) const override {
    const Eigen::VectorXd d = x - optimum_->point;
    return 0.5 * d.dot(A_ * d);
  }

  const Eigen::MatrixXd& matrix() const { return A_; }
  const Eigen::VectorXd& rhs() const { return b_; }

 private:
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
};

struct ReferenceSolveOptions {
  double gap_tolerance = 1e-13;
  std::size_t max_iterations = 200'000;
  /// Iteration at which an active-set polish is first attempted.
  std::size_t polish_after = 2'000;
  /// Stop once the best gap has not halved within max(stall_window, k_best) iterations.
  std::size_t stall_window = 20'000;
};

/// f(x) = 0.5 ||M x - b||^2 on a product of standard simplexes.
///
/// The optimum has no closed form; it is computed once at construction by a
/// deterministic run (rho = 1, exact gradient, entropy prox) followed by an
/// active-set polish, and stored with its Frank-Wolfe gap, which bounds
/// f(x) - f_* from above.
class SimplexQuadratic final : public Problem {
 public:
  SimplexQuadratic(Eigen::MatrixXd M, Eigen::VectorXd b, std::vector<std::size_t> dims,
                   ReferenceSolveOptions opts = {})
      : M_(std::move(M)), b_(std::move(b)) {
    if (M_.rows() != b_.size()) throw std::invalid_argument("simplex quadratic: M rows must match b");
    const auto off = detail::offsets_of(dims);
    if (off.back() != static_cast<std::size_t>(M_.cols()))
      throw std::invalid_argument("simplex quadratic: block dims do not sum to the column count");
    init_blocks(dims, std::vector<BlockProx>(dims.size(), BlockProx::simplex()));
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      const Eigen::MatrixXd Mi = M_.middleCols(offset(i), dim(i));
      const double l = detail::lambda_max(Mi.transpose() * Mi);
      if (!(l > 0.0)) throw std::invalid_argument("simplex quadratic: block " + std::to_string(i) + " has zero columns");
      lipschitz_.push_back(l);
    }
    global_lipschitz_ = detail::lambda_max(M_.transpose() * M_);
    solve_reference(opts);
  }

  using Problem::block_gradient;
  using Problem::gradient;
  using Problem::suboptimality;
  using Problem::value;

  std::string name() const override { return "simplex_quadratic"; }
  double value(const Eigen::VectorXd& x) const override { return 0.5 * (M_ * x - b_).squaredNorm(); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override { return M_.transpose() * (M_ * x - b_); }
  Eigen::VectorXd block_gradient(std::size_t i, const Eigen::VectorXd& x) const override {
    return M_.middleCols(offset(i), dim(i)).transpose() * (M_ * x - b_);
  }

  /// sum_i ( <g_i, x_i> - min_j [g_i]_j ), an upper bound on f(x) - f_* on Q.
  double frank_wolfe_gap(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd g = gradient(x);
    double gap = 0.0;
    for (std::size_t i = 0; i < dims_.size(); ++i) {
      const auto gi = g.segment(offset(i), dim(i));
      gap += gi.dot(x.segment(offset(i), dim(i))) - gi.minCoeff();
    }
    return gap;
  }

  const Eigen::MatrixXd& matrix() const { return M_; }
  const Eigen::VectorXd& rhs() const { return b_; }

 private:
  Eigen::VectorXd normalized(Eigen::VectorXd x) const {
    x = x.cwiseMax(0.0);
    for (std::size_t i = 0; i < dims_.size(); ++i) x.segment(offset(i), dim(i)) /= x.segment(offset(i), dim(i)).sum();
    return x;
  }

  void solve_reference(const ReferenceSolveOptions& opts) {
    // global weights: the full gradient step needs smoothness along arbitrary moves
    const ProxSetup prox = setup(uniform_structure());
    const auto s = prox.structure();
    Eigen::VectorXd u0(static_cast<Eigen::Index>(total_dim()));
    for (std::size_t i = 0; i < dims_.size(); ++i) u0.segment(offset(i), dim(i)).setConstant(1.0 / double(dims_[i]));
    RstmState st = init_state(1.0, FeasiblePoint::make(prox, BlockPoint(s, u0)));
    Eigen::VectorXd best = u0;
    double best_gap = frank_wolfe_gap(u0);
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < opts.max_iterations && best_gap > opts.gap_tolerance; ++k) {
      if (k - best_k > std::max(opts.stall_window, best_k)) break;
      st = advance(st, prox, [&](const BlockPoint& y) { return SparseBlockDual::from_dense(Problem::gradient(y)); });
      // clip rounding excursions so the gap is measured on Q itself
      Eigen::VectorXd x = normalized(st.x.values());
      const double gap = frank_wolfe_gap(x);
      if (gap < best_gap) {
        if (gap < 0.5 * best_gap) best_k = k;
        best_gap = gap;
        best = x;
      }
      if (k + 1 == opts.polish_after) {
        polish(best, best_gap);
        if (best_gap <= opts.gap_tolerance) break;
      }
    }
    polish(best, best_gap);
    optimum_ = Optimum{value(best), best, std::max(best_gap, 0.0)};
  }

  // Active-set refinement: solve the equality-constrained problem on the
  // current support, then add or drop coordinates. Kept only if the gap drops.
  void polish(Eigen::VectorXd& best, double& best_gap) const {
    const auto p = static_cast<Eigen::Index>(total_dim());
    const auto nb = static_cast<Eigen::Index>(dims_.size());
    std::vector<bool> active(static_cast<std::size_t>(p));
    const double thresh = 1e-9;
    for (Eigen::Index j = 0; j < p; ++j) active[j] = best[j] > thresh;
    const Eigen::MatrixXd H = M_.transpose() * M_;
    const Eigen::VectorXd c = M_.transpose() * b_;
    for (Eigen::Index round = 0; round < 2 * p + 2; ++round) {
      std::vector<Eigen::Index> idx;
      std::vector<Eigen::Index> owner;
      for (std::size_t i = 0; i < dims_.size(); ++i)
        for (Eigen::Index j = offset(i); j < offset(i) + dim(i); ++j)
          if (active[j]) {
            idx.push_back(j);
            owner.push_back(static_cast<Eigen::Index>(i));
          }
      const auto m = static_cast<Eigen::Index>(idx.size());
      Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m + nb, m + nb);
      Eigen::VectorXd rhs(m + nb);
      for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = 0; b < m; ++b) K(a, b) = H(idx[a], idx[b]);
        K(a, m + owner[a]) = K(m + owner[a], a) = 1.0;
        rhs[a] = c[idx[a]];
      }
      rhs.tail(nb).setOnes();
      const Eigen::VectorXd sol = K.completeOrthogonalDecomposition().solve(rhs);
      Eigen::VectorXd x = Eigen::VectorXd::Zero(p);
      for (Eigen::Index a = 0; a < m; ++a) x[idx[a]] = sol[a];
      if (x.minCoeff() < 0.0) {
        bool dropped = false;
        for (Eigen::Index a = 0; a < m; ++a)
          if (sol[a] < 0.0) {
            active[idx[a]] = false;
            dropped = true;
          }
        if (!dropped) return;
        continue;
      }
      x = normalized(x);
      const double gap = frank_wolfe_gap(x);
      if (gap < best_gap) {
        best_gap = gap;
        best = x;
      }
      // add the most attractive inactive coordinate, if any
      const Eigen::VectorXd g = gradient(x);
      double worst = 0.0;
      Eigen::Index add = -1;
      for (std::size_t i = 0; i < dims_.size(); ++i) {
        double level = std::numeric_limits<double>::infinity();
        for (Eigen::Index j = offset(i); j < offset(i) + dim(i); ++j)
          if (active[j]) level = std::min(level, g[j]);
        for (Eigen::Index j = offset(i); j < offset(i) + dim(i); ++j)
          if (!active[j] && g[j] - level < worst) {
            worst = g[j] - level;
            add = j;
          }
      }
      if (add < 0) return;
      active[add] = true;
    }
  }

  Eigen::MatrixXd M_;
  Eigen::VectorXd b_;
};

inline std::shared_ptr<SeparableQuadratic> make_separable_quadratic(
    std::vector<double> L, std::vector<std::size_t> dims, Eigen::VectorXd centre,
    std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> box = std::nullopt) {
  return std::make_shared<SeparableQuadratic>(std::move(L), std::move(dims), std::move(centre), std::move(box));
}

inline std::shared_ptr<CoupledQuadratic> make_coupled_quadratic(Eigen::MatrixXd A, Eigen::VectorXd b,
                                                                std::vector<std::size_t> dims) {
  return std::make_shared<CoupledQuadratic>(std::move(A), std::move(b), std::move(dims));
}

inline std::shared_ptr<SimplexQuadratic> make_simplex_quadratic(Eigen::MatrixXd M, Eigen::VectorXd b,
                                                                std::vector<std::size_t> dims,
                                                                ReferenceSolveOptions opts = {}) {
  return std::make_shared<SimplexQuadratic>(std::move(M), std::move(b), std::move(dims), opts);
}

/// Worst-case coupled quadratic f(x) = (L/4)(0.5 x^T T x - x_1), T = tridiag(-1, 2, -1).
///
/// Stored as a stencil, so values and gradients cost O(p). The minimizer is
/// x_*^(j) = 1 - (j + 1) / (p + 1) (0-based j).
class TridiagonalQuadratic final : public Problem {
 public:
  TridiagonalQuadratic(std::size_t dim, double L, std::vector<std::size_t> dims = {}) : c_(L / 4.0) {
    if (dim == 0) throw std::invalid_argument("tridiagonal quadratic: dimension must be positive");
    if (!(L > 0.0)) throw std::invalid_argument("tridiagonal quadratic: L must be positive");
    if (dims.empty()) dims.assign(dim, 1);
    if (detail::offsets_of(dims).back() != dim)
      throw std::invalid_argument("tridiagonal quadratic: block dims do not sum to the dimension");
    init_blocks(dims, std::vector<BlockProx>(dims.size(), BlockProx::unconstrained()));
    const double pi = std::acos(-1.0);
    auto top = [&](std::size_t m) { return c_ * (2.0 + 2.0 * std::cos(pi / double(m + 1))); };
    for (auto m : dims_) lipschitz_.push_back(top(m));
    global_lipschitz_ = top(dim);
    Eigen::VectorXd xs(static_cast<Eigen::Index>(dim));
    for (Eigen::Index j = 0; j < xs.size(); ++j) xs[j] = 1.0 - double(j + 1) / double(dim + 1);
    optimum_ = Optimum{-0.5 * c_ * xs[0], xs, 0.0};
  }

  using Problem::block_gradient;
  using Problem::gradient;
  using Problem::suboptimality;
  using Problem::value;

  std::string name() const override { return "tridiagonal_quadratic"; }
  double value(const Eigen::VectorXd& x) const override { return c_ * (0.5 * quad(x) - x[0]); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const override {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index j = 0; j < x.size(); ++j) g[j] = row(x, j);
    g[0] -= c_;
    return g;
  }
  Eigen::VectorXd block_gradient(std::size_t i, const Eigen::VectorXd& x) const override {
    Eigen::VectorXd g(dim(i));
    for (Eigen::Index j = 0; j < g.size(); ++j) g[j] = row(x, offset(i) + j);
    if (offset(i) == 0) g[0] -= c_;
    return g;
  }
  double suboptimality(const Eigen::VectorXd& x) const override {
    return 0.5 * c_ * quad(Eigen::VectorXd(x - optimum_->point));
  }

 private:
  // x^T T x
  static double quad(const Eigen::VectorXd& x) {
    const Eigen::Index d = x.size();
    double t = x[0] * x[0] + x[d - 1] * x[d - 1];
    for (Eigen::Index j = 0; j + 1 < d; ++j) {
      const double e = x[j + 1] - x[j];
      t += e * e;
    }
    return t;
  }
  double row(const Eigen::VectorXd& x, Eigen::Index j) const {
    double v = 2.0 * x[j];
    if (j > 0) v -= x[j - 1];
    if (j + 1 < x.size()) v -= x[j + 1];
    return c_ * v;
  }

  double c_;
};

inline std::shared_ptr<TridiagonalQuadratic> make_tridiagonal_quadratic(std::size_t dim, double L,
                                                                       std::vector<std::size_t> dims = {}) {
  return std::make_shared<TridiagonalQuadratic>(dim, L, std::move(dims));
}

// ---------------------------------------------------------------------------
// inexact values

enum class NoiseKind { none, adversarial, uniform };

inline const char* to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::none: return "none";
    case NoiseKind::adversarial: return "adversarial";
    case NoiseKind::uniform: return "uniform";
  }
  return "?";
}

struct NoiseModel {
  NoiseKind kind = NoiseKind::none;
  double level = 0.0;  // Delta

  double effective_level() const { return kind == NoiseKind::none ? 0.0 : level; }
};

/// Role of a value query inside a forward difference (f(x + tau e) - f(x)) / tau.
enum class Evaluation { base, probe };

/// f~(x) with |f~(x) - f(x)| <= Delta on every call.
///
/// The adversarial model shifts probe evaluations by +Delta and base
/// evaluations by -Delta, so a forward difference picks up exactly 2 Delta / tau.
class NoisyValueOracle {
 public:
  NoisyValueOracle(const Problem& problem, NoiseModel noise, Rng stream)
      : problem_(&problem), noise_(noise), rng_(std::move(stream)) {
    check(noise_);
  }

  double value(const BlockPoint& x, Evaluation role = Evaluation::probe) { return value(x.values(), role); }

  double value(const Eigen::VectorXd& x, Evaluation role = Evaluation::probe) {
    const double f = problem_->value(x);
    double eta = 0.0;
    switch (noise_.kind) {
      case NoiseKind::none: break;
      case NoiseKind::adversarial: eta = role == Evaluation::probe ? noise_.level : -noise_.level; break;
      case NoiseKind::uniform: eta = rng_.uniform(-noise_.level, noise_.level); break;
    }
#ifndef NDEBUG
    if (!(std::abs(eta) <= noise_.effective_level())) throw std::logic_error("value noise exceeds its level");
#endif
    return f + eta;
  }

  const Problem& problem() const { return *problem_; }
  const NoiseModel& noise() const { return noise_; }
  void set_level(double level) {
    NoiseModel m{noise_.kind, level};
    check(m);
    noise_ = m;
  }

 private:
  static void check(const NoiseModel& m) {
    if (!(m.level >= 0.0) || !std::isfinite(m.level)) throw std::invalid_argument("noise level must be >= 0");
  }

  const Problem* problem_;
  NoiseModel noise_;
  Rng rng_;
};

// ---------------------------------------------------------------------------
// audits

struct GradCheckReport {
  bool pass = true;
  double max_error = 0.0;  // max_j |fd_j - g_j| / max(1, ||g||_inf)
  std::size_t worst_coordinate = 0;
  std::string message;
};

/// Central-difference gradient check at step h.
inline GradCheckReport grad_check(const Problem& problem, const Eigen::VectorXd& x, double h = 1e-5,
                                  double tol = 1e-6) {
  const Eigen::VectorXd g = problem.gradient(x);
  const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  GradCheckReport r;
  Eigen::VectorXd xp = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    xp[j] = x[j] + h;
    const double fp = problem.value(xp);
    xp[j] = x[j] - h;
    const double fm = problem.value(xp);
    xp[j] = x[j];
    const double err = std::abs((fp - fm) / (2.0 * h) - g[j]) / scale;
    if (err > r.max_error) {
      r.max_error = err;
      r.worst_coordinate = static_cast<std::size_t>(j);
    }
  }
  r.pass = r.max_error <= tol;
  r.message = r.pass ? "gradient consistent"
                     : "gradient mismatch at coordinate " + std::to_string(r.worst_coordinate) + " (error " +
                           std::to_string(r.max_error) + ")";
  return r;
}

/// Largest observed ||f'_i(x + U_i h) - f'_i(x)||_{i,*} / (L_i ||h||_i) over
/// random (x, i, h). Values <= 1 certify the declared block constants.
inline double block_lipschitz_ratio(const Problem& problem, std::size_t samples, Rng& rng, double scale = 1.0) {
  const auto s = problem.structure();
  double worst = 0.0;
  const auto p = static_cast<Eigen::Index>(problem.total_dim());
  for (std::size_t t = 0; t < samples; ++t) {
    Eigen::VectorXd x(p);
    for (Eigen::Index j = 0; j < p; ++j) x[j] = scale * rng.normal();
    const std::size_t i = rng.index(problem.num_blocks());
    Eigen::VectorXd h(static_cast<Eigen::Index>(s->dim(i)));
    for (Eigen::Index j = 0; j < h.size(); ++j) h[j] = scale * rng.normal();
    Eigen::VectorXd xh = x;
    xh.segment(static_cast<Eigen::Index>(s->offset(i)), h.size()) += h;
    const Eigen::VectorXd dg = problem.block_gradient(i, xh) - problem.block_gradient(i, x);
    const double num = s->block_dual_norm(i, detail::as_span(dg));
    const double den = problem.lipschitz()[i] * s->block_norm(i, detail::as_span(h));
    if (den > 0.0) worst = std::max(worst, num / den);
  }
  return worst;
}

/// Largest violation of f(x) <= f(y) + <grad f(y), x - y> + 0.5 ||x - y||_E^2
/// over random single-block moves x = y + U_i h (weights beta_i = L_i).
inline double block_smoothness_violation(const Problem& problem, std::size_t samples, Rng& rng, double scale = 1.0) {
  const auto s = problem.structure();
  double worst = -std::numeric_limits<double>::infinity();
  const auto p = static_cast<Eigen::Index>(problem.total_dim());
  for (std::size_t t = 0; t < samples; ++t) {
    Eigen::VectorXd y(p);
    for (Eigen::Index j = 0; j < p; ++j) y[j] = scale * rng.normal();
    const std::size_t i = rng.index(problem.num_blocks());
    BlockPoint h(s);
    for (auto& v : h.block(i)) v = scale * rng.normal();
    const BlockPoint yp(s, y);
    const BlockPoint xp(s, y + h.values());
    const double n = primal_norm(h);
    const double rhs = problem.value(yp) + pairing(problem.gradient(yp), h) + 0.5 * n * n;
    const double lhs = problem.value(xp);
    worst = std::max(worst, (lhs - rhs) / (1.0 + std::abs(rhs)));
  }
  return worst;
}

}  // namespace rstm

#endif  // RSTM_PROBLEMS_HPP
