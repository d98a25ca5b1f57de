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

#ifndef RSTM_PROX_HPP
#define RSTM_PROX_HPP

#include <rstm/block_space.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace rstm {

/// Proximal setup of one block: its feasible set Q_i and prox-function d_i.
enum class ProxKind {
  euclidean_unconstrained,  ///< Q_i = R^{p_i}, d_i = 0.5 ||x||_2^2
  euclidean_interval,       ///< Q_i = box [lo, hi], d_i = 0.5 ||x||_2^2
  euclidean_matrix,         ///< Q_i = R^{p_i}, d_i = 0.5 <B_i x, x>
  entropy_simplex,          ///< Q_i = standard simplex, d_i = sum x ln x
};

inline const char* to_string(ProxKind k) {
  switch (k) {
    case ProxKind::euclidean_unconstrained: return "euclidean_unconstrained";
    case ProxKind::euclidean_interval: return "euclidean_interval";
    case ProxKind::euclidean_matrix: return "euclidean_matrix";
    case ProxKind::entropy_simplex: return "entropy_simplex";
  }
  return "?";
}

inline NormKind norm_for(ProxKind k) {
  switch (k) {
    case ProxKind::euclidean_unconstrained:
    case ProxKind::euclidean_interval: return NormKind::euclidean;
    case ProxKind::euclidean_matrix: return NormKind::euclidean_matrix;
    case ProxKind::entropy_simplex: return NormKind::l1;
  }
  return NormKind::euclidean;
}

struct BlockProx {
  ProxKind kind = ProxKind::euclidean_unconstrained;
  Eigen::VectorXd lo;  // interval bounds, may hold +-infinity
  Eigen::VectorXd hi;

  static BlockProx unconstrained() { return {}; }
  static BlockProx interval(Eigen::VectorXd lo, Eigen::VectorXd hi) {
    return {ProxKind::euclidean_interval, std::move(lo), std::move(hi)};
  }
  static BlockProx matrix() { return {ProxKind::euclidean_matrix, {}, {}}; }
  static BlockProx simplex() { return {ProxKind::entropy_simplex, {}, {}}; }
};

/// Tolerance on |sum x - 1| for simplex blocks.
inline constexpr double kSimplexSumTol = 1e-12;

class ProxSetup {
 public:
  ProxSetup(StructurePtr s, std::vector<BlockProx> blocks) : s_(std::move(s)), blocks_(std::move(blocks)) {
    if (!s_) throw std::invalid_argument("null block structure");
    if (blocks_.size() != s_->num_blocks())
      throw std::invalid_argument("prox setup has " + std::to_string(blocks_.size()) + " blocks, structure has " +
                                  std::to_string(s_->num_blocks()));
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      const auto& b = blocks_[i];
      if (norm_for(b.kind) != s_->norm_kind(i))
        throw std::invalid_argument("block " + std::to_string(i) + ": prox " + to_string(b.kind) +
                                    " needs norm " + to_string(norm_for(b.kind)) + ", structure has " +
                                    to_string(s_->norm_kind(i)));
      if (b.kind == ProxKind::euclidean_interval) {
        const auto d = static_cast<Eigen::Index>(s_->dim(i));
        if (b.lo.size() != d || b.hi.size() != d)
          throw std::invalid_argument("block " + std::to_string(i) + ": interval bounds have wrong length");
        for (Eigen::Index j = 0; j < d; ++j)
          if (!(b.lo[j] <= b.hi[j]))
            throw std::invalid_argument("block " + std::to_string(i) + ": lo > hi at coordinate " +
                                        std::to_string(j));
      }
    }
  }

  /// All blocks of one kind; interval kinds need explicit bounds and use the other ctor.
  static ProxSetup uniform(StructurePtr s, ProxKind kind) {
    if (kind == ProxKind::euclidean_interval) throw std::invalid_argument("interval setup needs bounds");
    std::vector<BlockProx> blocks(s->num_blocks(), BlockProx{kind, {}, {}});
    return ProxSetup(std::move(s), std::move(blocks));
  }

  const StructurePtr& structure() const { return s_; }
  const BlockProx& block(std::size_t i) const {
    s_->spec(i);
    return blocks_[i];
  }
  const std::vector<BlockProx>& blocks() const { return blocks_; }

  /// Empty when x is feasible; otherwise a description of the violation.
  /// strict additionally demands x in Q^0 (positive simplex coordinates).
  std::string violation(const BlockPoint& x, bool strict, double tol = 0.0) const {
    detail::require_same(x, BlockPoint(s_));
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      const auto v = x.block(i);
      const auto& b = blocks_[i];
      for (double c : v)
        if (!std::isfinite(c)) return "block " + std::to_string(i) + " has a non-finite coordinate";
      if (b.kind == ProxKind::euclidean_interval) {
        for (std::size_t j = 0; j < v.size(); ++j)
          if (v[j] < b.lo[j] - tol || v[j] > b.hi[j] + tol)
            return "block " + std::to_string(i) + " coordinate " + std::to_string(j) + " outside its interval";
      } else if (b.kind == ProxKind::entropy_simplex) {
        double sum = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j) {
          if (strict ? !(v[j] > 0.0) : v[j] < -tol)
            return "block " + std::to_string(i) + " coordinate " + std::to_string(j) +
                   (strict ? " is not strictly positive" : " is negative");
          sum += v[j];
        }
        if (std::abs(sum - 1.0) > std::max(tol, kSimplexSumTol))
          return "block " + std::to_string(i) + " does not sum to one";
      }
    }
    return {};
  }

 private:
  StructurePtr s_;
  std::vector<BlockProx> blocks_;
};

/// A point of Q^0: interval blocks inside bounds, simplex blocks strictly
/// positive and summing to one.
class FeasiblePoint {
 public:
  static FeasiblePoint make(const ProxSetup& setup, BlockPoint x) {
    if (auto why = setup.violation(x, true); !why.empty()) throw std::domain_error("infeasible point: " + why);
    return FeasiblePoint(std::move(x));
  }

  const BlockPoint& point() const { return x_; }
  operator const BlockPoint&() const { return x_; }

 private:
  explicit FeasiblePoint(BlockPoint x) : x_(std::move(x)) {}
  BlockPoint x_;

  friend FeasiblePoint prox_map(const ProxSetup&, const BlockPoint&, double, const SparseBlockDual&);
};

namespace detail {

inline double xlogx(double v) { return v > 0.0 ? v * std::log(v) : 0.0; }

inline double block_prox_value(const ProxSetup& setup, std::size_t i, std::span<const double> x) {
  const auto& s = *setup.structure();
  switch (setup.block(i).kind) {
    case ProxKind::euclidean_unconstrained:
    case ProxKind::euclidean_interval:
    case ProxKind::euclidean_matrix: {
      const double n = s.block_norm(i, x);
      return 0.5 * n * n;
    }
    case ProxKind::entropy_simplex: {
      double total = 0.0;
      for (double v : x) total += xlogx(v);
      return total;
    }
  }
  return 0.0;
}

// V_i[z](x), unweighted.
inline double block_bregman(const ProxSetup& setup, std::size_t i, std::span<const double> z,
                            std::span<const double> x) {
  const auto& s = *setup.structure();
  if (setup.block(i).kind == ProxKind::entropy_simplex) {
    double total = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (!(z[j] > 0.0))
        throw std::domain_error("bregman: block " + std::to_string(i) + " centre has a non-positive coordinate");
      if (x[j] > 0.0) total += x[j] * std::log(x[j] / z[j]);
    }
    // the sum(z) - sum(x) term vanishes on the simplex; kept for off-simplex rounding
    double sx = 0.0, sz = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      sx += x[j];
      sz += z[j];
    }
    return total + (sz - sx);
  }
  std::vector<double> d(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) d[j] = x[j] - z[j];
  const double n = s.block_norm(i, d);
  return 0.5 * n * n;
}

}  // namespace detail

/// d(x) = sum_i beta_i d_i(x^(i)), with 0 ln 0 = 0.
inline double prox_value(const ProxSetup& setup, const BlockPoint& x) {
  if (auto why = setup.violation(x, false, kSimplexSumTol); !why.empty())
    throw std::domain_error("prox_value: " + why);
  const auto& s = *setup.structure();
  double total = 0.0;
  for (std::size_t i = 0; i < s.num_blocks(); ++i)
    total += s.weight(i) * detail::block_prox_value(setup, i, x.block(i));
  return total;
}

/// V[z](x) = sum_i beta_i V_i[z^(i)](x^(i)); z must lie in Q^0.
inline double bregman(const ProxSetup& setup, const BlockPoint& z, const BlockPoint& x) {
  detail::require_same(z, x);
  if (auto why = setup.violation(z, true); !why.empty()) throw std::domain_error("bregman centre: " + why);
  const auto& s = *setup.structure();
  double total = 0.0;
  for (std::size_t i = 0; i < s.num_blocks(); ++i)
    total += s.weight(i) * detail::block_bregman(setup, i, z.block(i), x.block(i));
  return total;
}

/// argmin_{x in Q} { V[u](x) + alpha <ghat, x> }.
///
/// Separable over blocks; blocks outside the support of ghat are copied
/// from u unchanged, which is what keeps u - u_+ inside the sampled subspace.
inline FeasiblePoint prox_map(const ProxSetup& setup, const BlockPoint& u, double alpha, const SparseBlockDual& ghat) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw std::invalid_argument("prox_map: alpha must be positive");
  detail::require_same(u, ghat);
  const auto& s = *setup.structure();
  for (const auto& e : ghat.entries())
    if (setup.block(e.block).kind == ProxKind::entropy_simplex)
      for (double c : u.block(e.block))
        if (!(c > 0.0)) throw std::domain_error("prox_map: simplex block " + std::to_string(e.block) + " of u is not strictly positive");

  BlockPoint out = u;
  for (const auto& e : ghat.entries()) {
    const std::size_t i = e.block;
    const double step = alpha / s.weight(i);
    auto dst = out.block(i);
    const auto src = u.block(i);
    const auto& bp = setup.block(i);
    switch (bp.kind) {
      case ProxKind::euclidean_unconstrained:
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = src[j] - step * e.values[j];
        break;
      case ProxKind::euclidean_interval:
        for (std::size_t j = 0; j < dst.size(); ++j)
          dst[j] = std::clamp(src[j] - step * e.values[j], bp.lo[j], bp.hi[j]);
        break;
      case ProxKind::euclidean_matrix: {
        const Eigen::VectorXd d = s.apply_inverse_metric(i, e.values);
        for (std::size_t j = 0; j < dst.size(); ++j) dst[j] = src[j] - step * d[j];
        break;
      }
      case ProxKind::entropy_simplex: {
        // multiplicative weights in the log domain; shift by the max exponent
        const std::size_t d = dst.size();
        std::vector<double> logit(d);
        double top = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < d; ++j) {
          logit[j] = std::log(src[j]) - step * e.values[j];
          top = std::max(top, logit[j]);
        }
        double z = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          logit[j] = std::exp(logit[j] - top);
          z += logit[j];
        }
        double sum = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          dst[j] = std::max(logit[j] / z, std::numeric_limits<double>::min());
          sum += dst[j];
        }
        if (sum != 1.0)
          for (std::size_t j = 0; j < d; ++j) dst[j] /= sum;
        break;
      }
    }
  }
  return FeasiblePoint(std::move(out));
}

}  // namespace rstm

#endif  // RSTM_PROX_HPP
