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

#ifndef RSTM_BLOCK_SPACE_HPP
#define RSTM_BLOCK_SPACE_HPP

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rstm {

/// Norm carried by one block E_i of the product space.
enum class NormKind {
  euclidean,         ///< ||x||_2, self-dual
  euclidean_matrix,  ///< sqrt(<B x, x>), dual sqrt(<B^{-1} g, g>)
  l1,                ///< ||x||_1, dual ||g||_inf
};

inline const char* to_string(NormKind k) {
  switch (k) {
    case NormKind::euclidean: return "euclidean";
    case NormKind::euclidean_matrix: return "euclidean_matrix";
    case NormKind::l1: return "l1";
  }
  return "?";
}

struct BlockSpec {
  std::size_t dim = 1;
  double weight = 1.0;
  NormKind norm = NormKind::euclidean;
  Eigen::MatrixXd metric;  // only read for euclidean_matrix
};

namespace detail {

// Plain left-to-right loops: norms and pairings must be bit-reproducible and
// the sparse and dense paths must agree exactly.
inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

inline double sum_squares(std::span<const double> a) { return dot(a, a); }

inline double sum_abs(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += std::abs(v);
  return s;
}

inline double max_abs(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s = std::max(s, std::abs(v));
  return s;
}

inline std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace detail

/// Decomposition E = E_1 x ... x E_n with weights beta_i and per-block norms.
///
/// The weighted norm is ||x||_E^2 = sum_i beta_i ||x^(i)||_i^2 and its dual
/// ||g||_{E,*}^2 = sum_i ||g^(i)||_{i,*}^2 / beta_i. Immutable after
/// construction; shared through StructurePtr.
class BlockStructure {
 public:
  explicit BlockStructure(std::vector<BlockSpec> blocks) : blocks_(std::move(blocks)) {
    if (blocks_.empty()) throw std::invalid_argument("block structure needs at least one block");
    offsets_.reserve(blocks_.size() + 1);
    offsets_.push_back(0);
    factors_.resize(blocks_.size());
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      const auto& b = blocks_[i];
      if (b.dim == 0) throw std::invalid_argument("block " + std::to_string(i) + " has dimension 0");
      if (!(b.weight > 0.0) || !std::isfinite(b.weight))
        throw std::invalid_argument("block " + std::to_string(i) + " weight must be positive");
      if (b.norm == NormKind::euclidean_matrix) {
        const auto d = static_cast<Eigen::Index>(b.dim);
        if (b.metric.rows() != d || b.metric.cols() != d)
          throw std::invalid_argument("block " + std::to_string(i) + " metric has wrong size");
        if (!b.metric.isApprox(b.metric.transpose(), 1e-12))
          throw std::invalid_argument("block " + std::to_string(i) + " metric is not symmetric");
        Eigen::LLT<Eigen::MatrixXd> llt(b.metric);
        if (llt.info() != Eigen::Success)
          throw std::invalid_argument("block " + std::to_string(i) + " metric is not positive definite");
        factors_[i] = std::move(llt);
      }
      offsets_.push_back(offsets_.back() + b.dim);
    }
  }

  static std::shared_ptr<const BlockStructure> uniform(const std::vector<std::size_t>& dims,
                                                       const std::vector<double>& weights,
                                                       NormKind norm = NormKind::euclidean) {
    if (dims.size() != weights.size()) throw std::invalid_argument("dims and weights differ in length");
    std::vector<BlockSpec> specs;
    specs.reserve(dims.size());
    for (std::size_t i = 0; i < dims.size(); ++i) specs.push_back({dims[i], weights[i], norm, {}});
    return std::make_shared<const BlockStructure>(std::move(specs));
  }

  std::size_t num_blocks() const { return blocks_.size(); }
  std::size_t total_dim() const { return offsets_.back(); }
  std::size_t dim(std::size_t i) const { return spec(i).dim; }
  std::size_t offset(std::size_t i) const {
    spec(i);
    return offsets_[i];
  }
  double weight(std::size_t i) const { return spec(i).weight; }
  NormKind norm_kind(std::size_t i) const { return spec(i).norm; }
  const Eigen::MatrixXd& metric(std::size_t i) const { return spec(i).metric; }
  const BlockSpec& spec(std::size_t i) const {
    if (i >= blocks_.size())
      throw std::out_of_range("block index " + std::to_string(i) + " out of range [0, " +
                              std::to_string(blocks_.size()) + ")");
    return blocks_[i];
  }

  std::size_t max_dim() const {
    std::size_t m = 0;
    for (const auto& b : blocks_) m = std::max(m, b.dim);
    return m;
  }
  double min_weight() const {
    double m = blocks_.front().weight;
    for (const auto& b : blocks_) m = std::min(m, b.weight);
    return m;
  }
  double max_weight() const {
    double m = blocks_.front().weight;
    for (const auto& b : blocks_) m = std::max(m, b.weight);
    return m;
  }

  /// ||v||_i, unweighted.
  double block_norm(std::size_t i, std::span<const double> v) const {
    check_len(i, v.size());
    switch (blocks_[i].norm) {
      case NormKind::euclidean: return std::sqrt(detail::sum_squares(v));
      case NormKind::l1: return detail::sum_abs(v);
      case NormKind::euclidean_matrix: {
        Eigen::Map<const Eigen::VectorXd> x(v.data(), static_cast<Eigen::Index>(v.size()));
        const Eigen::VectorXd bx = blocks_[i].metric * x;
        return std::sqrt(std::max(0.0, detail::dot(v, detail::as_span(bx))));
      }
    }
    return 0.0;
  }

  /// ||g||_{i,*}, unweighted.
  double block_dual_norm(std::size_t i, std::span<const double> g) const {
    check_len(i, g.size());
    switch (blocks_[i].norm) {
      case NormKind::euclidean: return std::sqrt(detail::sum_squares(g));
      case NormKind::l1: return detail::max_abs(g);
      case NormKind::euclidean_matrix: {
        Eigen::Map<const Eigen::VectorXd> y(g.data(), static_cast<Eigen::Index>(g.size()));
        const Eigen::VectorXd s = factors_[i].solve(y);
        return std::sqrt(std::max(0.0, detail::dot(g, detail::as_span(s))));
      }
    }
    return 0.0;
  }

  /// B_i^{-1} g for a matrix block; identity otherwise.
  Eigen::VectorXd apply_inverse_metric(std::size_t i, const Eigen::VectorXd& g) const {
    check_len(i, static_cast<std::size_t>(g.size()));
    if (blocks_[i].norm != NormKind::euclidean_matrix) return g;
    return factors_[i].solve(g);
  }

  bool operator==(const BlockStructure& o) const {
    if (blocks_.size() != o.blocks_.size()) return false;
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
      const auto& a = blocks_[i];
      const auto& b = o.blocks_[i];
      if (a.dim != b.dim || a.weight != b.weight || a.norm != b.norm) return false;
      if (a.norm == NormKind::euclidean_matrix && a.metric != b.metric) return false;
    }
    return true;
  }

 private:
  void check_len(std::size_t i, std::size_t len) const {
    if (len != spec(i).dim)
      throw std::invalid_argument("block " + std::to_string(i) + " expects length " +
                                  std::to_string(spec(i).dim) + ", got " + std::to_string(len));
  }

  std::vector<BlockSpec> blocks_;
  std::vector<std::size_t> offsets_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> factors_;
};

using StructurePtr = std::shared_ptr<const BlockStructure>;

struct PrimalTag {};
struct DualTag {};

/// Dense block-addressable vector; BlockPoint lives in E, BlockDual in E*.
template <class Tag>
class BlockVector {
 public:
  BlockVector() = default;
  explicit BlockVector(StructurePtr s) : s_(std::move(s)), v_(Eigen::VectorXd::Zero(checked(s_)->total_dim())) {}
  BlockVector(StructurePtr s, Eigen::VectorXd values) : s_(std::move(s)), v_(std::move(values)) {
    if (static_cast<std::size_t>(v_.size()) != checked(s_)->total_dim())
      throw std::invalid_argument("vector length " + std::to_string(v_.size()) +
                                  " does not match structure dimension " + std::to_string(s_->total_dim()));
  }

  static BlockVector from_blocks(StructurePtr s, const std::vector<std::vector<double>>& blocks) {
    BlockVector out(std::move(s));
    if (blocks.size() != out.s_->num_blocks())
      throw std::invalid_argument("expected " + std::to_string(out.s_->num_blocks()) + " blocks");
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      if (blocks[i].size() != out.s_->dim(i))
        throw std::invalid_argument("block " + std::to_string(i) + " has wrong length");
      std::copy(blocks[i].begin(), blocks[i].end(), out.block(i).begin());
    }
    return out;
  }

  const StructurePtr& structure() const { return s_; }
  const Eigen::VectorXd& values() const { return v_; }
  Eigen::VectorXd& values() { return v_; }
  std::size_t size() const { return static_cast<std::size_t>(v_.size()); }

  std::span<double> block(std::size_t i) { return {v_.data() + s_->offset(i), s_->dim(i)}; }
  std::span<const double> block(std::size_t i) const { return {v_.data() + s_->offset(i), s_->dim(i)}; }
  Eigen::VectorXd block_vector(std::size_t i) const {
    return v_.segment(static_cast<Eigen::Index>(s_->offset(i)), static_cast<Eigen::Index>(s_->dim(i)));
  }

  bool operator==(const BlockVector& o) const { return same_structure(*this, o) && v_ == o.v_; }

  friend bool same_structure(const BlockVector& a, const BlockVector& b) {
    return a.s_ == b.s_ || (a.s_ && b.s_ && *a.s_ == *b.s_);
  }

 private:
  static const StructurePtr& checked(const StructurePtr& s) {
    if (!s) throw std::invalid_argument("null block structure");
    return s;
  }

  StructurePtr s_;
  Eigen::VectorXd v_;
};

using BlockPoint = BlockVector<PrimalTag>;
using BlockDual = BlockVector<DualTag>;

/// Dual vector that is nonzero on a set of whole blocks only.
class SparseBlockDual {
 public:
  struct Entry {
    std::size_t block;
    Eigen::VectorXd values;
  };

  SparseBlockDual(StructurePtr s, std::vector<Entry> entries) : s_(std::move(s)), entries_(std::move(entries)) {
    if (!s_) throw std::invalid_argument("null block structure");
    if (entries_.empty()) throw std::invalid_argument("sparse dual needs a non-empty support");
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) { return a.block < b.block; });
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      const auto& e = entries_[k];
      if (static_cast<std::size_t>(e.values.size()) != s_->dim(e.block))
        throw std::invalid_argument("block " + std::to_string(e.block) + " has wrong length");
      if (k > 0 && entries_[k - 1].block == e.block)
        throw std::invalid_argument("duplicate block " + std::to_string(e.block) + " in support");
    }
  }

  /// Every block present; the dense-gradient case.
  static SparseBlockDual from_dense(const BlockDual& g) {
    std::vector<Entry> entries;
    const auto& s = *g.structure();
    entries.reserve(s.num_blocks());
    for (std::size_t i = 0; i < s.num_blocks(); ++i) entries.push_back({i, g.block_vector(i)});
    return SparseBlockDual(g.structure(), std::move(entries));
  }

  const StructurePtr& structure() const { return s_; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<std::size_t> support() const {
    std::vector<std::size_t> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.block);
    return out;
  }
  bool contains(std::size_t i) const { return find(i) != nullptr; }
  const Eigen::VectorXd* find(std::size_t i) const {
    for (const auto& e : entries_)
      if (e.block == i) return &e.values;
    return nullptr;
  }

  BlockDual dense() const {
    BlockDual out(s_);
    for (const auto& e : entries_)
      out.values().segment(static_cast<Eigen::Index>(s_->offset(e.block)), e.values.size()) = e.values;
    return out;
  }

  SparseBlockDual scaled(double c) const {
    auto out = *this;
    for (auto& e : out.entries_) e.values *= c;
    return out;
  }

 private:
  StructurePtr s_;
  std::vector<Entry> entries_;
};

namespace detail {
template <class A, class B>
void require_same(const A& a, const B& b) {
  const auto& sa = a.structure();
  const auto& sb = b.structure();
  if (sa != sb && !(sa && sb && *sa == *sb)) throw std::invalid_argument("block structure mismatch");
}
}  // namespace detail

/// U_i: places v in block i, zeros elsewhere.
inline BlockPoint embed(const StructurePtr& s, std::size_t i, std::span<const double> v) {
  BlockPoint out(s);
  if (v.size() != s->dim(i))
    throw std::invalid_argument("block " + std::to_string(i) + " expects length " + std::to_string(s->dim(i)));
  std::copy(v.begin(), v.end(), out.block(i).begin());
  return out;
}

/// U_i^T: the i-th block of a dual vector.
inline Eigen::VectorXd extract(std::size_t i, const BlockDual& g) { return g.block_vector(i); }

inline Eigen::VectorXd extract(std::size_t i, const SparseBlockDual& g) {
  const auto& s = *g.structure();
  if (const auto* v = g.find(i)) return *v;
  return Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.dim(i)));
}

inline Eigen::VectorXd extract_primal(std::size_t i, const BlockPoint& x) { return x.block_vector(i); }

/// Dual partition operator: the sparse dual with support {i}.
inline SparseBlockDual dual_embed(const StructurePtr& s, std::size_t i, Eigen::VectorXd g) {
  return SparseBlockDual(s, {{i, std::move(g)}});
}

inline double pairing(const BlockDual& g, const BlockPoint& x) {
  detail::require_same(g, x);
  const auto& s = *g.structure();
  double total = 0.0;
  for (std::size_t i = 0; i < s.num_blocks(); ++i) total += detail::dot(g.block(i), x.block(i));
  return total;
}

inline double pairing(const SparseBlockDual& g, const BlockPoint& x) {
  detail::require_same(g, x);
  double total = 0.0;
  for (const auto& e : g.entries()) total += detail::dot(detail::as_span(e.values), x.block(e.block));
  return total;
}

inline double primal_norm(const BlockPoint& x) {
  const auto& s = *x.structure();
  double total = 0.0;
  for (std::size_t i = 0; i < s.num_blocks(); ++i) {
    const double b = s.block_norm(i, x.block(i));
    total += s.weight(i) * b * b;
  }
  return std::sqrt(total);
}

inline double dual_norm(const BlockDual& g) {
  const auto& s = *g.structure();
  double total = 0.0;
  for (std::size_t i = 0; i < s.num_blocks(); ++i) {
    const double b = s.block_dual_norm(i, g.block(i));
    total += b * b / s.weight(i);
  }
  return std::sqrt(total);
}

inline double dual_norm(const SparseBlockDual& g) {
  const auto& s = *g.structure();
  double total = 0.0;
  for (const auto& e : g.entries()) {
    const double b = s.block_dual_norm(e.block, detail::as_span(e.values));
    total += b * b / s.weight(e.block);
  }
  return std::sqrt(total);
}

/// a - b for sparse duals over the union of their supports.
inline SparseBlockDual difference(const SparseBlockDual& a, const SparseBlockDual& b) {
  detail::require_same(a, b);
  std::vector<SparseBlockDual::Entry> out;
  auto sa = a.support();
  auto sb = b.support();
  std::vector<std::size_t> all;
  std::set_union(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(all));
  for (auto i : all) out.push_back({i, extract(i, a) - extract(i, b)});
  return SparseBlockDual(a.structure(), std::move(out));
}

}  // namespace rstm

#endif  // RSTM_BLOCK_SPACE_HPP
