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

// Randomized inexact gradient oracles
//   ghat(x) = rho * R_b (R_f^T grad f(x) + xi(x)).
// R_f and R_b are never materialized: an Outcome (block, coordinate,
// direction) fixes both, and the sample stores the reconstructed vectors.

#ifndef RSTM_ORACLES_HPP
#define RSTM_ORACLES_HPP

#include <rstm/problems.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rstm {

enum class OracleVariant {
  full,           ///< exact gradient, rho = 1 (deterministic reference)
  dir,            ///< directional derivative along a random unit direction
  coord,          ///< one coordinate derivative
  block,          ///< one block gradient
  block_rand,     ///< block w.p. p_i/p, then a direction or coordinate inside it
  df_dir,         ///< finite-difference counterpart of dir
  df_coord,       ///< finite-difference counterpart of coord
  df_block,       ///< p_i finite differences inside one block
  df_block_rand,  ///< finite-difference counterpart of block_rand
};

inline const char* to_string(OracleVariant v) {
  switch (v) {
    case OracleVariant::full: return "full";
    case OracleVariant::dir: return "dir";
    case OracleVariant::coord: return "coord";
    case OracleVariant::block: return "block";
    case OracleVariant::block_rand: return "block_rand";
    case OracleVariant::df_dir: return "df_dir";
    case OracleVariant::df_coord: return "df_coord";
    case OracleVariant::df_block: return "df_block";
    case OracleVariant::df_block_rand: return "df_block_rand";
  }
  return "?";
}

inline std::optional<OracleVariant> variant_from_string(const std::string& s) {
  for (auto v : {OracleVariant::full, OracleVariant::dir, OracleVariant::coord, OracleVariant::block,
                 OracleVariant::block_rand, OracleVariant::df_dir, OracleVariant::df_coord, OracleVariant::df_block,
                 OracleVariant::df_block_rand})
    if (s == to_string(v)) return v;
  return std::nullopt;
}

inline bool is_derivative_free(OracleVariant v) {
  return v == OracleVariant::df_dir || v == OracleVariant::df_coord || v == OracleVariant::df_block ||
         v == OracleVariant::df_block_rand;
}

/// Same sampling law, exact derivatives.
inline OracleVariant exact_counterpart(OracleVariant v) {
  switch (v) {
    case OracleVariant::df_dir: return OracleVariant::dir;
    case OracleVariant::df_coord: return OracleVariant::coord;
    case OracleVariant::df_block: return OracleVariant::block;
    case OracleVariant::df_block_rand: return OracleVariant::block_rand;
    default: return v;
  }
}

enum class TauPolicy {
  fixed,     ///< use OracleConfig::tau for every block
  balanced,  ///< tau_i = 2 sqrt(Delta / L_i)
};

struct OracleConfig {
  OracleVariant variant = OracleVariant::block;
  NoiseModel noise;
  TauPolicy tau_policy = TauPolicy::balanced;
  double tau = 0.0;
  std::uint64_t seed = 0;
};

struct BiasBound {
  double delta = 0.0;
};

/// One realization of the random operators. Unused fields stay empty.
struct Outcome {
  std::optional<std::size_t> block;       // empty: all blocks (full, dir)
  std::optional<std::size_t> coordinate;  // within the block
  Eigen::VectorXd direction;              // unit vector; whole space (dir) or one block

  std::string label() const {
    if (!block) return direction.size() ? "dir" : "all";
    std::string s = std::to_string(*block);
    if (coordinate) s += "." + std::to_string(*coordinate);
    if (direction.size()) s += ".dir";
    return s;
  }
};

/// Outcome with probability num/den, for exact expectations.
struct WeightedOutcome {
  Outcome outcome;
  double num = 1.0;
  double den = 1.0;
};

struct OracleSample {
  SparseBlockDual ghat;  // rho R_b (R_f^T grad f + xi)
  double rho = 1.0;
  Outcome meta;
  SparseBlockDual estimate;            // R_b (R_f^T grad f + xi), built without dividing by rho
  std::optional<SparseBlockDual> exact;  // R_b R_f^T grad f; present when requested

  /// rho R_b R_f^T grad f.
  std::optional<SparseBlockDual> unbiased_part() const {
    if (!exact) return std::nullopt;
    return exact->scaled(rho);
  }
  /// R_b xi.
  std::optional<SparseBlockDual> bias() const {
    if (!exact) return std::nullopt;
    return difference(estimate, *exact);
  }
};

namespace detail {

inline double sign_or_one(double v) { return v < 0.0 ? -1.0 : 1.0; }

inline std::vector<double> balanced_taus(double level, const BlockStructure& s) {
  if (!(level > 0.0)) throw std::invalid_argument("balanced tau needs a positive noise level");
  std::vector<double> t;
  for (std::size_t i = 0; i < s.num_blocks(); ++i) t.push_back(2.0 * std::sqrt(level / s.weight(i)));
  return t;
}

inline double fd_bias(double level, double tau, double L) {
  const double r = std::sqrt(L);
  return 2.0 * level / (tau * r) + tau * r / 2.0;
}

inline void require_uniform_weights(const BlockStructure& s) {
  for (std::size_t i = 1; i < s.num_blocks(); ++i)
    if (s.weight(i) != s.weight(0))
      throw std::invalid_argument("directional oracles need a single weight L on every block");
}

}  // namespace detail

/// Finite-difference steps per block for the given noise level.
inline std::vector<double> oracle_taus(const OracleConfig& cfg, const BlockStructure& s, double level) {
  if (!is_derivative_free(cfg.variant)) return {};
  if (cfg.tau_policy == TauPolicy::balanced) return detail::balanced_taus(level, s);
  if (!(cfg.tau > 0.0) || !std::isfinite(cfg.tau)) throw std::invalid_argument("tau must be positive");
  return std::vector<double>(s.num_blocks(), cfg.tau);
}

/// delta with ||R_b xi||_{E,*} <= delta for a raw inexactness level Delta.
inline BiasBound bias_bound(const OracleConfig& cfg, const BlockStructure& s, double level) {
  if (!(level >= 0.0)) throw std::invalid_argument("noise level must be >= 0");
  const double L0 = s.min_weight();
  switch (cfg.variant) {
    case OracleVariant::full: return {0.0};
    case OracleVariant::dir:
      detail::require_uniform_weights(s);
      return {level / std::sqrt(s.weight(0))};
    case OracleVariant::coord:
    case OracleVariant::block:
    case OracleVariant::block_rand: return {level / std::sqrt(L0)};
    case OracleVariant::df_dir: {
      detail::require_uniform_weights(s);
      const auto t = oracle_taus(cfg, s, level);
      return {detail::fd_bias(level, t[0], s.weight(0))};
    }
    case OracleVariant::df_coord:
    case OracleVariant::df_block:
    case OracleVariant::df_block_rand: {
      const auto t = oracle_taus(cfg, s, level);
      double worst = 0.0;
      for (std::size_t i = 0; i < s.num_blocks(); ++i) worst = std::max(worst, detail::fd_bias(level, t[i], s.weight(i)));
      if (cfg.variant == OracleVariant::df_block) worst *= std::sqrt(static_cast<double>(s.max_dim()));
      return {worst};
    }
  }
  throw std::invalid_argument("unknown oracle variant");
}

inline BiasBound bias_bound(const OracleConfig& cfg, const BlockStructure& s) {
  return bias_bound(cfg, s, cfg.noise.effective_level());
}

/// Largest Delta whose bias bound (with balanced tau for finite differences) equals delta.
inline double level_for_delta(const OracleConfig& cfg, const BlockStructure& s, double delta) {
  if (!(delta >= 0.0)) throw std::invalid_argument("delta must be >= 0");
  switch (cfg.variant) {
    case OracleVariant::full: return 0.0;
    case OracleVariant::dir: return delta * std::sqrt(s.weight(0));
    case OracleVariant::coord:
    case OracleVariant::block:
    case OracleVariant::block_rand: return delta * std::sqrt(s.min_weight());
    case OracleVariant::df_dir:
    case OracleVariant::df_coord:
    case OracleVariant::df_block_rand: return delta * delta / 4.0;
    case OracleVariant::df_block: return delta * delta / (4.0 * static_cast<double>(s.max_dim()));
  }
  throw std::invalid_argument("unknown oracle variant");
}

/// Stateful per-run oracle: owns the sampling stream and the noise stream.
///
/// Sampling and noise draw from separate streams, so two oracles with the
/// same seed visit the same outcomes whatever their noise settings.
class Oracle {
 public:
  Oracle(ProblemPtr problem, OracleConfig cfg)
      : problem_(std::move(problem)),
        cfg_(cfg),
        sampling_(cfg.seed, 1),
        noise_(Rng(cfg.seed, 2)),
        values_(*problem_, cfg.noise, Rng(cfg.seed, 3)) {
    const auto v = cfg_.variant;
    const bool directional = v == OracleVariant::full || v == OracleVariant::dir || v == OracleVariant::df_dir;
    s_ = directional ? problem_->uniform_structure() : problem_->structure();
    const auto& feas = problem_->feasible_set();
    const std::size_t n = s_->num_blocks();
    switch (v) {
      case OracleVariant::full: rho_ = 1.0; break;
      case OracleVariant::dir:
      case OracleVariant::df_dir:
        for (std::size_t i = 0; i < n; ++i)
          if (feas[i].kind != ProxKind::euclidean_unconstrained)
            throw std::invalid_argument(std::string(to_string(v)) + " oracle needs an unconstrained Euclidean setup");
        rho_ = static_cast<double>(s_->total_dim());
        break;
      case OracleVariant::coord:
      case OracleVariant::df_coord:
        for (std::size_t i = 0; i < n; ++i)
          if (s_->dim(i) != 1) throw std::invalid_argument(std::string(to_string(v)) + " oracle needs scalar blocks");
        rho_ = static_cast<double>(n);
        break;
      case OracleVariant::block:
      case OracleVariant::df_block: rho_ = static_cast<double>(n); break;
      case OracleVariant::block_rand:
      case OracleVariant::df_block_rand:
        for (std::size_t i = 0; i < n; ++i)
          if (feas[i].kind != ProxKind::euclidean_unconstrained && feas[i].kind != ProxKind::euclidean_interval)
            throw std::invalid_argument(std::string(to_string(v)) + " oracle needs unconstrained or interval blocks");
        rho_ = static_cast<double>(s_->total_dim());
        break;
    }
    if (is_derivative_free(v))
      for (std::size_t i = 0; i < n; ++i)
        if (s_->norm_kind(i) == NormKind::euclidean_matrix)
          throw std::invalid_argument("finite-difference oracles do not support matrix norms");
    if (v == OracleVariant::full && cfg_.noise.effective_level() > 0.0)
      throw std::invalid_argument("the full oracle is exact; noise is not supported");
    if (cfg_.noise.level < 0.0 || !std::isfinite(cfg_.noise.level)) throw std::invalid_argument("noise level must be >= 0");
  }

  const OracleConfig& config() const { return cfg_; }
  const Problem& problem() const { return *problem_; }
  const ProblemPtr& problem_ptr() const { return problem_; }
  /// The space E this oracle's norms and prox steps live in.
  const StructurePtr& structure() const { return s_; }
  ProxSetup setup() const { return problem_->setup(s_); }
  double rho() const { return rho_; }
  double level() const { return cfg_.noise.effective_level(); }

  BiasBound bias_bound() const { return rstm::bias_bound(cfg_, *s_, level()); }
  BiasBound bias_bound(double level) const { return rstm::bias_bound(cfg_, *s_, level); }
  double level_for_delta(double delta) const { return rstm::level_for_delta(cfg_, *s_, delta); }
  std::vector<double> taus(double level) const { return oracle_taus(cfg_, *s_, level); }

  /// Enumerable outcome set, or empty when the law has a continuous part.
  std::vector<WeightedOutcome> outcomes() const {
    std::vector<WeightedOutcome> out;
    const std::size_t n = s_->num_blocks();
    switch (cfg_.variant) {
      case OracleVariant::full: out.push_back({Outcome{}, 1.0, 1.0}); break;
      case OracleVariant::dir:
      case OracleVariant::df_dir: break;
      case OracleVariant::coord:
      case OracleVariant::df_coord:
        for (std::size_t i = 0; i < n; ++i) out.push_back({Outcome{i, 0, {}}, 1.0, double(n)});
        break;
      case OracleVariant::block:
      case OracleVariant::df_block:
        for (std::size_t i = 0; i < n; ++i) out.push_back({Outcome{i, std::nullopt, {}}, 1.0, double(n)});
        break;
      case OracleVariant::block_rand:
      case OracleVariant::df_block_rand: {
        const auto& feas = problem_->feasible_set();
        for (std::size_t i = 0; i < n; ++i)
          if (feas[i].kind != ProxKind::euclidean_interval) return {};
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t j = 0; j < s_->dim(i); ++j) out.push_back({Outcome{i, j, {}}, 1.0, rho_});
        break;
      }
    }
    return out;
  }

  /// Draws an outcome from the sampling stream.
  Outcome draw() {
    const std::size_t n = s_->num_blocks();
    switch (cfg_.variant) {
      case OracleVariant::full: return {};
      case OracleVariant::dir:
      case OracleVariant::df_dir: return Outcome{std::nullopt, std::nullopt, sampling_.sphere(s_->total_dim())};
      case OracleVariant::coord:
      case OracleVariant::df_coord: return Outcome{sampling_.index(n), 0, {}};
      case OracleVariant::block:
      case OracleVariant::df_block: return Outcome{sampling_.index(n), std::nullopt, {}};
      case OracleVariant::block_rand:
      case OracleVariant::df_block_rand: {
        // a uniform coordinate of R^p lands in block i with probability p_i / p
        const std::size_t j = sampling_.index(s_->total_dim());
        std::size_t i = 0;
        while (j >= s_->offset(i) + s_->dim(i)) ++i;
        if (problem_->feasible_set()[i].kind == ProxKind::euclidean_interval) return Outcome{i, j - s_->offset(i), {}};
        return Outcome{i, std::nullopt, sampling_.sphere(s_->dim(i))};
      }
    }
    return {};
  }

  /// ghat at x for a random outcome; level overrides the configured Delta.
  OracleSample sample(const BlockPoint& x, std::optional<double> level = std::nullopt, bool with_exact = false) {
    Outcome o = draw();
    return sample_at(x, std::move(o), level.value_or(this->level()), with_exact);
  }

  /// ghat at x for a fixed outcome. Noise is still drawn from the noise stream.
  OracleSample sample_at(const BlockPoint& x, Outcome o, double level, bool with_exact = false) {
    if (x.size() != s_->total_dim()) throw std::invalid_argument("oracle: point has wrong dimension");
    if (!(level >= 0.0) || !std::isfinite(level)) throw std::invalid_argument("noise level must be >= 0");
    const BlockPoint xs(s_, x.values());
    const auto v = cfg_.variant;
    const bool noisy = cfg_.noise.kind != NoiseKind::none && level > 0.0;
    std::vector<SparseBlockDual::Entry> est;
    std::optional<std::vector<SparseBlockDual::Entry>> exact;
    if (with_exact) exact.emplace();

    switch (v) {
      case OracleVariant::full: {
        const BlockDual g = problem_->gradient(xs);
        for (std::size_t i = 0; i < s_->num_blocks(); ++i) est.push_back({i, g.block_vector(i)});
        if (exact) *exact = est;
        break;
      }
      case OracleVariant::dir:
      case OracleVariant::df_dir: {
        check_direction(o.direction, s_->total_dim());
        const Eigen::VectorXd& e = o.direction;
        double d = 0.0;
        std::optional<double> dexact;
        if (v == OracleVariant::dir) {
          dexact = problem_->gradient(xs.values()).dot(e);
          d = *dexact + scalar_noise(*dexact, level, noisy);
        } else {
          const double tau = taus(level)[0];
          d = finite_difference(xs.values(), e, tau, level);
          if (exact) dexact = problem_->gradient(xs.values()).dot(e);
        }
        split_dense(d * e, est);
        if (exact) split_dense(*dexact * e, *exact);
        break;
      }
      case OracleVariant::coord:
      case OracleVariant::block:
      case OracleVariant::block_rand:
      case OracleVariant::df_coord:
      case OracleVariant::df_block:
      case OracleVariant::df_block_rand: {
        if (!o.block || *o.block >= s_->num_blocks()) throw std::out_of_range("oracle outcome needs a valid block");
        const std::size_t i = *o.block;
        const auto pi = static_cast<Eigen::Index>(s_->dim(i));
        const auto off = static_cast<Eigen::Index>(s_->offset(i));
        // direction inside block i: a coordinate, a unit vector, or the whole block
        Eigen::VectorXd local;
        if (o.coordinate) {
          if (*o.coordinate >= s_->dim(i)) throw std::out_of_range("oracle outcome coordinate out of range");
          local = Eigen::VectorXd::Unit(pi, static_cast<Eigen::Index>(*o.coordinate));
        } else if (o.direction.size()) {
          check_direction(o.direction, s_->dim(i));
          local = o.direction;
        }
        const bool whole_block = local.size() == 0;
        if ((v == OracleVariant::block || v == OracleVariant::df_block) != whole_block)
          throw std::invalid_argument(std::string(to_string(v)) + ": outcome does not match the sampling law");

        Eigen::VectorXd gi;
        if (!is_derivative_free(v) || exact) gi = problem_->block_gradient(i, xs.values());
        Eigen::VectorXd out;
        if (v == OracleVariant::block) {
          out = gi + block_noise(i, gi, level, noisy);
        } else if (v == OracleVariant::coord || v == OracleVariant::block_rand) {
          const double d = gi.dot(local);
          out = (d + scalar_noise(d, level, noisy)) * local;
        } else if (v == OracleVariant::df_block) {
          const double tau = taus(level)[i];
          out.resize(pi);
          const double base = values_at(level).value(xs.values(), Evaluation::base);
          Eigen::VectorXd probe = xs.values();
          for (Eigen::Index j = 0; j < pi; ++j) {
            probe[off + j] += tau;
            const double h = probe[off + j] - xs.values()[off + j];
            out[j] = (values_at(level).value(probe, Evaluation::probe) - base) / h;
            probe[off + j] = xs.values()[off + j];
          }
        } else {
          const double tau = taus(level)[i];
          Eigen::VectorXd full_dir = Eigen::VectorXd::Zero(xs.values().size());
          full_dir.segment(off, pi) = local;
          out = finite_difference(xs.values(), full_dir, tau, level) * local;
        }
        est.push_back({i, std::move(out)});
        if (exact) {
          if (whole_block)
            exact->push_back({i, gi});
          else
            exact->push_back({i, gi.dot(local) * local});
        }
        break;
      }
    }

    SparseBlockDual estimate(s_, std::move(est));
    SparseBlockDual ghat = estimate.scaled(rho_);
    std::optional<SparseBlockDual> ex;
    if (exact) ex.emplace(s_, std::move(*exact));
    return OracleSample{std::move(ghat), rho_, std::move(o), std::move(estimate), std::move(ex)};
  }

 private:
  static void check_direction(const Eigen::VectorXd& e, std::size_t dim) {
    if (static_cast<std::size_t>(e.size()) != dim) throw std::invalid_argument("oracle direction has wrong dimension");
    if (std::abs(e.norm() - 1.0) > 1e-12) throw std::invalid_argument("oracle direction must be a unit vector");
  }

  void split_dense(const Eigen::VectorXd& v, std::vector<SparseBlockDual::Entry>& out) const {
    for (std::size_t i = 0; i < s_->num_blocks(); ++i)
      out.push_back({i, v.segment(static_cast<Eigen::Index>(s_->offset(i)), static_cast<Eigen::Index>(s_->dim(i)))});
  }

  NoisyValueOracle& values_at(double level) {
    values_.set_level(level);
    return values_;
  }

  // (f~(x + tau e) - f~(x)) / h, h the step actually taken along e after rounding
  double finite_difference(const Eigen::VectorXd& x, const Eigen::VectorXd& e, double tau, double level) {
    const double base = values_at(level).value(x, Evaluation::base);
    const Eigen::VectorXd xp = x + tau * e;
    const double h = (xp - x).dot(e);
    return (values_at(level).value(xp, Evaluation::probe) - base) / h;
  }

  // adversarial: push the derivative away from zero by the full level
  double scalar_noise(double d, double level, bool noisy) {
    if (!noisy) return 0.0;
    if (cfg_.noise.kind == NoiseKind::adversarial) return level * detail::sign_or_one(d);
    return noise_.uniform(-level, level);
  }

  // xi with ||xi||_{i,*} <= level
  Eigen::VectorXd block_noise(std::size_t i, const Eigen::VectorXd& g, double level, bool noisy) {
    const auto d = g.size();
    if (!noisy) return Eigen::VectorXd::Zero(d);
    Eigen::VectorXd v(d);
    double r = 1.0;
    if (cfg_.noise.kind == NoiseKind::adversarial) {
      if (s_->norm_kind(i) == NormKind::l1) {
        for (Eigen::Index j = 0; j < d; ++j) v[j] = detail::sign_or_one(g[j]);
        return level * v;
      }
      v = g;
      if (v.cwiseAbs().maxCoeff() == 0.0) v = Eigen::VectorXd::Unit(d, 0);
    } else {
      for (Eigen::Index j = 0; j < d; ++j) v[j] = noise_.normal();
      r = noise_.uniform();
    }
    const double n = s_->block_dual_norm(i, detail::as_span(v));
    if (n == 0.0) return Eigen::VectorXd::Zero(d);
    return (level * r / n) * v;
  }

  ProblemPtr problem_;
  OracleConfig cfg_;
  StructurePtr s_;
  double rho_ = 1.0;
  Rng sampling_;
  Rng noise_;
  NoisyValueOracle values_;
};

struct UnbiasedReport {
  double mean_error = 0.0;  // inf-norm (enumerated) or 2-norm (Monte-Carlo) of E ghat - grad f
  double stat_bound = 0.0;
  bool enumerated = false;
  std::size_t samples = 0;
  bool pass() const { return mean_error <= stat_bound; }
};

/// Deviation of E ghat(x) from grad f(x) at Delta = 0.
///
/// Finite outcome sets are summed exactly with weights rho * num / den (which
/// are exactly 1 for uniform laws); continuous laws use N Monte-Carlo samples
/// and a 5 sigma bound 5 rho ||grad f||_2 / sqrt(N). Finite differences add
/// their Taylor bias max_i tau_i L_i to the bound.
inline UnbiasedReport verify_unbiased(Oracle& oracle, const BlockPoint& x, std::size_t N) {
  const auto& s = *oracle.structure();
  const Eigen::VectorXd g = oracle.problem().gradient(x.values());
  const double rho = oracle.rho();
  double fd_slack = 0.0;
  if (is_derivative_free(oracle.config().variant)) {
    const auto t = oracle.taus(0.0);
    for (std::size_t i = 0; i < s.num_blocks(); ++i) fd_slack = std::max(fd_slack, t[i] * s.weight(i));
  }
  UnbiasedReport r;
  const auto outs = oracle.outcomes();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(g.size());
  if (!outs.empty()) {
    for (const auto& wo : outs) {
      const auto smp = oracle.sample_at(x, wo.outcome, 0.0);
      const double w = rho * wo.num / wo.den;
      for (const auto& e : smp.estimate.entries())
        mean.segment(static_cast<Eigen::Index>(s.offset(e.block)), e.values.size()) += w * e.values;
    }
    r.enumerated = true;
    r.samples = outs.size();
    r.mean_error = (mean - g).cwiseAbs().maxCoeff();
    r.stat_bound = fd_slack;
    return r;
  }
  if (N == 0) throw std::invalid_argument("verify_unbiased needs N > 0 for continuous sampling laws");
  for (std::size_t t = 0; t < N; ++t) {
    const auto smp = oracle.sample(x, 0.0);
    for (const auto& e : smp.ghat.entries())
      mean.segment(static_cast<Eigen::Index>(s.offset(e.block)), e.values.size()) += e.values;
  }
  mean /= static_cast<double>(N);
  r.samples = N;
  r.mean_error = (mean - g).norm();
  r.stat_bound = 5.0 * rho * g.norm() / std::sqrt(static_cast<double>(N)) + rho * fd_slack / 2.0;
  return r;
}

/// |<R_b R_f^T grad f(y), u - u+> - <grad f(y), u - u+>| with u+ = prox(u, alpha, ghat).
inline double prox_regularity_check(const ProxSetup& setup, const Problem& problem, const BlockPoint& y,
                                    const FeasiblePoint& u, double alpha, const OracleSample& sample) {
  if (!sample.exact) throw std::invalid_argument("prox_regularity_check needs a sample with its exact part");
  const FeasiblePoint up = prox_map(setup, u, alpha, sample.ghat);
  const BlockPoint d(u.point().structure(), u.point().values() - up.point().values());
  const double lhs = pairing(*sample.exact, d);
  const double rhs = pairing(problem.gradient(BlockPoint(d.structure(), y.values())), d);
  return std::abs(lhs - rhs);
}

}  // namespace rstm

#endif  // RSTM_ORACLES_HPP
