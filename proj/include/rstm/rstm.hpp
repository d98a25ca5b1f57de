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

#ifndef RSTM_RSTM_HPP
#define RSTM_RSTM_HPP

#include <rstm/method.hpp>
#include <rstm/oracles.hpp>
#include <rstm/problems.hpp>

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rstm {

/// P0 / (4 rho A_k).
inline double delta_schedule(double P0, double rho, double A) {
  if (!(P0 > 0.0)) throw std::invalid_argument("P0 must be positive");
  if (!(A > 0.0)) throw std::invalid_argument("A must be positive");
  return P0 / (4.0 * rho * A);
}

/// Smallest k with 3 P0^2 / (2 A_k) <= eps under the lower growth bound on A_k.
inline std::size_t iterations_for_accuracy(double eps, double P0, double rho) {
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(P0 >= 0.0)) throw std::invalid_argument("P0 must be non-negative");
  const double k = std::ceil(rho * std::sqrt(6.0 * P0 * P0 / eps) + 1.0 - 2.0 * rho);
  return k > 0.0 ? static_cast<std::size_t>(k) : 0;
}

enum class Regime { controlled, uncontrolled };

inline const char* to_string(Regime r) { return r == Regime::controlled ? "controlled" : "uncontrolled"; }

/// controlled: 3 P0^2 / (2 A); uncontrolled: 2 P0^2 / A + 4 A rho^2 delta^2.
inline double theoretical_bound(double A, double P0, double rho, double delta, Regime regime) {
  if (A <= 0.0) return std::numeric_limits<double>::infinity();
  if (regime == Regime::controlled) return 1.5 * P0 * P0 / A;
  return 2.0 * P0 * P0 / A + 4.0 * A * rho * rho * delta * delta;
}

/// Lower and upper growth bounds (k - 1 + 2 rho)^2 / (4 rho^2) and (k - 1 + 2 rho)^2 / rho^2.
inline std::pair<double, double> coefficient_bounds(std::size_t k, double rho) {
  const double t = static_cast<double>(k) - 1.0 + 2.0 * rho;
  return {t * t / (4.0 * rho * rho), t * t / (rho * rho)};
}

/// A point of Q^0: zero clamped into boxes, uniform on simplexes.
inline Eigen::VectorXd default_start(const Problem& p) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.total_dim()));
  Eigen::Index off = 0;
  for (std::size_t i = 0; i < p.num_blocks(); ++i) {
    const auto d = static_cast<Eigen::Index>(p.dims()[i]);
    const auto& b = p.feasible_set()[i];
    if (b.kind == ProxKind::euclidean_interval)
      u.segment(off, d) = u.segment(off, d).cwiseMax(b.lo).cwiseMin(b.hi);
    else if (b.kind == ProxKind::entropy_simplex)
      u.segment(off, d).setConstant(1.0 / static_cast<double>(d));
    off += d;
  }
  return u;
}

/// sqrt(A_0 (f(x_0) - f_*) + V[u_0](x_*)); the f_* tolerance is added to the gap.
inline double initial_potential(const Problem& problem, const ProxSetup& setup, const FeasiblePoint& u0, double rho) {
  const auto& opt = problem.optimum();
  if (!opt) throw std::invalid_argument(problem.name() + ": optimum unknown, supply P0");
  const double A0 = initial_coefficient(rho);
  const double gap = std::max(problem.suboptimality(u0.point().values()), 0.0) + opt->tolerance;
  const BlockPoint xs(u0.point().structure(), opt->point);
  const double p2 = A0 * gap + bregman(setup, u0.point(), xs);
  return std::sqrt(p2);
}

struct StopRule {
  enum class Kind { fixed_iters, target_accuracy };
  Kind kind = Kind::fixed_iters;
  std::size_t iterations = 0;
  double epsilon = 0.0;

  static StopRule fixed(std::size_t k) { return {Kind::fixed_iters, k, 0.0}; }
  static StopRule accuracy(double eps) { return {Kind::target_accuracy, 0, eps}; }
};

struct RunConfig {
  OracleConfig oracle;
  std::optional<double> rho;  // defaults to the oracle's normalizing coefficient
  Regime regime = Regime::uncontrolled;
  std::optional<double> P0;   // defaults to the value computed from the stored optimum
  StopRule stop = StopRule::fixed(100);
  Eigen::VectorXd u0;         // empty: default_start
};

struct TraceRecord {
  std::size_t k = 0;
  double A = 0.0;
  double alpha = 0.0;
  double f = 0.0;
  double residual = std::numeric_limits<double>::quiet_NaN();
  double delta = 0.0;  // bias bound of the oracle call that produced this iterate
  std::string support;
  std::int64_t wall_ns = 0;
};

struct Trace {
  std::vector<TraceRecord> records;
  double rho = 1.0;
  double P0 = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t seed = 0;
  std::size_t iterations = 0;
  std::string status;
  Eigen::VectorXd x_final;
};

struct IterateResult {
  RstmState state;
  OracleSample sample;
  double delta = 0.0;
};

/// One step with the oracle at noise level `level`.
inline IterateResult iterate(const RstmState& s, Oracle& oracle, const ProxSetup& setup, double level,
                             bool with_exact = false) {
  std::optional<OracleSample> kept;
  RstmState next = advance(s, setup, [&](const BlockPoint& y) {
    kept.emplace(oracle.sample(y, level, with_exact));
    if (kept->rho != s.rho) {
      kept->ghat = kept->estimate.scaled(s.rho);
      kept->rho = s.rho;
    }
    return kept->ghat;
  });
  return {std::move(next), std::move(*kept), oracle.bias_bound(level).delta};
}

using StepObserver = std::function<void(const RstmState& before, const IterateResult& after)>;

/// Runs the method from u0 until the stopping rule fires.
///
/// In the controlled regime each oracle call is made at the Delta whose bias
/// bound equals P0 / (4 rho A_{k+1}), A_{k+1} being the coefficient of the
/// step under way.
inline Trace solve(const ProblemPtr& problem, const RunConfig& cfg, const StepObserver& observer = {}) {
  Oracle oracle(problem, cfg.oracle);
  const ProxSetup setup = oracle.setup();
  const double rho = cfg.rho.value_or(oracle.rho());
  if (!(rho >= 1.0)) throw std::invalid_argument("rho must be >= 1");
  const Eigen::VectorXd u0v = cfg.u0.size() ? cfg.u0 : default_start(*problem);
  if (static_cast<std::size_t>(u0v.size()) != problem->total_dim()) throw std::invalid_argument("u0 has wrong dimension");
  FeasiblePoint u0 = FeasiblePoint::make(setup, BlockPoint(oracle.structure(), u0v));

  Trace t;
  t.rho = rho;
  t.seed = cfg.oracle.seed;
  if (cfg.P0) {
    if (!(*cfg.P0 > 0.0)) throw std::invalid_argument("P0 must be positive");
    t.P0 = *cfg.P0;
  } else if (problem->optimum()) {
    t.P0 = initial_potential(*problem, setup, u0, rho);
  }
  const bool need_p0 = cfg.regime == Regime::controlled || cfg.stop.kind == StopRule::Kind::target_accuracy;
  if (need_p0 && !(t.P0 > 0.0)) throw std::invalid_argument("this run needs a positive P0");
  if (cfg.regime == Regime::controlled && is_derivative_free(cfg.oracle.variant) &&
      cfg.oracle.tau_policy != TauPolicy::balanced)
    throw std::invalid_argument("the controlled regime shrinks tau with Delta; use the balanced tau policy");

  const std::size_t K = cfg.stop.kind == StopRule::Kind::fixed_iters ? cfg.stop.iterations
                                                                     : iterations_for_accuracy(cfg.stop.epsilon, t.P0, rho);
  const auto t0 = std::chrono::steady_clock::now();
  auto record = [&](const RstmState& s, double delta, std::string support) {
    TraceRecord r;
    r.k = s.k;
    r.A = s.A;
    r.alpha = s.alpha;
    r.f = problem->value(s.x.values());
    if (problem->optimum()) r.residual = problem->suboptimality(s.x.values());
    r.delta = delta;
    r.support = std::move(support);
    r.wall_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - t0).count();
    t.records.push_back(std::move(r));
  };

  RstmState st = init_state(rho, std::move(u0));
  record(st, 0.0, "");
  for (std::size_t k = 0; k < K; ++k) {
    double level = oracle.level();
    if (cfg.regime == Regime::controlled) {
      const double A_next = next_coefficients(st.A, rho).A;
      level = cfg.oracle.noise.kind == NoiseKind::none ? 0.0 : oracle.level_for_delta(delta_schedule(t.P0, rho, A_next));
      if (level == 0.0 && is_derivative_free(cfg.oracle.variant))
        throw std::invalid_argument("finite-difference oracles need a noise model with positive level");
    }
    IterateResult res = iterate(st, oracle, setup, level);
    if (observer) observer(st, res);
    record(res.state, res.delta, res.sample.meta.label());
    st = std::move(res.state);
  }
  t.iterations = K;
  t.status = cfg.stop.kind == StopRule::Kind::fixed_iters ? "fixed_iters" : "target_accuracy";
  t.x_final = st.x.values();
  return t;
}

}  // namespace rstm

#endif  // RSTM_RSTM_HPP
