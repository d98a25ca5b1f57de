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

// Numerical checks of the method's guarantees. Each check returns a Claim
// with the measured quantity and the bound it is held to.

#ifndef RSTM_VERIFY_HPP
#define RSTM_VERIFY_HPP

#include <rstm/experiment.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

namespace rstm {

struct Claim {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

using Suite = std::vector<Claim>;

namespace verify_detail {

inline Claim timed(const std::string& name, const std::function<void(Claim&)>& body) {
  Claim c;
  c.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  body(c);
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

inline std::string num(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

inline Eigen::VectorXd normal_vector(Rng& r, Eigen::Index n, double scale = 1.0) {
  Eigen::VectorXd v(n);
  for (Eigen::Index j = 0; j < n; ++j) v[j] = scale * r.normal();
  return v;
}

inline Eigen::VectorXd simplex_point(Rng& r, std::size_t d) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(d));
  for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = -std::log(1.0 - r.uniform()) + 1e-3;
  return v / v.sum();
}

/// A point of Q^0 for the problem's feasible set, random inside boxes.
inline Eigen::VectorXd random_feasible(const Problem& p, Rng& r) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(p.total_dim()));
  Eigen::Index off = 0;
  for (std::size_t i = 0; i < p.num_blocks(); ++i) {
    const auto d = static_cast<Eigen::Index>(p.dims()[i]);
    const auto& b = p.feasible_set()[i];
    if (b.kind == ProxKind::entropy_simplex) {
      x.segment(off, d) = simplex_point(r, p.dims()[i]);
    } else if (b.kind == ProxKind::euclidean_interval) {
      for (Eigen::Index j = 0; j < d; ++j) {
        const double lo = std::isfinite(b.lo[j]) ? b.lo[j] : std::min(b.hi[j], 0.0) - 2.0;
        const double hi = std::isfinite(b.hi[j]) ? b.hi[j] : std::max(b.lo[j], 0.0) + 2.0;
        x[off + j] = r.uniform(lo, hi);
      }
    } else {
      x.segment(off, d) = normal_vector(r, d);
    }
    off += d;
  }
  return x;
}

inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double a = std::log(x[i]), b = std::log(y[i]);
    n += 1;
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  const double den = n * sxx - sx * sx;
  if (n < 2 || den == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / den;
}

/// Mean residual per k over seeds.
inline std::vector<double> mean_residuals(const ProblemPtr& p, RunConfig cfg, std::size_t seeds) {
  std::vector<double> mean;
  for (std::size_t s = 0; s < seeds; ++s) {
    cfg.oracle.seed = s;
    const Trace t = solve(p, cfg);
    if (mean.empty()) mean.assign(t.records.size(), 0.0);
    for (std::size_t k = 0; k < t.records.size(); ++k) mean[k] += t.records[k].residual / double(seeds);
  }
  return mean;
}

// Fixed test instances.

inline std::shared_ptr<SeparableQuadratic> separable_instance(std::size_t n, std::uint64_t seed, bool boxed = false,
                                                              std::size_t block_dim = 1) {
  Rng r(seed);
  std::vector<double> L;
  for (std::size_t i = 0; i < n; ++i) L.push_back(std::pow(10.0, r.uniform()));
  const auto p = static_cast<Eigen::Index>(n * block_dim);
  Eigen::VectorXd c = normal_vector(r, p, 0.5);
  std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> box;
  if (boxed) box.emplace(Eigen::VectorXd::Constant(p, -0.5), Eigen::VectorXd::Constant(p, 0.5));
  return make_separable_quadratic(std::move(L), std::vector<std::size_t>(n, block_dim), std::move(c), std::move(box));
}

/// Blocks alternate between unconstrained and boxed.
inline std::shared_ptr<SeparableQuadratic> mixed_instance(std::uint64_t seed) {
  Rng r(seed);
  const std::vector<std::size_t> dims{2, 3, 1, 2};
  std::vector<double> L;
  for (std::size_t i = 0; i < dims.size(); ++i) L.push_back(std::pow(10.0, r.uniform()));
  const Eigen::Index p = 8;
  Eigen::VectorXd c = normal_vector(r, p);
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::VectorXd lo = Eigen::VectorXd::Constant(p, -inf), hi = Eigen::VectorXd::Constant(p, inf);
  lo.segment(2, 3).setConstant(-0.5);
  hi.segment(2, 3).setConstant(0.5);
  lo.segment(6, 2).setConstant(-1.0);
  hi.segment(6, 2).setConstant(0.25);
  return make_separable_quadratic(std::move(L), dims, std::move(c), std::make_pair(lo, hi));
}

inline std::shared_ptr<SimplexQuadratic> simplex_instance(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng r(seed);
  const auto p = static_cast<Eigen::Index>(n * d);
  Eigen::MatrixXd M = detail::gaussian(r, p + 2, p) / std::sqrt(double(p));
  Eigen::VectorXd b = normal_vector(r, p + 2);
  return make_simplex_quadratic(std::move(M), std::move(b), std::vector<std::size_t>(n, d));
}

inline std::shared_ptr<CoupledQuadratic> coupled_instance(std::vector<std::size_t> dims, std::uint64_t seed) {
  // minimizer scaled to 0.25 Q 1 so that |f| stays below 1 around it
  const auto q = make_spectral_quadratic(seed, dims, 1e-2, 4.0);
  return make_coupled_quadratic(q->matrix(), 0.25 * q->rhs(), std::move(dims));
}

struct Pairing {
  OracleVariant variant;
  ProblemPtr problem;
};

/// Every oracle with each feasible-set family it admits.
inline std::vector<Pairing> pairings() {
  const ProblemPtr sep = separable_instance(5, 11);
  const ProblemPtr sep_box = separable_instance(5, 12, true);
  const ProblemPtr sep_blocks = separable_instance(3, 13, true, 3);
  const ProblemPtr coupled_scalar = coupled_instance({1, 1, 1, 1, 1, 1}, 14);
  const ProblemPtr coupled_blocks = coupled_instance({2, 3, 2}, 15);
  const ProblemPtr simplex = simplex_instance(3, 3, 16);
  const ProblemPtr mixed = mixed_instance(17);
  using V = OracleVariant;
  return {
      {V::full, coupled_blocks},       {V::full, simplex},           {V::full, sep_box},
      {V::dir, coupled_scalar},        {V::df_dir, coupled_scalar},  {V::dir, coupled_blocks},
      {V::df_dir, coupled_blocks},     {V::coord, sep_box},          {V::coord, coupled_scalar},
      {V::df_coord, sep_box},          {V::df_coord, coupled_scalar}, {V::coord, sep},
      {V::block, simplex},             {V::block, coupled_blocks},   {V::block, sep_blocks},
      {V::df_block, simplex},          {V::df_block, coupled_blocks}, {V::df_block, sep_blocks},
      {V::block_rand, mixed},          {V::df_block_rand, mixed},    {V::block_rand, sep_blocks},
      {V::df_block_rand, sep_blocks},  {V::block_rand, coupled_blocks}, {V::df_block_rand, coupled_blocks},
  };
}

}  // namespace verify_detail

// ---------------------------------------------------------------------------
// coefficients

inline const std::vector<double>& verification_rhos() {
  static const std::vector<double> r{1.0, 1.5, 2.0, 10.0, 100.0};
  return r;
}

/// (k - 1 + 2 rho)^2 / (4 rho^2) <= A_k <= (k - 1 + 2 rho)^2 / rho^2, k = 1..K.
inline Claim check_coefficient_sandwich(std::size_t K = 10'000, double slack = 1e-12) {
  return verify_detail::timed("coefficient sandwich", [&](Claim& c) {
    double worst = -std::numeric_limits<double>::infinity();
    for (double rho : verification_rhos()) {
      double A = initial_coefficient(rho);
      for (std::size_t k = 1; k <= K; ++k) {
        A = next_coefficients(A, rho).A;
        const auto [lo, hi] = coefficient_bounds(k, rho);
        worst = std::max({worst, (lo - A) / lo, (A - hi) / hi});
      }
    }
    c.measured = worst;
    c.bound = slack;
    c.pass = worst <= slack;
    c.detail = "max relative violation over rho in {1,1.5,2,10,100}, k <= " + std::to_string(K);
  });
}

/// |A_{k+1} - rho^2 alpha_{k+1}^2| <= tol A_{k+1}.
inline Claim check_coefficient_consistency(std::size_t K = 10'000, double tol = 1e-12) {
  return verify_detail::timed("coefficient equation", [&](Claim& c) {
    double worst = 0.0;
    for (double rho : verification_rhos()) {
      double A = initial_coefficient(rho);
      for (std::size_t k = 0; k < K; ++k) {
        const auto [alpha, An] = next_coefficients(A, rho);
        worst = std::max(worst, std::abs(An - rho * rho * alpha * alpha) / An);
        A = An;
      }
    }
    c.measured = worst;
    c.bound = tol;
    c.pass = worst <= tol;
    c.detail = "max |A - rho^2 alpha^2| / A";
  });
}

/// alpha_k / A_k is non-increasing and <= 1 / rho for k >= 1.
inline Claim check_step_ratio(std::size_t K = 10'000) {
  return verify_detail::timed("step ratio alpha/A", [&](Claim& c) {
    double worst = -std::numeric_limits<double>::infinity();
    for (double rho : verification_rhos()) {
      double A = initial_coefficient(rho), prev = std::numeric_limits<double>::infinity();
      for (std::size_t k = 1; k <= K; ++k) {
        const auto [alpha, An] = next_coefficients(A, rho);
        const double r = alpha / An;
        if (k > 1) worst = std::max(worst, (r - prev) / prev);
        worst = std::max(worst, r * rho - 1.0);
        prev = r;
        A = An;
      }
    }
    c.bound = 1e-12;
    c.measured = worst;
    c.pass = worst <= c.bound;
    c.detail = "max relative increase of alpha/A and excess over 1/rho";
  });
}

// ---------------------------------------------------------------------------
// gamma and feasibility

/// gamma_k^l >= -1e-12 and sum_l gamma_k^l = 1 within 1e-10 (k <= K, rho in {2, 10}),
/// and every x_k, y_k, u_k of box and simplex runs feasible within 1e-10.
inline Claim check_gamma_and_feasibility(std::size_t K = 1000) {
  return verify_detail::timed("convex combinations and feasibility", [&](Claim& c) {
    double min_gamma = std::numeric_limits<double>::infinity(), sum_err = 0.0;
    for (double rho : {2.0, 10.0})
      for (std::size_t k = 0; k <= K; ++k) {
        const auto g = gamma_table(k, rho);
        double sum = 0.0;
        for (double v : g.coefficients) {
          min_gamma = std::min(min_gamma, v);
          sum += v;
        }
        sum_err = std::max(sum_err, std::abs(sum - 1.0));
      }
    double infeasible = 0.0;
    std::string why;
    auto watch = [&](const ProblemPtr& p, OracleVariant v) {
      RunConfig cfg;
      cfg.oracle.variant = v;
      cfg.oracle.seed = 3;
      if (is_derivative_free(v)) cfg.oracle.noise = {NoiseKind::uniform, 1e-10};
      cfg.stop = StopRule::fixed(K);
      Oracle o(p, cfg.oracle);
      const ProxSetup setup = o.setup();
      solve(p, cfg, [&](const RstmState&, const IterateResult& r) {
        for (const BlockPoint* pt : {&r.state.x, &r.state.y, &r.state.u.point()})
          if (auto w = setup.violation(*pt, false, 1e-10); !w.empty()) {
            infeasible += 1;
            if (why.empty()) why = w;
          }
      });
    };
    watch(verify_detail::separable_instance(10, 21, true), OracleVariant::coord);
    watch(verify_detail::simplex_instance(5, 3, 22), OracleVariant::block);
    watch(verify_detail::mixed_instance(23), OracleVariant::df_block_rand);
    c.measured = std::max(-min_gamma, 0.0);
    c.bound = 1e-12;
    c.pass = -min_gamma <= 1e-12 && sum_err <= 1e-10 && infeasible == 0;
    c.detail = "min gamma " + verify_detail::num(min_gamma) + ", max |sum - 1| " + verify_detail::num(sum_err) +
               ", infeasible iterates " + verify_detail::num(infeasible) + (why.empty() ? "" : " (" + why + ")");
  });
}

// ---------------------------------------------------------------------------
// oracles

/// E ghat = grad f at Delta = 0: exact for finite outcome sets, 5 sigma for sphere laws.
inline Claim check_unbiasedness(std::size_t N = 100'000, double tau = 1e-6) {
  return verify_detail::timed("oracle unbiasedness", [&](Claim& c) {
    using V = OracleVariant;
    using verify_detail::num;
    const ProblemPtr sep = verify_detail::separable_instance(5, 31);
    const ProblemPtr blocks = verify_detail::coupled_instance({2, 3}, 32);
    const ProblemPtr boxed = verify_detail::separable_instance(3, 33, true, 2);
    const ProblemPtr mixed = verify_detail::mixed_instance(34);
    const ProblemPtr scalar = verify_detail::coupled_instance({1, 1, 1, 1}, 35);
    struct Case {
      V v;
      ProblemPtr p;
    };
    const std::vector<Case> cases{{V::full, blocks},   {V::coord, sep},        {V::block, blocks},
                                  {V::block_rand, boxed}, {V::df_coord, sep},  {V::df_block, blocks},
                                  {V::df_block_rand, boxed}, {V::dir, scalar}, {V::df_dir, scalar},
                                  {V::block_rand, mixed}, {V::df_block_rand, mixed}};
    Rng r(36);
    bool ok = true;
    double worst = 0.0;
    std::string d;
    for (const auto& cs : cases) {
      OracleConfig cfg;
      cfg.variant = cs.v;
      cfg.tau_policy = TauPolicy::fixed;
      cfg.tau = tau;
      cfg.seed = 37;
      Oracle o(cs.p, cfg);
      const BlockPoint x(o.structure(), verify_detail::random_feasible(*cs.p, r));
      const auto rep = verify_unbiased(o, x, N);
      // enumerated exact-derivative laws must be exactly unbiased
      const bool exact_zero = rep.enumerated && !is_derivative_free(cs.v);
      const bool pass = exact_zero ? rep.mean_error == 0.0 : rep.pass();
      ok = ok && pass;
      const double ratio = exact_zero ? rep.mean_error : rep.mean_error / rep.stat_bound;
      worst = std::max(worst, ratio);
      d += std::string(to_string(cs.v)) + (rep.enumerated ? "[exact]" : "[mc]") + "=" + num(rep.mean_error) + "/" +
           num(rep.stat_bound) + (pass ? "" : "!") + " ";
    }
    c.measured = worst;
    c.bound = 1.0;
    c.pass = ok;
    c.detail = d;
  });
}

/// dual_norm(R_b xi) <= bias_bound + 1e-12 for every sample, both noise models, Delta in {1e-4, 1e-6}.
inline Claim check_bias_bounds(std::size_t samples = 10'000) {
  return verify_detail::timed("oracle bias bounds", [&](Claim& c) {
    double worst = -std::numeric_limits<double>::infinity();
    std::size_t total = 0;
    double max_f = 0.0;
    std::string offender;
    Rng r(41);
    for (const auto& pr : verify_detail::pairings()) {
      if (pr.variant == OracleVariant::full) continue;
      for (NoiseKind kind : {NoiseKind::adversarial, NoiseKind::uniform})
        for (double level : {1e-4, 1e-6}) {
          OracleConfig cfg;
          cfg.variant = pr.variant;
          cfg.noise = {kind, level};
          cfg.seed = 42 + total;
          Oracle o(pr.problem, cfg);
          const double bound = o.bias_bound().delta;
          const Eigen::VectorXd& xs = pr.problem->optimum()->point;
          for (std::size_t t = 0; t < samples; ++t) {
            // near the minimizer |f| stays O(f_*), keeping cancellation in f(x + tau e) - f(x) below the slack
            const BlockPoint x(o.structure(), 0.9 * xs + 0.1 * verify_detail::random_feasible(*pr.problem, r));
            max_f = std::max(max_f, std::abs(pr.problem->value(x)));
            const auto smp = o.sample(x, std::nullopt, true);
            const double err = dual_norm(*smp.bias()) - bound;
            if (err > worst) {
              worst = err;
              offender = std::string(to_string(pr.variant)) + " on " + pr.problem->name() + "/" + to_string(kind) +
                         "/" + verify_detail::num(level) + " |f| " + verify_detail::num(std::abs(pr.problem->value(x)));
            }
            ++total;
          }
        }
    }
    c.measured = worst;
    c.bound = 1e-12;
    c.pass = worst <= 1e-12;
    c.detail = "max (||R_b xi||_* - delta) over " + std::to_string(total) + " samples, worst case " + offender +
               ", max |f| " + verify_detail::num(max_f);
  });
}

// ---------------------------------------------------------------------------
// prox

/// Assumption 2 residual over random (oracle, prox, state) triples.
inline Claim check_prox_regularity(std::size_t trials = 1000) {
  return verify_detail::timed("prox regularity", [&](Claim& c) {
    const auto prs = verify_detail::pairings();
    Rng r(51);
    double worst = 0.0;
    std::string offender;
    for (std::size_t t = 0; t < trials; ++t) {
      const auto& pr = prs[t % prs.size()];
      OracleConfig cfg;
      cfg.variant = pr.variant;
      if (pr.variant != OracleVariant::full) cfg.noise = {t % 2 ? NoiseKind::adversarial : NoiseKind::uniform, 1e-3};
      cfg.seed = 52 + t;
      Oracle o(pr.problem, cfg);
      const ProxSetup setup = o.setup();
      const BlockPoint y(o.structure(), verify_detail::random_feasible(*pr.problem, r));
      const FeasiblePoint u =
          FeasiblePoint::make(setup, BlockPoint(o.structure(), verify_detail::random_feasible(*pr.problem, r)));
      const double alpha = std::exp(r.uniform(-3.0, 1.0));
      const auto smp = o.sample(y, std::nullopt, true);
      const double res = prox_regularity_check(setup, *pr.problem, y, u, alpha, smp);
      const FeasiblePoint up = prox_map(setup, u, alpha, smp.ghat);
      const BlockPoint d(o.structure(), u.point().values() - up.point().values());
      const double scale = 1.0 + std::abs(pairing(pr.problem->gradient(y), d));
      if (res / scale > worst) {
        worst = res / scale;
        offender = std::string(to_string(pr.variant)) + " on " + pr.problem->name();
      }
    }
    c.measured = worst;
    c.bound = 1e-9;
    c.pass = worst <= 1e-9;
    c.detail = "max |<R_b R_f^T g, u - u+> - <g, u - u+>| / (1 + |<g, u - u+>|) over " + std::to_string(trials) +
               " triples" + (offender.empty() ? "" : ", worst " + offender);
  });
}

/// prox_map against >= `cloud` random feasible candidates on V[u](x) + alpha <g, x>.
inline Claim check_prox_optimality(std::size_t instances = 1000, std::size_t cloud = 100'000) {
  return verify_detail::timed("prox optimality", [&](Claim& c) {
    Rng r(61);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < instances; ++t) {
      const bool entropy = t % 2 == 0;
      const std::size_t d = 1 + r.index(4);
      const double beta = std::exp(r.uniform(-1.0, 2.0));
      const double alpha = std::exp(r.uniform(-2.0, 1.0));
      const auto D = static_cast<Eigen::Index>(d);
      const auto s = std::make_shared<const BlockStructure>(
          std::vector<BlockSpec>{{d, beta, entropy ? NormKind::l1 : NormKind::euclidean, {}}});
      Eigen::VectorXd lo(D), hi(D), u(D);
      std::vector<BlockProx> bp;
      if (entropy) {
        u = verify_detail::simplex_point(r, d);
        bp.push_back(BlockProx::simplex());
      } else {
        for (Eigen::Index j = 0; j < D; ++j) {
          lo[j] = r.uniform(-2.0, 0.0);
          hi[j] = lo[j] + r.uniform(0.1, 2.0);
          u[j] = r.uniform(lo[j], hi[j]);
        }
        bp.push_back(BlockProx::interval(lo, hi));
      }
      const ProxSetup setup(s, bp);
      const Eigen::VectorXd g = verify_detail::normal_vector(r, D, 2.0);
      const FeasiblePoint uf = FeasiblePoint::make(setup, BlockPoint(s, u));
      const Eigen::VectorXd xp = prox_map(setup, uf, alpha, dual_embed(s, 0, g)).point().values();
      // independent objective evaluation
      auto phi = [&](const Eigen::VectorXd& x) {
        double v = 0.0;
        if (entropy) {
          for (Eigen::Index j = 0; j < D; ++j)
            if (x[j] > 0.0) v += x[j] * std::log(x[j] / u[j]);
          v += u.sum() - x.sum();
        } else {
          v = 0.5 * (x - u).squaredNorm();
        }
        return beta * v + alpha * g.dot(x);
      };
      const double best_prox = phi(xp);
      double best_cloud = std::numeric_limits<double>::infinity();
      Eigen::VectorXd x(D);
      for (std::size_t m = 0; m < cloud; ++m) {
        if (entropy) {
          // faces of the simplex are hit with positive probability
          for (Eigen::Index j = 0; j < D; ++j) x[j] = r.uniform() < 0.2 ? 0.0 : -std::log(1.0 - r.uniform());
          const double sum = x.sum();
          if (sum == 0.0) continue;
          x /= sum;
        } else {
          for (Eigen::Index j = 0; j < D; ++j) {
            const double w = r.uniform();
            x[j] = w < 0.15 ? lo[j] : w < 0.3 ? hi[j] : r.uniform(lo[j], hi[j]);
          }
        }
        best_cloud = std::min(best_cloud, phi(x));
      }
      worst = std::max(worst, best_prox - best_cloud);
    }
    c.measured = worst;
    c.bound = 1e-8;
    c.pass = worst <= 1e-8;
    c.detail = "max (phi(prox) - min phi(cloud)) over " + std::to_string(instances) + " entropy/box instances, " +
               std::to_string(cloud) + " candidates each";
  });
}

/// V[z](x) >= 0.5 ||x - z||_E^2 on random feasible pairs of every setup.
inline Claim check_bregman_lower_bound(std::size_t pairs = 10'000) {
  return verify_detail::timed("bregman lower bound", [&](Claim& c) {
    Rng r(71);
    const ProblemPtr probs[] = {verify_detail::simplex_instance(2, 4, 72), verify_detail::mixed_instance(73),
                                verify_detail::coupled_instance({2, 2}, 74)};
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < pairs; ++t) {
      const auto& p = probs[t % 3];
      const ProxSetup setup = p->setup();
      const BlockPoint z(setup.structure(), verify_detail::random_feasible(*p, r));
      const BlockPoint x(setup.structure(), verify_detail::random_feasible(*p, r));
      const double n = primal_norm(BlockPoint(setup.structure(), x.values() - z.values()));
      worst = std::max(worst, 0.5 * n * n - bregman(setup, z, x));
    }
    c.measured = worst;
    c.bound = 1e-12;
    c.pass = worst <= 1e-12;
    c.detail = "max (0.5 ||x - z||^2 - V[z](x))";
  });
}

// ---------------------------------------------------------------------------
// smoothness

/// Declared L_i certify block-wise Lipschitz gradients; grad consistency; stored optima.
inline Claim check_problem_smoothness(std::size_t samples = 1000) {
  return verify_detail::timed("problem smoothness", [&](Claim& c) {
    Rng r(81);
    const ProblemPtr probs[] = {verify_detail::separable_instance(6, 82, true), verify_detail::mixed_instance(83),
                                verify_detail::coupled_instance({2, 3, 1}, 84), verify_detail::simplex_instance(3, 3, 85),
                                make_tridiagonal_quadratic(12, 3.0, {4, 4, 4})};
    double lip = 0.0, smooth = -std::numeric_limits<double>::infinity(), grad = 0.0, opt = 0.0;
    for (const auto& p : probs) {
      lip = std::max(lip, block_lipschitz_ratio(*p, samples, r));
      smooth = std::max(smooth, block_smoothness_violation(*p, samples, r));
      grad = std::max(grad, grad_check(*p, verify_detail::random_feasible(*p, r)).max_error);
      const auto& o = *p->optimum();
      if (const auto* s = dynamic_cast<const SimplexQuadratic*>(p.get()))
        opt = std::max(opt, s->frank_wolfe_gap(o.point) / 1e-8);
      else if (p->feasible_set()[0].kind == ProxKind::euclidean_unconstrained && p->name() != "separable_quadratic")
        opt = std::max(opt, dual_norm(p->gradient(BlockPoint(p->structure(), o.point))) / 1e-10);
    }
    c.measured = lip;
    c.bound = 1.0 + 1e-10;
    c.pass = lip <= 1.0 + 1e-10 && smooth <= 1e-12 && grad <= 1e-6 && opt <= 1.0;
    c.detail = "max block Lipschitz ratio " + verify_detail::num(lip) + ", smoothness violation " +
               verify_detail::num(smooth) + ", gradient check " + verify_detail::num(grad) +
               ", optimum residual / tolerance " + verify_detail::num(opt);
  });
}

/// f(x') <= f(y') + <grad f(y'), x' - y'> + 0.5 ||x' - y'||_E^2 + 1e-9 along every step.
inline Claim check_step_smoothness(std::size_t K = 300) {
  return verify_detail::timed("smoothness along steps", [&](Claim& c) {
    double worst = -std::numeric_limits<double>::infinity();
    std::string offender;
    for (const auto& pr : verify_detail::pairings()) {
      RunConfig cfg;
      cfg.oracle.variant = pr.variant;
      if (pr.variant != OracleVariant::full) cfg.oracle.noise = {NoiseKind::uniform, 1e-6};
      cfg.oracle.seed = 91;
      cfg.stop = StopRule::fixed(K);
      const auto& f = *pr.problem;
      solve(pr.problem, cfg, [&](const RstmState&, const IterateResult& r) {
        const BlockPoint& x = r.state.x;
        const BlockPoint& y = r.state.y;
        const BlockPoint h(x.structure(), x.values() - y.values());
        const double n = primal_norm(h);
        const double gap = f.value(x) - (f.value(y) + pairing(f.gradient(y), h) + 0.5 * n * n);
        if (gap > worst) {
          worst = gap;
          offender = std::string(to_string(pr.variant)) + " on " + f.name();
        }
      });
    }
    c.measured = worst;
    c.bound = 1e-9;
    c.pass = worst <= 1e-9;
    c.detail = "max smoothness excess over all steps, worst " + offender;
  });
}

// ---------------------------------------------------------------------------
// convergence

/// Controlled regime: mean residual over seeds <= slack * 3 P0^2 / (2 A_k) for all k <= K.
inline Claim check_controlled_rate(std::size_t seeds = 50, std::size_t K = 1000, double slack = 1.05) {
  return verify_detail::timed("controlled-error rate", [&](Claim& c) {
    double worst = 0.0;
    std::string d;
    {
      const ProblemPtr p = verify_detail::separable_instance(10, 101);
      RunConfig cfg;
      cfg.oracle.variant = OracleVariant::coord;
      cfg.regime = Regime::controlled;
      cfg.stop = StopRule::fixed(K);
      const auto mean = verify_detail::mean_residuals(p, cfg, seeds);
      const Trace t0 = solve(p, cfg);
      double w = 0.0;
      for (std::size_t k = 0; k < mean.size(); ++k)
        w = std::max(w, mean[k] / theoretical_bound(t0.records[k].A, t0.P0, t0.rho, 0.0, Regime::controlled));
      worst = std::max(worst, w);
      d += "coord/separable n=10 ratio " + verify_detail::num(w);
    }
    {
      const auto sp = verify_detail::simplex_instance(5, 3, 102);
      const ProblemPtr p = sp;
      RunConfig cfg;
      cfg.oracle.variant = OracleVariant::block;
      cfg.oracle.noise = {NoiseKind::adversarial, 0.0};
      cfg.regime = Regime::controlled;
      cfg.stop = StopRule::fixed(K);
      const auto mean = verify_detail::mean_residuals(p, cfg, seeds);
      const Trace t0 = solve(p, cfg);
      const double tol = sp->optimum()->tolerance;
      double w = 0.0;
      for (std::size_t k = 0; k < mean.size(); ++k)
        w = std::max(w, (mean[k] + tol) / theoretical_bound(t0.records[k].A, t0.P0, t0.rho, 0.0, Regime::controlled));
      worst = std::max(worst, w);
      d += ", block/simplex n=5 p_i=3 ratio " + verify_detail::num(w) + " (f_* tolerance " + verify_detail::num(tol) + ")";
    }
    c.measured = worst;
    c.bound = slack;
    c.pass = worst <= slack;
    c.detail = "max_k mean residual / (3 P0^2 / 2 A_k): " + d;
  });
}

/// Uncontrolled regime with fixed delta: bound 2 P0^2 / A_k + 4 A_k rho^2 delta^2 and monotone floors.
inline Claim check_uncontrolled_rate(std::size_t seeds = 50, std::size_t K = 1000) {
  return verify_detail::timed("fixed-error rate and floors", [&](Claim& c) {
    const ProblemPtr p = verify_detail::separable_instance(10, 111);
    double worst = 0.0;
    std::vector<double> floors;
    std::string d;
    for (double delta : {1e-2, 1e-3}) {
      RunConfig cfg;
      cfg.oracle.variant = OracleVariant::coord;
      cfg.oracle.noise.kind = NoiseKind::adversarial;
      cfg.stop = StopRule::fixed(K);
      cfg.oracle.noise.level = Oracle(p, cfg.oracle).level_for_delta(delta);
      const auto mean = verify_detail::mean_residuals(p, cfg, seeds);
      const Trace t0 = solve(p, cfg);
      double w = 0.0;
      for (std::size_t k = 0; k < mean.size(); ++k)
        w = std::max(w, mean[k] / theoretical_bound(t0.records[k].A, t0.P0, t0.rho, delta, Regime::uncontrolled));
      const std::size_t from = K - K / 10;
      double fl = 0.0;
      for (std::size_t k = from; k <= K; ++k) fl += mean[k];
      fl /= double(K - from + 1);
      floors.push_back(fl);
      worst = std::max(worst, w);
      d += "delta=" + verify_detail::num(delta) + ": ratio " + verify_detail::num(w) + ", floor " + verify_detail::num(fl) +
           "; ";
    }
    const bool monotone = floors[0] > floors[1];
    c.measured = worst;
    c.bound = 1.0;
    c.pass = worst <= 1.0 && monotone;
    c.detail = d + (monotone ? "floors ordered" : "floors NOT ordered");
  });
}

/// Log-log residual slope over k in [100, 1000] (deterministic) and k/n in [100, 1000] (randomized).
inline Claim check_acceleration(std::size_t seeds = 50, double target = -1.8) {
  return verify_detail::timed("acceleration slope", [&](Claim& c) {
    const std::size_t n = 10;
    const ProblemPtr p = make_spectral_quadratic(121, std::vector<std::size_t>(n, 10), 1e-8, 1.0);
    RunConfig det;
    det.oracle.variant = OracleVariant::full;
    det.stop = StopRule::fixed(1000);
    const Trace t = solve(p, det);
    std::vector<double> ks, rs;
    for (const auto& r : t.records)
      if (r.k >= 100) {
        ks.push_back(double(r.k));
        rs.push_back(r.residual);
      }
    const double s_det = verify_detail::slope(ks, rs);
    RunConfig rnd;
    rnd.oracle.variant = OracleVariant::block;
    rnd.stop = StopRule::fixed(1000 * n);
    const auto mean = verify_detail::mean_residuals(p, rnd, seeds);
    ks.clear();
    rs.clear();
    for (std::size_t k = 100 * n; k < mean.size(); ++k) {
      ks.push_back(double(k) / double(n));
      rs.push_back(mean[k]);
    }
    const double s_rnd = verify_detail::slope(ks, rs);
    c.measured = std::max(s_det, s_rnd);
    c.bound = target;
    c.pass = s_det <= target && s_rnd <= target;
    c.detail = "deterministic slope " + verify_detail::num(s_det) + ", randomized (block, n=10, " +
               std::to_string(seeds) + " seeds) slope " + verify_detail::num(s_rnd);
  });
}

/// Finite-difference runs at Delta = 1e-12 (balanced tau) against exact-derivative runs with the same seeds.
inline Claim check_derivative_free_tracking(std::size_t seeds = 10, std::size_t K = 100, double tol = 1e-6) {
  return verify_detail::timed("finite-difference tracking", [&](Claim& c) {
    using V = OracleVariant;
    const std::vector<verify_detail::Pairing> cases{
        {V::df_dir, verify_detail::coupled_instance({1, 1, 1, 1, 1, 1}, 131)},
        {V::df_coord, verify_detail::separable_instance(8, 132, true)},
        {V::df_block, verify_detail::simplex_instance(4, 3, 133)},
        {V::df_block, verify_detail::coupled_instance({2, 3, 2}, 134)},
        {V::df_block_rand, verify_detail::mixed_instance(135)},
    };
    double worst = 0.0;
    std::string d;
    for (const auto& cs : cases) {
      double w = 0.0;
      for (std::size_t s = 0; s < seeds; ++s) {
        RunConfig df;
        df.oracle.variant = cs.variant;
        df.oracle.noise = {NoiseKind::adversarial, 1e-12};
        df.oracle.seed = 137 + s;
        df.stop = StopRule::fixed(K);
        RunConfig ex = df;
        ex.oracle.variant = exact_counterpart(cs.variant);
        ex.oracle.noise = {};
        const Trace a = solve(cs.problem, df), b = solve(cs.problem, ex);
        for (std::size_t k = 0; k < a.records.size(); ++k) {
          if (a.records[k].support != b.records[k].support) w = std::numeric_limits<double>::infinity();
          w = std::max(w, std::abs(a.records[k].f - b.records[k].f) / (1.0 + std::abs(b.records[k].f)));
        }
      }
      worst = std::max(worst, w);
      d += std::string(to_string(cs.variant)) + " on " + cs.problem->name() + " " + verify_detail::num(w) + "; ";
    }
    c.measured = worst;
    c.bound = tol;
    c.pass = worst <= tol;
    c.detail = "max |f_df - f_exact| / (1 + |f|): " + d;
  });
}

/// Two runs of the same config produce identical files once wall_ns is dropped.
inline Claim check_determinism(const std::filesystem::path& scratch) {
  return verify_detail::timed("run determinism", [&](Claim& c) {
    const std::string text = R"({
      "problem": {"type": "simplex_quadratic", "generator": {"seed": 5, "blocks": 4, "block_dim": 3}},
      "oracle": {"variant": "df_block", "noise": {"model": "uniform", "level": 1e-8}},
      "regime": "uncontrolled",
      "stop": {"iterations": 200},
      "seeds": [1, 2, 3, 4, 5]
    })";
    const ExperimentConfig cfg = parse_config_text(text);
    std::filesystem::remove_all(scratch);
    RunOptions a{scratch / "a", 2, 0}, b{scratch / "b", 3, 0};
    run_experiment(cfg, a);
    run_experiment(cfg, b);
    auto strip = [](const std::filesystem::path& f) {
      std::ifstream in(f, std::ios::binary);
      std::string line, out;
      while (std::getline(in, line)) {
        if (f.filename() != "summary.csv") line = line.substr(0, line.rfind(','));
        out += line + '\n';
      }
      return out;
    };
    std::size_t files = 0, diffs = 0;
    for (const auto& e : std::filesystem::directory_iterator(a.out_dir)) {
      ++files;
      const auto other = b.out_dir / e.path().filename();
      if (!std::filesystem::exists(other) || strip(e.path()) != strip(other)) ++diffs;
    }
    std::filesystem::remove_all(scratch);
    c.measured = double(diffs);
    c.bound = 0.0;
    c.pass = diffs == 0 && files == cfg.seeds.size() + 1;
    c.detail = std::to_string(files) + " files compared, " + std::to_string(diffs) + " differ";
  });
}

// ---------------------------------------------------------------------------
// suites

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> s{"coefficients", "gamma", "oracles", "prox", "smoothness", "convergence", "all"};
  return s;
}

inline Suite run_suite(const std::string& name) {
  Suite s;
  const bool all = name == "all";
  if (all || name == "coefficients") {
    s.push_back(check_coefficient_sandwich());
    s.push_back(check_coefficient_consistency());
    s.push_back(check_step_ratio());
  }
  if (all || name == "gamma") s.push_back(check_gamma_and_feasibility());
  if (all || name == "oracles") {
    s.push_back(check_unbiasedness());
    s.push_back(check_bias_bounds());
  }
  if (all || name == "prox") {
    s.push_back(check_prox_regularity());
    s.push_back(check_prox_optimality());
    s.push_back(check_bregman_lower_bound());
  }
  if (all || name == "smoothness") {
    s.push_back(check_problem_smoothness());
    s.push_back(check_step_smoothness());
  }
  if (all || name == "convergence") {
    s.push_back(check_controlled_rate());
    s.push_back(check_uncontrolled_rate());
    s.push_back(check_acceleration());
    s.push_back(check_derivative_free_tracking());
  }
  if (s.empty()) throw ConfigError("unknown suite '" + name + "'");
  return s;
}

inline std::string format_claim(const Claim& c) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "measured %.6g vs bound %.6g (%.2fs)", c.measured, c.bound, c.seconds);
  return std::string(c.pass ? "PASS " : "FAIL ") + c.name + ": " + buf + " | " + c.detail;
}

}  // namespace rstm

#endif  // RSTM_VERIFY_HPP
