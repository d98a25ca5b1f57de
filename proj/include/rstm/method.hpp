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

// Coefficient sequences and the three-point update of the randomized
// similar triangles method. Oracle-agnostic: the step takes any callable
// mapping y to a sparse gradient surrogate.

#ifndef RSTM_METHOD_HPP
#define RSTM_METHOD_HPP

#include <rstm/prox.hpp>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rstm {

struct Coefficients {
  double alpha;
  double A;
};

/// A_0 = alpha_0 = 1 - 1/rho.
inline double initial_coefficient(double rho) {
  if (!(rho >= 1.0) || !std::isfinite(rho)) throw std::invalid_argument("rho must be >= 1");
  return 1.0 - 1.0 / rho;
}

/// Largest root alpha of rho^2 alpha^2 = A + alpha, and A_next = A + alpha.
inline Coefficients next_coefficients(double A, double rho) {
  if (!(A >= 0.0)) throw std::invalid_argument("A must be non-negative");
  if (!(rho >= 1.0)) throw std::invalid_argument("rho must be >= 1");
  const double r2 = rho * rho;
  const double alpha = (1.0 + std::sqrt(1.0 + 4.0 * r2 * A)) / (2.0 * r2);
  return {alpha, A + alpha};
}

/// (k, alpha_k, A_k, x_k, y_k, u_k). y_0 = x_0 = u_0.
struct RstmState {
  std::size_t k = 0;
  double rho = 1.0;
  double alpha = 0.0;
  double A = 0.0;
  BlockPoint x;
  BlockPoint y;
  FeasiblePoint u;
};

inline RstmState init_state(double rho, FeasiblePoint u0) {
  const double a0 = initial_coefficient(rho);
  BlockPoint p = u0.point();
  return RstmState{0, rho, a0, a0, p, p, std::move(u0)};
}

/// One pass of y <- convex combination, u <- prox step, x <- y + rho (alpha/A)(u' - u).
/// `sample` maps the new y to the oracle output used in the prox step; it
/// is called exactly once.
template <class SampleFn>
RstmState advance(const RstmState& s, const ProxSetup& setup, SampleFn&& sample) {
  const auto [alpha, A_next] = next_coefficients(s.A, s.rho);
  const Eigen::VectorXd& u = s.u.point().values();
  BlockPoint y(s.x.structure(), (alpha * u + s.A * s.x.values()) / A_next);
  const SparseBlockDual ghat = sample(static_cast<const BlockPoint&>(y));
  FeasiblePoint u_next = prox_map(setup, s.u.point(), alpha, ghat);
  const double c = s.rho * alpha / A_next;
  BlockPoint x(s.x.structure(), y.values() + c * (u_next.point().values() - u));
  return RstmState{s.k + 1, s.rho, alpha, A_next, std::move(x), std::move(y), std::move(u_next)};
}

/// gamma_k^l with x_k = sum_l gamma_k^l u_l.
struct GammaTable {
  std::size_t k = 0;
  std::vector<double> coefficients;
};

inline GammaTable gamma_table(std::size_t k, double rho) {
  std::vector<double> g{1.0};
  if (k == 0) return {0, g};
  double A = initial_coefficient(rho);
  auto c = next_coefficients(A, rho);
  double ratio = c.alpha / c.A;  // alpha_1 / A_1 = 1 / rho, so x_1 = u_1
  A = c.A;
  g = {0.0, 1.0};
  for (std::size_t j = 1; j < k; ++j) {
    c = next_coefficients(A, rho);
    const double next = c.alpha / c.A;
    std::vector<double> h(j + 2);
    for (std::size_t l = 0; l + 1 <= j; ++l) h[l] = (1.0 - next) * g[l];
    h[j] = next * (1.0 - rho * ratio) + rho * (ratio - next);
    h[j + 1] = rho * next;
    g = std::move(h);
    ratio = next;
    A = c.A;
  }
  return {k, std::move(g)};
}

}  // namespace rstm

#endif  // RSTM_METHOD_HPP
