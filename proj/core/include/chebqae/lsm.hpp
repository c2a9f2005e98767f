// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "chebqae/chebyshev.hpp"
#include "chebqae/market.hpp"

namespace chebqae {

struct LSMConfig {
  long long n_samples = 2;  // N_samp
  int degree = 3;           // total degree of the monomial regression basis
  std::uint64_t seed = 0;
};

struct LSMResult {
  double value = 0.0;            // V^_0, mean stopped payoff
  double std_error = 0.0;        // sample standard error of that mean
  long long transitions_sampled = 0;  // N_samp * K, the classical cost ledger
};

// Sample paths plus the per-path current stopping date.
struct PathSet {
  // paths[i][k][asset], k = 0..K.
  std::vector<std::vector<std::vector<double>>> paths;
  std::vector<int> stopping;  // tau^_i, in {k,...,K} during the recursion
};

// Monomial exponents of total degree <= degree in d variables, graded
// lexicographic (so d=1 gives 1, x, x^2, ...).
[[nodiscard]] std::vector<MultiIndex> monomial_exponents(int d, int degree);

// Least-squares fit of targets on the monomial basis at the given points,
// solved by normal equations with ridge 1e-10. Returns the coefficients in
// monomial_exponents order.
[[nodiscard]] std::vector<double> fit_polynomial(
    const std::vector<std::vector<double>>& points, std::span<const double> targets,
    int degree);

[[nodiscard]] double eval_polynomial(std::span<const double> coefficients,
                                     const std::vector<MultiIndex>& exponents,
                                     std::span<const double> point);

// Regression of stopped payoffs at date k over all paths (no in-the-money
// conditioning). Stopping indices for k+1 must already be set.
[[nodiscard]] std::vector<double> regress_continuation(const PathSet& paths, int k,
                                                       const Payoff& payoff,
                                                       int degree);

// Longstaff-Schwartz backward recursion on paths drawn from the same
// discretized kernel as the QAE pricer: tau^_K = K; at k = K-1..1 exercise
// when the regressed continuation is <= the immediate payoff; returns the
// mean stopped payoff.
[[nodiscard]] LSMResult lsm_price(const TransitionKernel& kernel, const Payoff& payoff,
                                  const LSMConfig& cfg);

}  // namespace chebqae
