// SPDX-License-Identifier: MIT
#pragma once

#include <optional>
#include <span>

#include "chebqae/market.hpp"

namespace chebqae {

// Zero-rate Black-Scholes European put: kappa Phi(-d2) - S0 Phi(-d1) with
// d1 = (ln(S0/kappa) + sigma^2 T / 2)/(sigma sqrt(T)), d2 = d1 - sigma sqrt(T).
[[nodiscard]] double bs_european_put(double s0, double strike, double vol, double maturity);

// Exact backward induction over the full reachable tree of the discretized
// chain: V_K = payoff, V_k = max(payoff, E[V_{k+1}]), V_0 = E[V_1]. The
// unambiguous value of the discretized problem. num_dates truncates to the
// first k exercise dates when given. Guarded against state blowup:
// branch_count^K must not exceed max_states.
[[nodiscard]] double dp_exact_price(const TransitionKernel& kernel, const Payoff& payoff,
                                    std::optional<int> num_dates = std::nullopt,
                                    long long max_states = 10'000'000);

// Continuous-model reference for d=1: CRR binomial lattice with exercise
// allowed only at the given dates. Every date must land on a lattice step
// (within 1e-9 relative); total steps = steps_per_interval * K.
[[nodiscard]] double binomial_bermudan_price(double s0, double strike, double vol,
                                             std::span<const double> exercise_times,
                                             int steps_per_interval);

}  // namespace chebqae
