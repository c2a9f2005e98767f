// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace chebqae {

// One (N_QAE, N_rep) schedule: n_qae oracle calls per round, n_rep rounds
// with median aggregation. n_rep must be odd so the median is a sample value.
struct QAEConfig {
  int n_qae = 2;
  int n_rep = 1;
};

// Median-of-rounds amplitude estimate with oracle-call accounting.
struct QAEEstimate {
  double value = 0.0;           // median of rounds, in [0, 1]
  long long oracle_calls = 0;   // n_qae * n_rep
  std::vector<double> rounds;   // per-round estimates
};

// A measurement outcome of phase estimation after folding y and M-y:
// estimate sin^2(pi y / M) with its total probability.
struct OutcomePoint {
  double estimate;
  double probability;
};

// Exact measurement law of canonical QAE with M Grover applications: outcome
// y in {0,...,M-1} has probability (d_M(y/M - theta/pi) + d_M(y/M + theta/pi))/2
// with theta = arcsin(sqrt(a)) and d_M(x) = sin^2(M pi x)/(M^2 sin^2(pi x))
// (value 1 at x = 0 mod 1); outcomes are folded pairwise onto the estimates
// sin^2(pi y / M), y <= M/2. Probabilities sum to 1.
[[nodiscard]] std::vector<OutcomePoint> qae_outcome_distribution(double a, int m_grover);

// One QAE round with M = floor(n_qae / 2); returns the sampled estimate.
[[nodiscard]] double run_qae_round(double a, int n_qae, std::mt19937_64& rng);

// Median of cfg.n_rep rounds. Satisfies |value - a| <= 7/n_qae with
// probability > 1 - gamma once n_rep >= 12 ceil(ln(1/gamma)) + 1.
[[nodiscard]] QAEEstimate run_median_qae(double a, const QAEConfig& cfg,
                                         std::mt19937_64& rng);

// Repetition count 12 ceil(ln(1/gamma)) + 1 (odd by construction).
[[nodiscard]] int theorem2_reps(double gamma);

// Validation oracle: explicit 2^t x 2 statevector of textbook phase estimation
// applied to the Grover operator of the single-qubit preparation
// |psi> = cos(theta)|0> + sin(theta)|1>, measured on the counting register and
// folded like qae_outcome_distribution(a, 2^t). 2 <= t <= 12.
[[nodiscard]] std::vector<OutcomePoint> statevector_qae_distribution(double a, int t);

// Total-variation distance between two folded outcome distributions on the
// same support (throws if supports disagree beyond 1e-12).
[[nodiscard]] double total_variation(const std::vector<OutcomePoint>& p,
                                     const std::vector<OutcomePoint>& q);

}  // namespace chebqae
