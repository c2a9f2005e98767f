// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "chebqae/chebyshev.hpp"
#include "chebqae/market.hpp"
#include "chebqae/qae.hpp"

namespace chebqae {

// Algorithm inputs: per-date Chebyshev degrees m_k and domains D_k
// (k = 1..K-1), per-date QAE schedules (k = 0..K-1), value bounds
// Vmax_k (k = 1..K), and the out-of-domain boundary policy.
struct PricerConfig {
  std::vector<int> degrees;           // m_k, k = 1..K-1
  std::vector<QAEConfig> schedules;   // k = 0..K-1
  std::vector<double> value_bounds;   // Vmax_k, k = 1..K
  BoundaryPolicy boundary;            // owns the domains
  bool exact_probabilities = false;   // test hook: skip sampling, use true P
  int threads = 1;

  [[nodiscard]] int num_dates() const { return static_cast<int>(schedules.size()); }
  [[nodiscard]] int degree_at(int k) const;          // k in [1, K-1]
  [[nodiscard]] const QAEConfig& schedule_at(int k) const;  // k in [0, K-1]
  [[nodiscard]] double value_bound_at(int k) const;  // k in [1, K]
  void validate(int dim) const;
};

// One nodal estimate: true amplitude P, its QAE estimate, and the implied
// continuation value (2P-1) Vmax_{k+1}.
struct NodalRecord {
  int date = 0;
  std::size_t node_index = 0;
  std::vector<double> node;
  double p_true = 0.0;
  double p_estimate = 0.0;
  double q_estimate = 0.0;
  long long oracle_calls = 0;
};

struct PricingResult {
  double value = 0.0;                        // the final estimate of V_0
  double p0_true = 0.0;
  double p0_estimate = 0.0;
  std::vector<TensorInterpolant> continuations;  // Q~_k, k = 1..K-1
  std::vector<NodalRecord> nodal_records;
  long long oracle_calls_total = 0;
};

// Per-date error inputs for the bound calculators: (rho_k, B_k) and
// eps^OB_k for k = 1..K-1, eps^QAE_k for k = 0..K-1.
struct BoundInputs {
  std::vector<AnalyticityParams> analyticity;
  std::vector<double> eps_boundary;
  std::vector<double> eps_qae;
};

// Exact amplitude P_{k,j} = 1/2 + Q^(node)/(2 Vmax_{k+1}) where Q^ is the
// conditional expectation of the extended next-date value. Fails loudly,
// naming the offending target, if any reachable |value| exceeds Vmax_{k+1}.
[[nodiscard]] double nodal_probability(
    const TransitionKernel& kernel, int k, std::span<const double> node,
    const std::function<double(std::span<const double>)>& next_value_extended,
    double value_bound_next);

// Backward induction of the QAE pricer. For k = K-1..1: estimate the amplitude at
// all (m_k+1)^d nodes of D_k via median QAE, fit the Chebyshev interpolant
// Q~_k, and set V~_k = max(payoff, Q~_k); finally estimate
// P_0 = 1/2 + E[G_1[V~_1](S_1)]/(2 Vmax_1) and return (2 P~_0 - 1) Vmax_1.
// Each node draws from an independent substream of the master seed, so the
// result is identical for any thread count.
[[nodiscard]] PricingResult backward_induce(const TransitionKernel& kernel,
                                            const Payoff& payoff,
                                            const PricerConfig& cfg,
                                            std::uint64_t seed);

// The a-priori schedule for error tolerance eps: degrees from the m^th
// thresholds (sequential, clamped below at 1), per-date QAE tolerances
// eps-bar_k, N^QAE_k = ceil(7/eps-bar_k), and the shared repetition count
// N_rep = 12 ceil(ln(N_est/0.01)) + 1 with N_est = 1 + sum (m_k+1)^d.
struct ScheduleSelection {
  std::vector<int> degrees;        // m_k, k = 1..K-1
  std::vector<double> eps_bar;     // k = 0..K-1
  std::vector<QAEConfig> schedules;  // k = 0..K-1
  long long n_est = 0;
  long long n_total = 0;           // oracle-call ledger of the schedule
};

[[nodiscard]] ScheduleSelection select_parameters(
    double eps, std::span<const AnalyticityParams> analyticity, int d,
    int num_dates, std::span<const double> value_bounds);

// Assemble a full PricerConfig from a schedule selection plus domains.
[[nodiscard]] PricerConfig make_pricer_config(const ScheduleSelection& selection,
                                              std::vector<HyperRectangle> domains,
                                              std::vector<double> value_bounds);

// Ledger formula: sum over dates of N^rep_k * N^QAE_k * (#nodes at k),
// with one node at k = 0.
[[nodiscard]] long long count_oracle_calls(const PricerConfig& cfg);

// Conservative bound diagnostic: sum_k Ltilde_{1,k-1} (eps^int_k + eps^OB_k)
// + sum_{k=0}^{K-1} Ltilde_{1,k} eps^QAE_k, with Ltilde the running product
// of per-date Lebesgue bounds (empty product = 1).
[[nodiscard]] double error_bound_thm3(const BoundInputs& inputs,
                                      std::span<const int> degrees, int d,
                                      int num_dates);

// Refined bound diagnostic (no exponential factor): sum_k (eps^OB_k + eps^int_k)
// + sum_{k=0}^{K-1} Lambda_k eps^QAE_k with Lambda_0 := 1.
[[nodiscard]] double error_bound_thm4(const BoundInputs& inputs,
                                      std::span<const int> degrees, int d,
                                      int num_dates);

}  // namespace chebqae
