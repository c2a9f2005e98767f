// SPDX-License-Identifier: MIT
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "chebqae/chebyshev.hpp"

namespace chebqae {

// Zero-rate geometric Brownian motion with exercise dates t_1 < ... < t_K
// (t_0 = 0 is the pricing date; no exercise at t_0).
struct GBMModel {
  std::vector<double> spot;                      // S_0, one entry per asset
  std::vector<double> vols;                      // sigma_i, per year
  std::vector<std::vector<double>> correlation;  // d x d, unit diagonal, PD
  std::vector<double> exercise_times;            // years, strictly increasing

  [[nodiscard]] int dim() const { return static_cast<int>(spot.size()); }
  [[nodiscard]] int num_dates() const { return static_cast<int>(exercise_times.size()); }
};

enum class PayoffKind { put, basket_put };

// max(strike - s_1 - ... - s_d, 0); `put` is the d=1 special case.
struct Payoff {
  PayoffKind kind = PayoffKind::put;
  double strike = 0.0;

  [[nodiscard]] double operator()(std::span<const double> s) const;
};

// Equiprobable quantile midpoints z_i = Phi^{-1}((i+0.5)/N_z), each with
// probability 1/N_z, symmetrized about 0.
[[nodiscard]] std::vector<double> discretize_normal(int n_z);

// Finite-support one-step transition law of the discretized chain: from a
// source point at date k, the N_z^d equiprobable targets
//   s_i = S_i * exp(-sigma_i^2/2 * dt_k + sigma_i * sqrt(dt_k) * (Lz)_i),
// with L the Cholesky factor of the correlation and z on the product grid.
class TransitionKernel {
 public:
  TransitionKernel(GBMModel model, int n_z);

  [[nodiscard]] const GBMModel& model() const { return model_; }
  [[nodiscard]] int dim() const { return model_.dim(); }
  [[nodiscard]] int num_dates() const { return model_.num_dates(); }
  [[nodiscard]] int n_z() const { return n_z_; }
  // Support size N_z^d of every source point.
  [[nodiscard]] std::size_t branch_count() const { return branch_count_; }
  // Probability of each target (product of 1/N_z).
  [[nodiscard]] double branch_probability() const { return branch_probability_; }
  // Step length t_{k+1} - t_k for k in [0, K-1].
  [[nodiscard]] double dt(int k) const;

  // Target point for branch b of the step from date k to k+1.
  [[nodiscard]] std::vector<double> target(int k, std::span<const double> source,
                                           std::size_t branch) const;

  // One draw from the step law, consuming d uniform indices from rng.
  [[nodiscard]] std::vector<double> sample_step(int k, std::span<const double> source,
                                                std::mt19937_64& rng) const;

 private:
  GBMModel model_;
  int n_z_;
  std::size_t branch_count_;
  double branch_probability_;
  std::vector<double> z_;     // discretized normals
  std::vector<double> chol_;  // row-major lower-triangular Cholesky factor
};

// Exact finite sum  sum_s p_{k+1}(s; S) g(s)  over the kernel support.
[[nodiscard]] double conditional_expectation(
    const TransitionKernel& kernel, int k,
    const std::function<double(std::span<const double>)>& g,
    std::span<const double> source);

// Full path (S_0, S_1, ..., S_K) drawn from the same discretized kernel.
[[nodiscard]] std::vector<std::vector<double>> sample_path(
    const TransitionKernel& kernel, std::mt19937_64& rng);

// Interpolation domains D_k (k = 1..K-1) plus the out-of-domain rule: points
// in the outer region A_k take the known boundary value V^OB (0 for far
// out-of-money puts); remaining out-of-domain points are clamped into D_k
// (flat extrapolation).
struct BoundaryPolicy {
  std::vector<HyperRectangle> domains;  // D_1..D_{K-1}
  int num_dates = 0;                    // K
  std::function<bool(int k, std::span<const double>)> is_outer;
  std::function<double(int k, std::span<const double>)> outer_value;

  // Default put policy on the given domains: A_k = {s : s_i > U_{i,k} for
  // some i}, V^OB = 0.
  [[nodiscard]] static BoundaryPolicy flat_put(std::vector<HyperRectangle> domains,
                                               int num_dates);

  [[nodiscard]] const HyperRectangle& domain(int k) const;  // k in [1, K-1]
};

// The extension operator G_k: inner(s) on D_k, V^OB(s) on A_k, inner(clamp(s))
// elsewhere; G_K is the identity (payoff is defined everywhere at maturity).
[[nodiscard]] double extend_value(
    const BoundaryPolicy& policy, int k,
    const std::function<double(std::span<const double>)>& inner,
    std::span<const double> s);

// Default domains [S0_i exp(-c sigma_i sqrt(t_k)), S0_i exp(+c sigma_i sqrt(t_k))]
// per date k = 1..K-1.
[[nodiscard]] std::vector<HyperRectangle> default_domains(const GBMModel& model,
                                                          double width_sigmas = 3.0);

}  // namespace chebqae
