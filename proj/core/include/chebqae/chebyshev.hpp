// SPDX-License-Identifier: MIT
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace chebqae {

// Multi-index (l_1,...,l_d) or (j_1,...,j_d), entries in [0, m].
using MultiIndex = std::vector<int>;

// Bernstein-ellipse analyticity inputs: radius rho > 1 and sup bound B > 0
// of the extended function on the ellipse.
struct AnalyticityParams {
  double rho;
  double bound;
};

// Axis-aligned box [L_1,U_1] x ... x [L_d,U_d] with L_i < U_i.
class HyperRectangle {
 public:
  HyperRectangle(std::vector<double> lower, std::vector<double> upper);

  [[nodiscard]] int dim() const { return static_cast<int>(lower_.size()); }
  [[nodiscard]] double lower(int i) const { return lower_[static_cast<std::size_t>(i)]; }
  [[nodiscard]] double upper(int i) const { return upper_[static_cast<std::size_t>(i)]; }

  [[nodiscard]] bool contains(std::span<const double> point) const;
  // Componentwise clamp into the box; identity on interior points.
  [[nodiscard]] std::vector<double> clamp(std::span<const double> point) const;

  // Affine map to the reference cube: component i of theta(S), in [-1,1].
  [[nodiscard]] double to_reference(int i, double s) const;
  // Inverse map: x in [-1,1] to [L_i, U_i].
  [[nodiscard]] double from_reference(int i, double x) const;

 private:
  std::vector<double> lower_;
  std::vector<double> upper_;
};

// Chebyshev node x_{m,j} = cos(((j+1/2)/(m+1)) * pi), strictly decreasing in j.
[[nodiscard]] double chebyshev_node(int m, int j);

// T_l(x) by the three-term recurrence T_{n+1} = 2x T_n - T_{n-1}.
[[nodiscard]] double chebyshev_t(int l, double x);

// cos(l * arccos x) for |x| <= 1; cross-check for the recurrence.
[[nodiscard]] double chebyshev_t_trig(int l, double x);

// Number of multi-indices with d entries in [0, m]: (m+1)^d.
[[nodiscard]] std::size_t multi_index_count(int d, int m);

// Lexicographic position of l (last dimension fastest).
[[nodiscard]] std::size_t flat_index(const MultiIndex& l, int m);
[[nodiscard]] MultiIndex unflatten_index(std::size_t flat, int d, int m);

// All (m+1)^d tensor grid nodes in lexicographic multi-index order; node j has
// component i equal to ((U_i-L_i)/2) x_{m,j_i} + (U_i+L_i)/2.
[[nodiscard]] std::vector<std::vector<double>> tensor_grid(
    const HyperRectangle& domain, int m);

// Product over i of T_{l_i}(theta_i(S_i)).
[[nodiscard]] double eval_tensor_basis(const HyperRectangle& domain,
                                       const MultiIndex& l,
                                       std::span<const double> point);

// Tensor Chebyshev interpolant sum_l a_l * prod_i T_{l_i}(theta_i(S_i)).
class TensorInterpolant {
 public:
  TensorInterpolant(HyperRectangle domain, int m, std::vector<double> coefficients);

  [[nodiscard]] double operator()(std::span<const double> point) const;

  [[nodiscard]] const HyperRectangle& domain() const { return domain_; }
  [[nodiscard]] int degree() const { return degree_; }
  [[nodiscard]] const std::vector<double>& coefficients() const { return coefficients_; }
  [[nodiscard]] double coefficient(const MultiIndex& l) const;

 private:
  HyperRectangle domain_;
  int degree_;
  std::vector<double> coefficients_;  // lexicographic multi-index order
};

// Fit by the discrete orthogonality sum: a_l = (2^{aleph(l)}/(m+1)^d)
// sum_j v_j * prod_i T_{l_i}(x_{m,j_i}), where aleph counts nonzero entries.
// nodal_values must be in tensor_grid order, one value per grid node.
[[nodiscard]] TensorInterpolant fit_interpolant(const HyperRectangle& domain,
                                                int m,
                                                std::span<const double> nodal_values);

// Lebesgue-constant bound ((2/pi) ln(m+1) + 1)^d (natural log).
[[nodiscard]] double lebesgue_bound(int d, int m);

// Interpolation error bound 2^{d/2+1} sqrt(d) B rho^{-m} (1-rho^{-2})^{-d/2}.
[[nodiscard]] double interpolation_error_bound(const AnalyticityParams& params,
                                               int d, int m);

}  // namespace chebqae
