// SPDX-License-Identifier: MIT
#include "chebqae/chebyshev.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace chebqae {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

// T_l(x_{m,j}) table for l, j in [0, m]; column-major in j.
std::vector<double> node_basis_table(int m) {
  std::vector<double> table(static_cast<std::size_t>(m + 1) * static_cast<std::size_t>(m + 1));
  for (int j = 0; j <= m; ++j) {
    const double x = chebyshev_node(m, j);
    double prev = 1.0, cur = x;
    for (int l = 0; l <= m; ++l) {
      double value;
      if (l == 0) {
        value = 1.0;
      } else if (l == 1) {
        value = x;
      } else {
        value = 2.0 * x * cur - prev;
        prev = cur;
        cur = value;
      }
      table[static_cast<std::size_t>(l) * static_cast<std::size_t>(m + 1) +
            static_cast<std::size_t>(j)] = value;
    }
  }
  return table;
}

}  // namespace

HyperRectangle::HyperRectangle(std::vector<double> lower, std::vector<double> upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  require(!lower_.empty(), "HyperRectangle: dimension must be >= 1");
  require(lower_.size() == upper_.size(), "HyperRectangle: lower/upper size mismatch");
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (!(lower_[i] < upper_[i])) {
      std::ostringstream msg;
      msg << "HyperRectangle: lower[" << i << "]=" << lower_[i]
          << " must be < upper[" << i << "]=" << upper_[i];
      throw std::invalid_argument(msg.str());
    }
  }
}

bool HyperRectangle::contains(std::span<const double> point) const {
  if (point.size() != lower_.size()) return false;
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    if (point[i] < lower_[i] || point[i] > upper_[i]) return false;
  }
  return true;
}

std::vector<double> HyperRectangle::clamp(std::span<const double> point) const {
  require(point.size() == lower_.size(), "clamp: dimension mismatch");
  std::vector<double> out(point.begin(), point.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::min(upper_[i], std::max(lower_[i], out[i]));
  }
  return out;
}

double HyperRectangle::to_reference(int i, double s) const {
  const double lo = lower(i), hi = upper(i);
  return (2.0 * s - hi - lo) / (hi - lo);
}

double HyperRectangle::from_reference(int i, double x) const {
  const double lo = lower(i), hi = upper(i);
  return 0.5 * (hi - lo) * x + 0.5 * (hi + lo);
}

double chebyshev_node(int m, int j) {
  if (m < 0 || j < 0 || j > m) {
    std::ostringstream msg;
    msg << "chebyshev_node: index j=" << j << " out of range for m=" << m;
    throw std::out_of_range(msg.str());
  }
  return std::cos((j + 0.5) / (m + 1) * std::numbers::pi);
}

double chebyshev_t(int l, double x) {
  require(l >= 0, "chebyshev_t: degree must be nonnegative");
  if (l == 0) return 1.0;
  if (l == 1) return x;
  double prev = 1.0, cur = x;
  for (int n = 2; n <= l; ++n) {
    const double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double chebyshev_t_trig(int l, double x) {
  require(l >= 0, "chebyshev_t_trig: degree must be nonnegative");
  require(x >= -1.0 && x <= 1.0, "chebyshev_t_trig: |x| must be <= 1");
  return std::cos(l * std::acos(x));
}

std::size_t multi_index_count(int d, int m) {
  require(d >= 1, "multi_index_count: dimension must be >= 1");
  require(m >= 0, "multi_index_count: degree must be >= 0");
  std::size_t count = 1;
  for (int i = 0; i < d; ++i) count *= static_cast<std::size_t>(m + 1);
  return count;
}

std::size_t flat_index(const MultiIndex& l, int m) {
  std::size_t flat = 0;
  for (int entry : l) {
    require(entry >= 0 && entry <= m, "flat_index: entry out of [0, m]");
    flat = flat * static_cast<std::size_t>(m + 1) + static_cast<std::size_t>(entry);
  }
  return flat;
}

MultiIndex unflatten_index(std::size_t flat, int d, int m) {
  MultiIndex l(static_cast<std::size_t>(d));
  for (int i = d - 1; i >= 0; --i) {
    l[static_cast<std::size_t>(i)] =
        static_cast<int>(flat % static_cast<std::size_t>(m + 1));
    flat /= static_cast<std::size_t>(m + 1);
  }
  return l;
}

std::vector<std::vector<double>> tensor_grid(const HyperRectangle& domain, int m) {
  require(m >= 0, "tensor_grid: degree must be >= 0");
  const int d = domain.dim();
  std::vector<double> nodes(static_cast<std::size_t>(m + 1));
  for (int j = 0; j <= m; ++j) nodes[static_cast<std::size_t>(j)] = chebyshev_node(m, j);

  const std::size_t count = multi_index_count(d, m);
  std::vector<std::vector<double>> grid(count, std::vector<double>(static_cast<std::size_t>(d)));
  MultiIndex j(static_cast<std::size_t>(d), 0);
  for (std::size_t flat = 0; flat < count; ++flat) {
    for (int i = 0; i < d; ++i) {
      grid[flat][static_cast<std::size_t>(i)] =
          domain.from_reference(i, nodes[static_cast<std::size_t>(j[static_cast<std::size_t>(i)])]);
    }
    for (int i = d - 1; i >= 0; --i) {  // lexicographic, last dimension fastest
      if (++j[static_cast<std::size_t>(i)] <= m) break;
      j[static_cast<std::size_t>(i)] = 0;
    }
  }
  return grid;
}

double eval_tensor_basis(const HyperRectangle& domain, const MultiIndex& l,
                         std::span<const double> point) {
  require(static_cast<int>(l.size()) == domain.dim(), "eval_tensor_basis: index dimension mismatch");
  if (!domain.contains(point)) {
    throw std::invalid_argument("eval_tensor_basis: point outside domain");
  }
  double product = 1.0;
  for (int i = 0; i < domain.dim(); ++i) {
    product *= chebyshev_t(l[static_cast<std::size_t>(i)], domain.to_reference(i, point[static_cast<std::size_t>(i)]));
  }
  return product;
}

TensorInterpolant::TensorInterpolant(HyperRectangle domain, int m,
                                     std::vector<double> coefficients)
    : domain_(std::move(domain)), degree_(m), coefficients_(std::move(coefficients)) {
  require(m >= 0, "TensorInterpolant: degree must be >= 0");
  require(coefficients_.size() == multi_index_count(domain_.dim(), m),
          "TensorInterpolant: coefficient count must be (m+1)^d");
}

double TensorInterpolant::operator()(std::span<const double> point) const {
  if (!domain_.contains(point)) {
    throw std::invalid_argument("TensorInterpolant: point outside domain");
  }
  const int d = domain_.dim();
  const int m = degree_;
  // Per-dimension T_l(theta_i) tables, then one pass over the coefficients.
  std::vector<double> basis(static_cast<std::size_t>(d) * static_cast<std::size_t>(m + 1));
  for (int i = 0; i < d; ++i) {
    const double x = domain_.to_reference(i, point[static_cast<std::size_t>(i)]);
    double prev = 1.0, cur = x;
    for (int l = 0; l <= m; ++l) {
      double value;
      if (l == 0) {
        value = 1.0;
      } else if (l == 1) {
        value = x;
      } else {
        value = 2.0 * x * cur - prev;
        prev = cur;
        cur = value;
      }
      basis[static_cast<std::size_t>(i) * static_cast<std::size_t>(m + 1) +
            static_cast<std::size_t>(l)] = value;
    }
  }
  double total = 0.0;
  MultiIndex l(static_cast<std::size_t>(d), 0);
  for (std::size_t flat = 0; flat < coefficients_.size(); ++flat) {
    double product = coefficients_[flat];
    for (int i = 0; i < d; ++i) {
      product *= basis[static_cast<std::size_t>(i) * static_cast<std::size_t>(m + 1) +
                       static_cast<std::size_t>(l[static_cast<std::size_t>(i)])];
    }
    total += product;
    for (int i = d - 1; i >= 0; --i) {
      if (++l[static_cast<std::size_t>(i)] <= m) break;
      l[static_cast<std::size_t>(i)] = 0;
    }
  }
  return total;
}

double TensorInterpolant::coefficient(const MultiIndex& l) const {
  require(static_cast<int>(l.size()) == domain_.dim(), "coefficient: index dimension mismatch");
  return coefficients_[flat_index(l, degree_)];
}

TensorInterpolant fit_interpolant(const HyperRectangle& domain, int m,
                                  std::span<const double> nodal_values) {
  require(m >= 0, "fit_interpolant: degree must be >= 0");
  const int d = domain.dim();
  const std::size_t count = multi_index_count(d, m);
  if (nodal_values.size() != count) {
    std::ostringstream msg;
    msg << "fit_interpolant: expected " << count << " nodal values, got "
        << nodal_values.size();
    throw std::invalid_argument(msg.str());
  }
  for (std::size_t j = 0; j < count; ++j) {
    if (!std::isfinite(nodal_values[j])) {
      std::ostringstream msg;
      msg << "fit_interpolant: nodal value at flat index " << j << " is not finite";
      throw std::invalid_argument(msg.str());
    }
  }

  const std::vector<double> table = node_basis_table(m);
  const std::size_t n = static_cast<std::size_t>(m + 1);

  // Contract one dimension per pass: values indexed by (j_0..j_{a-1} already
  // replaced by l, j_a..j_{d-1} still node indices). Scaling 2/(m+1) for
  // l > 0 and 1/(m+1) for l = 0 accumulates to 2^{aleph(l)}/(m+1)^d.
  std::vector<double> work(nodal_values.begin(), nodal_values.end());
  std::vector<double> next(count);
  std::size_t stride = count / n;  // stride of dimension 0 (slowest)
  for (int axis = 0; axis < d; ++axis) {
    for (std::size_t outer = 0; outer < count / (stride * n); ++outer) {
      for (std::size_t inner = 0; inner < stride; ++inner) {
        const std::size_t base = outer * stride * n + inner;
        for (std::size_t l = 0; l < n; ++l) {
          double sum = 0.0;
          for (std::size_t j = 0; j < n; ++j) {
            sum += table[l * n + j] * work[base + j * stride];
          }
          const double scale = (l == 0 ? 1.0 : 2.0) / static_cast<double>(n);
          next[base + l * stride] = scale * sum;
        }
      }
    }
    work.swap(next);
    stride /= n;
  }
  return TensorInterpolant{domain, m, std::move(work)};
}

double lebesgue_bound(int d, int m) {
  require(d >= 1, "lebesgue_bound: dimension must be >= 1");
  require(m >= 0, "lebesgue_bound: degree must be >= 0");
  const double factor = 2.0 / std::numbers::pi * std::log(m + 1.0) + 1.0;
  return std::pow(factor, d);
}

double interpolation_error_bound(const AnalyticityParams& params, int d, int m) {
  require(d >= 1, "interpolation_error_bound: dimension must be >= 1");
  require(m >= 0, "interpolation_error_bound: degree must be >= 0");
  if (!(params.rho > 1.0)) {
    throw std::domain_error("interpolation_error_bound: rho must be > 1");
  }
  require(params.bound >= 0.0, "interpolation_error_bound: bound must be >= 0");
  const double rho = params.rho;
  return std::pow(2.0, 0.5 * d + 1.0) * std::sqrt(static_cast<double>(d)) *
         params.bound * std::pow(rho, -m) * std::pow(1.0 - 1.0 / (rho * rho), -0.5 * d);
}

}  // namespace chebqae
