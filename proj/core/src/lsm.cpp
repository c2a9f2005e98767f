// SPDX-License-Identifier: MIT
#include "chebqae/lsm.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "chebqae/random.hpp"

namespace chebqae {

namespace {

constexpr double kRidge = 1e-10;

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

std::vector<MultiIndex> monomial_exponents(int d, int degree) {
  require(d >= 1, "monomial_exponents: dimension must be >= 1");
  require(degree >= 0, "monomial_exponents: degree must be >= 0");
  std::vector<MultiIndex> exponents;
  MultiIndex current(static_cast<std::size_t>(d), 0);
  // Graded lexicographic: all exponents of total degree g, g = 0..degree.
  const std::function<void(int, int, int)> emit = [&](int pos, int remaining, int grade) {
    if (pos == d - 1) {
      current[static_cast<std::size_t>(pos)] = remaining;
      exponents.push_back(current);
      return;
    }
    for (int e = grade; e >= 0; --e) {
      if (e > remaining) continue;
      current[static_cast<std::size_t>(pos)] = e;
      emit(pos + 1, remaining - e, grade);
    }
  };
  for (int grade = 0; grade <= degree; ++grade) emit(0, grade, grade);
  return exponents;
}

std::vector<double> fit_polynomial(const std::vector<std::vector<double>>& points,
                                   std::span<const double> targets, int degree) {
  require(!points.empty(), "fit_polynomial: no sample points");
  require(points.size() == targets.size(), "fit_polynomial: point/target size mismatch");
  const int d = static_cast<int>(points[0].size());
  const auto exponents = monomial_exponents(d, degree);
  const int n_basis = static_cast<int>(exponents.size());
  const auto n = static_cast<Eigen::Index>(points.size());

  Eigen::MatrixXd design(n, n_basis);
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::vector<double>& x = points[static_cast<std::size_t>(i)];
    for (int b = 0; b < n_basis; ++b) {
      double value = 1.0;
      for (int a = 0; a < d; ++a) {
        const int e = exponents[static_cast<std::size_t>(b)][static_cast<std::size_t>(a)];
        for (int rep = 0; rep < e; ++rep) value *= x[static_cast<std::size_t>(a)];
      }
      design(i, b) = value;
    }
  }
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = targets[static_cast<std::size_t>(i)];

  Eigen::MatrixXd gram = design.transpose() * design;
  gram.diagonal().array() += kRidge;
  const Eigen::LDLT<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "fit_polynomial: normal equations not solvable at degree " << degree;
    throw std::runtime_error(msg.str());
  }
  const Eigen::VectorXd coeffs = solver.solve(design.transpose() * y);
  return {coeffs.data(), coeffs.data() + coeffs.size()};
}

double eval_polynomial(std::span<const double> coefficients,
                       const std::vector<MultiIndex>& exponents,
                       std::span<const double> point) {
  require(coefficients.size() == exponents.size(), "eval_polynomial: size mismatch");
  double total = 0.0;
  for (std::size_t b = 0; b < exponents.size(); ++b) {
    double value = coefficients[b];
    for (std::size_t a = 0; a < point.size(); ++a) {
      const int e = exponents[b][a];
      for (int rep = 0; rep < e; ++rep) value *= point[a];
    }
    total += value;
  }
  return total;
}

std::vector<double> regress_continuation(const PathSet& paths, int k, const Payoff& payoff,
                                         int degree) {
  require(!paths.paths.empty(), "regress_continuation: no paths");
  const std::size_t n = paths.paths.size();
  require(paths.stopping.size() == n, "regress_continuation: stopping indices missing");

  std::vector<std::vector<double>> x(n);
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int tau = paths.stopping[i];
    if (tau <= k) {
      std::ostringstream msg;
      msg << "regress_continuation: stopping index " << tau << " not beyond date " << k;
      throw std::invalid_argument(msg.str());
    }
    x[i] = paths.paths[i][static_cast<std::size_t>(k)];
    y[i] = payoff(paths.paths[i][static_cast<std::size_t>(tau)]);
  }
  try {
    return fit_polynomial(x, y, degree);
  } catch (const std::runtime_error& error) {
    std::ostringstream msg;
    msg << "regress_continuation: regression failed at date " << k << ": " << error.what();
    throw std::runtime_error(msg.str());
  }
}

LSMResult lsm_price(const TransitionKernel& kernel, const Payoff& payoff,
                    const LSMConfig& cfg) {
  require(cfg.n_samples >= 2, "lsm_price: n_samples must be >= 2");
  require(cfg.degree >= 0, "lsm_price: degree must be >= 0");
  const int k_dates = kernel.num_dates();

  PathSet set;
  set.paths.resize(static_cast<std::size_t>(cfg.n_samples));
  set.stopping.assign(static_cast<std::size_t>(cfg.n_samples), k_dates);
  for (long long i = 0; i < cfg.n_samples; ++i) {
    std::mt19937_64 rng = substream(cfg.seed, 0x4c534d00ULL, static_cast<std::uint64_t>(i));
    set.paths[static_cast<std::size_t>(i)] = sample_path(kernel, rng);
  }

  const auto exponents = monomial_exponents(kernel.dim(), cfg.degree);
  for (int k = k_dates - 1; k >= 1; --k) {
    const std::vector<double> coeffs = regress_continuation(set, k, payoff, cfg.degree);
    for (std::size_t i = 0; i < set.paths.size(); ++i) {
      const std::vector<double>& s_k = set.paths[i][static_cast<std::size_t>(k)];
      const double continuation = eval_polynomial(coeffs, exponents, s_k);
      if (continuation <= payoff(s_k)) set.stopping[i] = k;  // "<=" tie-break
    }
  }

  double mean = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < set.paths.size(); ++i) {
    const double stopped =
        payoff(set.paths[i][static_cast<std::size_t>(set.stopping[i])]);
    mean += stopped;
    sum_sq += stopped * stopped;
  }
  const double n = static_cast<double>(cfg.n_samples);
  mean /= n;
  const double variance = std::max(0.0, (sum_sq / n - mean * mean) * n / (n - 1.0));

  LSMResult result;
  result.value = mean;
  result.std_error = std::sqrt(variance / n);
  result.transitions_sampled = cfg.n_samples * static_cast<long long>(k_dates);
  return result;
}

}  // namespace chebqae
