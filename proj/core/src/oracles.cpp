// SPDX-License-Identifier: MIT
#include "chebqae/oracles.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace chebqae {

double bs_european_put(double s0, double strike, double vol, double maturity) {
  if (!(s0 > 0.0 && strike > 0.0 && vol > 0.0 && maturity > 0.0)) {
    throw std::invalid_argument("bs_european_put: all inputs must be positive");
  }
  const double sqrt_t = std::sqrt(maturity);
  const double d1 = (std::log(s0 / strike) + 0.5 * vol * vol * maturity) / (vol * sqrt_t);
  const double d2 = d1 - vol * sqrt_t;
  const boost::math::normal_distribution<double> normal{};
  return strike * boost::math::cdf(normal, -d2) - s0 * boost::math::cdf(normal, -d1);
}

double dp_exact_price(const TransitionKernel& kernel, const Payoff& payoff,
                      std::optional<int> num_dates, long long max_states) {
  const int total = kernel.num_dates();
  const int k_max = num_dates.value_or(total);
  if (k_max < 1 || k_max > total) {
    std::ostringstream msg;
    msg << "dp_exact_price: num_dates=" << k_max << " out of [1, " << total << "]";
    throw std::invalid_argument(msg.str());
  }

  double states = 1.0;
  for (int k = 0; k < k_max; ++k) states *= static_cast<double>(kernel.branch_count());
  if (states > static_cast<double>(max_states)) {
    std::ostringstream msg;
    msg << "dp_exact_price: reachable state count " << states << " exceeds the guard "
        << max_states;
    throw std::invalid_argument(msg.str());
  }

  // V_k at a source point via depth-first enumeration of the product tree.
  const std::function<double(int, std::span<const double>)> value =
      [&](int k, std::span<const double> s) -> double {
    if (k == k_max) return payoff(s);
    double expectation = 0.0;
    for (std::size_t b = 0; b < kernel.branch_count(); ++b) {
      const std::vector<double> next = kernel.target(k, s, b);
      expectation += value(k + 1, next);
    }
    expectation *= kernel.branch_probability();
    if (k == 0) return expectation;  // no exercise right at t_0
    return std::max(payoff(s), expectation);
  };
  return value(0, kernel.model().spot);
}

double binomial_bermudan_price(double s0, double strike, double vol,
                               std::span<const double> exercise_times,
                               int steps_per_interval) {
  if (!(s0 > 0.0 && strike > 0.0 && vol > 0.0)) {
    throw std::invalid_argument("binomial_bermudan_price: inputs must be positive");
  }
  if (exercise_times.empty()) {
    throw std::invalid_argument("binomial_bermudan_price: need at least one exercise date");
  }
  if (steps_per_interval < 1) {
    throw std::invalid_argument("binomial_bermudan_price: steps_per_interval must be >= 1");
  }
  const int num_dates = static_cast<int>(exercise_times.size());
  const double maturity = exercise_times[exercise_times.size() - 1];
  const long long total_steps =
      static_cast<long long>(steps_per_interval) * num_dates;
  const double dt = maturity / static_cast<double>(total_steps);

  // Every exercise date must sit on the lattice.
  std::vector<bool> exercise_step(static_cast<std::size_t>(total_steps) + 1, false);
  for (double t : exercise_times) {
    const double steps = t / dt;
    const long long rounded = std::llround(steps);
    if (std::abs(steps - static_cast<double>(rounded)) > 1e-9 * static_cast<double>(total_steps) ||
        rounded < 1 || rounded > total_steps) {
      std::ostringstream msg;
      msg << "binomial_bermudan_price: exercise date " << t
          << " does not align with the lattice (dt=" << dt << ")";
      throw std::invalid_argument(msg.str());
    }
    exercise_step[static_cast<std::size_t>(rounded)] = true;
  }

  const double up = std::exp(vol * std::sqrt(dt));
  const double down = 1.0 / up;
  const double p_up = (1.0 - down) / (up - down);  // zero rate
  const double p_down = 1.0 - p_up;

  std::vector<double> values(static_cast<std::size_t>(total_steps) + 1);
  for (long long i = 0; i <= total_steps; ++i) {
    const double s = s0 * std::pow(up, static_cast<double>(2 * i - total_steps));
    values[static_cast<std::size_t>(i)] = std::max(strike - s, 0.0);
  }
  for (long long step = total_steps - 1; step >= 0; --step) {
    for (long long i = 0; i <= step; ++i) {
      double v = p_down * values[static_cast<std::size_t>(i)] +
                 p_up * values[static_cast<std::size_t>(i + 1)];
      if (step >= 1 && exercise_step[static_cast<std::size_t>(step)]) {
        const double s = s0 * std::pow(up, static_cast<double>(2 * i - step));
        v = std::max(v, strike - s);
      }
      values[static_cast<std::size_t>(i)] = v;
    }
  }
  return values[0];
}

}  // namespace chebqae
