// SPDX-License-Identifier: MIT
#include "chebqae/qae.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "chebqae/random.hpp"

namespace chebqae {

namespace {

constexpr double pi = std::numbers::pi;

// Squared Dirichlet-type phase-estimation kernel d_M(x), periodic with
// period 1, with the removable singularity at x = 0 handled explicitly.
double phase_kernel(double x, int m_grover) {
  const double r = x - std::round(x);  // reduce to [-1/2, 1/2]
  if (r == 0.0) return 1.0;
  const double num = std::sin(m_grover * r * pi);
  const double den = m_grover * std::sin(r * pi);
  return (num * num) / (den * den);
}

// Probability of raw outcome y in {0,...,M-1}.
double outcome_probability(double omega, int y, int m_grover) {
  const double frac = static_cast<double>(y) / m_grover;
  return 0.5 * (phase_kernel(frac - omega, m_grover) + phase_kernel(frac + omega, m_grover));
}

std::vector<OutcomePoint> fold_outcomes(const std::vector<double>& raw, int m_grover) {
  std::vector<OutcomePoint> folded;
  folded.reserve(static_cast<std::size_t>(m_grover / 2) + 1);
  for (int y = 0; y <= m_grover / 2; ++y) {
    const double s = std::sin(pi * y / m_grover);
    double p = raw[static_cast<std::size_t>(y)];
    const int mirror = m_grover - y;
    if (mirror != y && mirror < m_grover) p += raw[static_cast<std::size_t>(mirror)];
    folded.push_back({s * s, p});
  }
  return folded;
}

void check_amplitude(double a) {
  if (!(a >= 0.0 && a <= 1.0)) {
    std::ostringstream msg;
    msg << "qae: amplitude a=" << a << " outside [0, 1]";
    throw std::domain_error(msg.str());
  }
}

}  // namespace

std::vector<OutcomePoint> qae_outcome_distribution(double a, int m_grover) {
  check_amplitude(a);
  if (m_grover < 1) throw std::invalid_argument("qae_outcome_distribution: M must be >= 1");
  const double omega = std::asin(std::sqrt(a)) / pi;
  std::vector<double> raw(static_cast<std::size_t>(m_grover));
  for (int y = 0; y < m_grover; ++y) {
    raw[static_cast<std::size_t>(y)] = outcome_probability(omega, y, m_grover);
  }
  return fold_outcomes(raw, m_grover);
}

double run_qae_round(double a, int n_qae, std::mt19937_64& rng) {
  if (n_qae < 2) throw std::invalid_argument("run_qae_round: n_qae must be >= 2");
  const auto distribution = qae_outcome_distribution(a, n_qae / 2);
  const double u = canonical(rng);
  double cumulative = 0.0;
  for (const OutcomePoint& point : distribution) {
    cumulative += point.probability;
    if (u < cumulative) return point.estimate;
  }
  return distribution.back().estimate;
}

QAEEstimate run_median_qae(double a, const QAEConfig& cfg, std::mt19937_64& rng) {
  if (cfg.n_qae < 2) throw std::invalid_argument("run_median_qae: n_qae must be >= 2");
  if (cfg.n_rep < 1 || cfg.n_rep % 2 == 0) {
    throw std::invalid_argument("run_median_qae: n_rep must be a positive odd integer");
  }
  const auto distribution = qae_outcome_distribution(a, cfg.n_qae / 2);
  std::vector<double> cdf(distribution.size());
  double cumulative = 0.0;
  for (std::size_t i = 0; i < distribution.size(); ++i) {
    cumulative += distribution[i].probability;
    cdf[i] = cumulative;
  }

  QAEEstimate estimate;
  estimate.rounds.reserve(static_cast<std::size_t>(cfg.n_rep));
  for (int r = 0; r < cfg.n_rep; ++r) {
    const double u = canonical(rng);
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const std::size_t idx = std::min(static_cast<std::size_t>(it - cdf.begin()),
                                     distribution.size() - 1);
    estimate.rounds.push_back(distribution[idx].estimate);
  }
  std::vector<double> sorted = estimate.rounds;
  std::nth_element(sorted.begin(), sorted.begin() + cfg.n_rep / 2, sorted.end());
  estimate.value = sorted[static_cast<std::size_t>(cfg.n_rep / 2)];
  estimate.oracle_calls = static_cast<long long>(cfg.n_qae) * cfg.n_rep;
  return estimate;
}

int theorem2_reps(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw std::domain_error("theorem2_reps: gamma must be in (0, 1)");
  }
  return 12 * static_cast<int>(std::ceil(std::log(1.0 / gamma))) + 1;
}

std::vector<OutcomePoint> statevector_qae_distribution(double a, int t) {
  check_amplitude(a);
  if (t < 2 || t > 12) {
    throw std::invalid_argument("statevector_qae_distribution: t must be in [2, 12]");
  }
  const int m = 1 << t;
  const double theta = std::asin(std::sqrt(a));

  // After the controlled Grover powers, the joint state is
  //   (1/sqrt(M)) sum_j |j> (x) Q^j |psi>,  Q^j |psi> = R(2 j theta) |psi>,
  // i.e. system amplitudes (cos((2j+1) theta), sin((2j+1) theta)).
  // Apply the inverse QFT to the counting register and read its marginal.
  std::vector<double> raw(static_cast<std::size_t>(m));
  const double norm = 1.0 / std::sqrt(static_cast<double>(m));
  for (int y = 0; y < m; ++y) {
    std::complex<double> amp0{0.0, 0.0};
    std::complex<double> amp1{0.0, 0.0};
    for (int j = 0; j < m; ++j) {
      const double phase = -2.0 * pi * j * y / m;
      const std::complex<double> twiddle{std::cos(phase), std::sin(phase)};
      const double angle = (2.0 * j + 1.0) * theta;
      amp0 += twiddle * std::cos(angle);
      amp1 += twiddle * std::sin(angle);
    }
    amp0 *= norm * norm;  // one 1/sqrt(M) from preparation, one from the QFT
    amp1 *= norm * norm;
    raw[static_cast<std::size_t>(y)] = std::norm(amp0) + std::norm(amp1);
  }
  return fold_outcomes(raw, m);
}

double total_variation(const std::vector<OutcomePoint>& p, const std::vector<OutcomePoint>& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("total_variation: distributions have different supports");
  }
  double distance = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (std::abs(p[i].estimate - q[i].estimate) > 1e-12) {
      throw std::invalid_argument("total_variation: support points disagree");
    }
    distance += std::abs(p[i].probability - q[i].probability);
  }
  return 0.5 * distance;
}

}  // namespace chebqae
