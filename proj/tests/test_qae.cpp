// SPDX-License-Identifier: MIT
#include "chebqae/qae.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "chebqae/random.hpp"

namespace chebqae {
namespace {

constexpr double kEightOverPiSq = 0.81056946913870217;

double band_mass(const std::vector<OutcomePoint>& dist, double a, double tol) {
  double mass = 0.0;
  for (const auto& pt : dist) {
    if (std::abs(pt.estimate - a) <= tol) mass += pt.probability;
  }
  return mass;
}

TEST(OutcomeDistribution, NormalizesOnDenseAmplitudeGrid) {
  for (const int m : {2, 4, 8, 16, 64}) {
    for (int i = 0; i <= 100; ++i) {
      const double a = i / 100.0;
      const auto dist = qae_outcome_distribution(a, m);
      double total = 0.0;
      for (const auto& pt : dist) {
        EXPECT_GE(pt.probability, -1e-15);
        EXPECT_GE(pt.estimate, 0.0);
        EXPECT_LE(pt.estimate, 1.0);
        total += pt.probability;
      }
      EXPECT_NEAR(total, 1.0, 1e-12) << "a=" << a << " M=" << m;
    }
  }
}

TEST(OutcomeDistribution, FoldedSupportIsSinSquaredGrid) {
  const int m = 8;
  const auto dist = qae_outcome_distribution(0.37, m);
  ASSERT_EQ(dist.size(), static_cast<std::size_t>(m / 2 + 1));
  for (std::size_t y = 0; y < dist.size(); ++y) {
    const double angle = std::numbers::pi * static_cast<double>(y) / m;
    EXPECT_NEAR(dist[y].estimate, std::sin(angle) * std::sin(angle), 1e-15);
  }
}

// When a = sin^2(pi y / M) lies exactly on the estimate grid, the measurement
// is deterministic.
TEST(OutcomeDistribution, GridAmplitudesAreMeasuredExactly) {
  {
    const auto dist = qae_outcome_distribution(0.25, 6);  // sin^2(pi/6)
    for (const auto& pt : dist) {
      const double expected = std::abs(pt.estimate - 0.25) < 1e-12 ? 1.0 : 0.0;
      EXPECT_NEAR(pt.probability, expected, 1e-12);
    }
  }
  {
    const auto dist = qae_outcome_distribution(0.5, 4);  // sin^2(pi/4)
    for (const auto& pt : dist) {
      const double expected = std::abs(pt.estimate - 0.5) < 1e-12 ? 1.0 : 0.0;
      EXPECT_NEAR(pt.probability, expected, 1e-12);
    }
  }
}

TEST(OutcomeDistribution, DegenerateAmplitudes) {
  const auto zero = qae_outcome_distribution(0.0, 16);
  EXPECT_NEAR(zero.front().estimate, 0.0, 1e-15);
  EXPECT_NEAR(zero.front().probability, 1.0, 1e-12);
  const auto one = qae_outcome_distribution(1.0, 16);
  EXPECT_NEAR(one.back().estimate, 1.0, 1e-15);
  EXPECT_NEAR(one.back().probability, 1.0, 1e-12);
}

// The single-round accuracy guarantee: at least 8/pi^2 of the mass lies
// within 7/N_QAE of the true amplitude.
TEST(OutcomeDistribution, BandMassDominatesEightOverPiSquared) {
  const double a = 0.3;
  const struct {
    int n_qae;
    double frozen;
  } cases[] = {{70, 0.81609118272809}, {140, 0.99101355485356}, {280, 0.96607673216088}};
  for (const auto& c : cases) {
    const auto dist = qae_outcome_distribution(a, c.n_qae / 2);
    const double mass = band_mass(dist, a, 7.0 / c.n_qae);
    EXPECT_GE(mass, kEightOverPiSq) << "N=" << c.n_qae;
    EXPECT_NEAR(mass, c.frozen, 1e-10) << "N=" << c.n_qae;
  }
  // More rounds per call widens the accurate band monotonically in the error
  // guarantee sense even though the in-band mass itself is not monotone.
  EXPECT_LT(7.0 / 280, 7.0 / 70);
}

TEST(SingleRound, EmpiricalBandFrequencyMatchesLaw) {
  const double a = 0.3;
  const int n_qae = 140;
  auto rng = substream(314159u, 1u, 2u);
  const int trials = 10000;
  int in_band = 0;
  for (int i = 0; i < trials; ++i) {
    const double est = run_qae_round(a, n_qae, rng);
    if (std::abs(est - a) <= 7.0 / n_qae) ++in_band;
  }
  const double frequency = static_cast<double>(in_band) / trials;
  EXPECT_GE(frequency, 0.81);
  EXPECT_NEAR(frequency, 0.99101355485356, 0.01);
}

TEST(SingleRound, SamplesLieOnEstimateGrid) {
  const int n_qae = 24;  // M = 12
  auto rng = substream(7u, 7u, 7u);
  for (int i = 0; i < 200; ++i) {
    const double est = run_qae_round(0.42, n_qae, rng);
    bool on_grid = false;
    for (int y = 0; y <= 6; ++y) {
      const double angle = std::numbers::pi * y / 12.0;
      if (std::abs(est - std::sin(angle) * std::sin(angle)) < 1e-12) on_grid = true;
    }
    EXPECT_TRUE(on_grid) << "estimate " << est;
  }
  EXPECT_THROW((void)run_qae_round(0.5, 1, rng), std::invalid_argument);
  EXPECT_THROW((void)run_qae_round(-0.1, 8, rng), std::domain_error);
  EXPECT_THROW((void)run_qae_round(1.1, 8, rng), std::domain_error);
}

TEST(MedianQAE, AggregatesRoundsAndCountsOracleCalls) {
  const QAEConfig cfg{70, 37};
  auto rng = substream(5u, 3u, 9u);
  const auto est = run_median_qae(0.3, cfg, rng);
  EXPECT_EQ(est.oracle_calls, 70LL * 37LL);
  ASSERT_EQ(est.rounds.size(), 37u);
  auto sorted = est.rounds;
  std::nth_element(sorted.begin(), sorted.begin() + 18, sorted.end());
  EXPECT_DOUBLE_EQ(est.value, sorted[18]);
  EXPECT_LE(std::abs(est.value - 0.3), 7.0 / 70);
}

TEST(MedianQAE, MedianBoostsConfidence) {
  // 20 independent schedules at the theorem-2 repetition count for
  // gamma = 0.05; each failure has probability < 0.05, and the frozen seeds
  // land every median inside the band.
  const QAEConfig cfg{70, theorem2_reps(0.05)};
  EXPECT_EQ(cfg.n_rep, 37);
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    auto rng = substream(171717u, trial, 0u);
    const auto est = run_median_qae(0.3, cfg, rng);
    EXPECT_LE(std::abs(est.value - 0.3), 7.0 / 70) << "trial " << trial;
  }
}

TEST(MedianQAE, RejectsEvenRepetitions) {
  auto rng = substream(1u, 1u, 1u);
  EXPECT_THROW((void)run_median_qae(0.5, QAEConfig{16, 2}, rng), std::invalid_argument);
  EXPECT_THROW((void)run_median_qae(0.5, QAEConfig{16, 0}, rng), std::invalid_argument);
}

TEST(RepetitionCount, FrozenSchedule) {
  EXPECT_EQ(theorem2_reps(0.05), 37);
  EXPECT_EQ(theorem2_reps(0.01), 61);
  EXPECT_EQ(theorem2_reps(0.3), 25);
  EXPECT_EQ(theorem2_reps(0.5), 13);
  EXPECT_THROW((void)theorem2_reps(0.0), std::domain_error);
  EXPECT_THROW((void)theorem2_reps(1.0), std::domain_error);
}

// The analytic measurement law must coincide with an explicit statevector
// simulation of phase estimation on the Grover operator.
TEST(Statevector, MatchesAnalyticLaw) {
  for (const int t : {2, 3, 4, 5, 6, 7, 8}) {
    for (const double a : {0.1, 0.3, 0.7, 0.95}) {
      const auto simulated = statevector_qae_distribution(a, t);
      const auto analytic = qae_outcome_distribution(a, 1 << t);
      EXPECT_LT(total_variation(simulated, analytic), 1e-9)
          << "t=" << t << " a=" << a;
    }
  }
  EXPECT_THROW((void)statevector_qae_distribution(0.5, 1), std::invalid_argument);
  EXPECT_THROW((void)statevector_qae_distribution(0.5, 13), std::invalid_argument);
}

TEST(TotalVariation, BasicProperties) {
  const auto p = qae_outcome_distribution(0.3, 8);
  EXPECT_DOUBLE_EQ(total_variation(p, p), 0.0);
  const auto q = qae_outcome_distribution(0.6, 8);
  const double tv = total_variation(p, q);
  EXPECT_GT(tv, 0.0);
  EXPECT_LE(tv, 1.0);
  EXPECT_DOUBLE_EQ(tv, total_variation(q, p));
  const auto other = qae_outcome_distribution(0.3, 16);
  EXPECT_THROW((void)total_variation(p, other), std::invalid_argument);
}

TEST(Determinism, IdenticalSeedsReproduceEstimates) {
  const QAEConfig cfg{96, 11};
  auto rng1 = substream(123456u, 4u, 2u);
  auto rng2 = substream(123456u, 4u, 2u);
  const auto est1 = run_median_qae(0.41, cfg, rng1);
  const auto est2 = run_median_qae(0.41, cfg, rng2);
  EXPECT_EQ(est1.value, est2.value);
  EXPECT_EQ(est1.rounds, est2.rounds);
  auto rng3 = substream(123457u, 4u, 2u);
  const auto est3 = run_median_qae(0.41, cfg, rng3);
  EXPECT_NE(est1.rounds, est3.rounds);
}

}  // namespace
}  // namespace chebqae
