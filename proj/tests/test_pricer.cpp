// SPDX-License-Identifier: MIT
#include "chebqae/pricer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "chebqae/oracles.hpp"

namespace chebqae {
namespace {

GBMModel single_asset_model(std::vector<double> times) {
  GBMModel model;
  model.spot = {100.0};
  model.vols = {0.2};
  model.correlation = {{1.0}};
  model.exercise_times = std::move(times);
  return model;
}

// Two-date chain that stays so deep in the money that the date-1 continuation
// function is affine: every reachable maturity state pays kappa - S exactly,
// so a degree-1 interpolant commits no interpolation error at all.
struct DeepItmSetup {
  GBMModel model;
  TransitionKernel kernel;
  Payoff payoff;
  PricerConfig config;

  static DeepItmSetup make(int degree, QAEConfig schedule, bool exact) {
    GBMModel model;
    model.spot = {60.0};
    model.vols = {0.2};
    model.correlation = {{1.0}};
    model.exercise_times = {0.5, 1.0};
    TransitionKernel kernel(model, 4);
    PricerConfig cfg;
    cfg.degrees = {degree};
    cfg.schedules = {schedule, schedule};
    cfg.value_bounds = {100.0, 100.0};
    std::vector<HyperRectangle> domains;
    domains.emplace_back(std::vector<double>{50.0}, std::vector<double>{70.5});
    cfg.boundary = BoundaryPolicy::flat_put(std::move(domains), 2);
    cfg.exact_probabilities = exact;
    return DeepItmSetup{std::move(model), std::move(kernel),
                        Payoff{PayoffKind::put, 100.0}, std::move(cfg)};
  }
};

TEST(NodalProbability, MapsContinuationIntoAmplitude) {
  const TransitionKernel kernel(single_asset_model({1.0}), 2);
  const Payoff put{PayoffKind::put, 100.0};
  const std::vector<double> node{100.0};
  const auto payoff_value = [&put](std::span<const double> s) { return put(s); };
  // Q^ = 7.1748710460760492, so P = 1/2 + Q^/(2 * 100).
  EXPECT_NEAR(nodal_probability(kernel, 0, node, payoff_value, 100.0),
              0.53587435523038025, 1e-9);
  const auto zero = [](std::span<const double>) { return 0.0; };
  EXPECT_DOUBLE_EQ(nodal_probability(kernel, 0, node, zero, 100.0), 0.5);
  const auto saturated = [](std::span<const double>) { return 50.0; };
  EXPECT_DOUBLE_EQ(nodal_probability(kernel, 0, node, saturated, 50.0), 1.0);
  const auto negative = [](std::span<const double>) { return -50.0; };
  EXPECT_DOUBLE_EQ(nodal_probability(kernel, 0, node, negative, 50.0), 0.0);
}

TEST(NodalProbability, FailsLoudlyWhenBoundIsViolated) {
  const TransitionKernel kernel(single_asset_model({1.0}), 2);
  const Payoff put{PayoffKind::put, 100.0};
  const std::vector<double> node{100.0};
  const auto payoff_value = [&put](std::span<const double> s) { return put(s); };
  try {
    (void)nodal_probability(kernel, 0, node, payoff_value, 5.0);
    FAIL() << "expected a bound-violation error";
  } catch (const std::runtime_error& error) {
    const std::string what = error.what();
    EXPECT_NE(what.find("exceeds the bound"), std::string::npos);
    EXPECT_NE(what.find("date 0"), std::string::npos);
  }
  EXPECT_THROW(
      (void)nodal_probability(kernel, 0, node, payoff_value, 0.0),
      std::invalid_argument);
}

TEST(BackwardInduce, SingleDateExactMatchesDp) {
  const TransitionKernel kernel(single_asset_model({1.0}), 2);
  const Payoff put{PayoffKind::put, 100.0};
  PricerConfig cfg;
  cfg.schedules = {QAEConfig{64, 5}};
  cfg.value_bounds = {100.0};
  cfg.boundary = BoundaryPolicy::flat_put({}, 1);
  cfg.exact_probabilities = true;
  const auto result = backward_induce(kernel, put, cfg, 1u);
  EXPECT_NEAR(result.value, 7.1748710460760492, 1e-9);
  EXPECT_NEAR(result.p0_true, 0.53587435523038025, 1e-12);
  EXPECT_EQ(result.p0_estimate, result.p0_true);
  EXPECT_TRUE(result.continuations.empty());
  EXPECT_TRUE(result.nodal_records.empty());
  EXPECT_EQ(result.oracle_calls_total, 64LL * 5LL);
}

TEST(BackwardInduce, SingleDateSampledLandsInBand) {
  const TransitionKernel kernel(single_asset_model({1.0}), 2);
  const Payoff put{PayoffKind::put, 100.0};
  PricerConfig cfg;
  cfg.schedules = {QAEConfig{14000, 37}};
  cfg.value_bounds = {100.0};
  cfg.boundary = BoundaryPolicy::flat_put({}, 1);
  const auto result = backward_induce(kernel, put, cfg, 20260825u);
  // |V^ - V| <= 2 Vmax * 7/N_QAE inside the median-boosted confidence band.
  EXPECT_NEAR(result.value, 7.1748710460760492, 2.0 * 100.0 * 7.0 / 14000.0);
  EXPECT_NE(result.p0_estimate, result.p0_true);
}

TEST(BackwardInduce, DeepInTheMoneyChainIsExactlyRecovered) {
  auto setup = DeepItmSetup::make(1, QAEConfig{64, 5}, /*exact=*/true);
  const double reference = dp_exact_price(setup.kernel, setup.payoff);
  const auto result = backward_induce(setup.kernel, setup.payoff, setup.config, 3u);
  // Affine continuation + exact amplitudes: only roundoff is left.
  EXPECT_NEAR(result.value, reference, 1e-9);
  ASSERT_EQ(result.continuations.size(), 1u);
  // The fitted continuation decreases in the spot.
  EXPECT_LT(result.continuations[0].coefficient({1}), 0.0);
  // Continuation dominates immediate exercise throughout the domain.
  for (double s = 50.5; s <= 70.0; s += 0.5) {
    const std::vector<double> point{s};
    EXPECT_GE(result.continuations[0](point) + 1e-9, setup.payoff(point));
  }
}

TEST(BackwardInduce, DeepChainDegreeTwoAddsNoCoefficients) {
  auto setup = DeepItmSetup::make(2, QAEConfig{64, 5}, /*exact=*/true);
  const double reference = dp_exact_price(setup.kernel, setup.payoff);
  const auto result = backward_induce(setup.kernel, setup.payoff, setup.config, 3u);
  EXPECT_NEAR(result.value, reference, 1e-9);
  EXPECT_NEAR(result.continuations[0].coefficient({2}), 0.0, 1e-9);
}

TEST(BackwardInduce, DeepChainSampledStaysWithinSchedule)
{
  auto setup = DeepItmSetup::make(1, QAEConfig{1000, 37}, /*exact=*/false);
  const double reference = dp_exact_price(setup.kernel, setup.payoff);
  const auto result = backward_induce(setup.kernel, setup.payoff, setup.config, 11u);
  // Two QAE layers, each within 2 Vmax 7/N with high probability, and the
  // Lebesgue bound of a degree-1 fit is below 1.45.
  const double per_layer = 2.0 * 100.0 * 7.0 / 1000.0;
  EXPECT_NEAR(result.value, reference, per_layer * (1.0 + 1.45) * 1.5);
  EXPECT_EQ(result.nodal_records.size(), 2u);
  for (const auto& record : result.nodal_records) {
    EXPECT_EQ(record.date, 1);
    EXPECT_GE(record.p_true, 0.0);
    EXPECT_LE(record.p_true, 1.0);
    EXPECT_NEAR(record.q_estimate, (2.0 * record.p_estimate - 1.0) * 100.0, 1e-12);
    EXPECT_EQ(record.oracle_calls, 1000LL * 37LL);
  }
}

TEST(BackwardInduce, AtTheMoneyErrorShrinksWithDegree) {
  const GBMModel model = single_asset_model({0.5, 1.0});
  const TransitionKernel kernel(model, 4);
  const Payoff put{PayoffKind::put, 100.0};
  const double reference = dp_exact_price(kernel, put);
  std::vector<double> errors;
  for (const int m : {1, 2, 16}) {
    PricerConfig cfg;
    cfg.degrees = {m};
    cfg.schedules = {QAEConfig{64, 5}, QAEConfig{64, 5}};
    cfg.value_bounds = {100.0, 100.0};
    cfg.boundary = BoundaryPolicy::flat_put(default_domains(model), 2);
    cfg.exact_probabilities = true;
    const auto result = backward_induce(kernel, put, cfg, 5u);
    errors.push_back(std::abs(result.value - reference));
  }
  // The conditional continuation has kinks, so convergence is slow and not
  // strictly monotone degree-to-degree; it still decays markedly.
  EXPECT_LT(errors[1], errors[0]);
  EXPECT_LT(errors[2], errors[1]);
  EXPECT_LT(errors[2], 0.02);
}

TEST(BackwardInduce, DeterministicAcrossThreadCounts) {
  for (const int threads : {1, 2, 8}) {
    auto setup = DeepItmSetup::make(3, QAEConfig{512, 9}, /*exact=*/false);
    setup.config.threads = threads;
    const auto result = backward_induce(setup.kernel, setup.payoff, setup.config, 77u);
    auto baseline = DeepItmSetup::make(3, QAEConfig{512, 9}, /*exact=*/false);
    const auto reference = backward_induce(baseline.kernel, baseline.payoff,
                                           baseline.config, 77u);
    EXPECT_EQ(result.value, reference.value) << "threads=" << threads;
    ASSERT_EQ(result.nodal_records.size(), reference.nodal_records.size());
    for (std::size_t j = 0; j < result.nodal_records.size(); ++j) {
      EXPECT_EQ(result.nodal_records[j].p_estimate,
                reference.nodal_records[j].p_estimate);
    }
  }
}

TEST(BackwardInduce, LedgerMatchesClosedForm) {
  auto setup = DeepItmSetup::make(4, QAEConfig{256, 7}, /*exact=*/false);
  const auto result = backward_induce(setup.kernel, setup.payoff, setup.config, 9u);
  EXPECT_EQ(result.oracle_calls_total, count_oracle_calls(setup.config));
  // 5 nodes at date 1 plus the single date-0 estimate.
  EXPECT_EQ(result.oracle_calls_total, 256LL * 7LL * 5LL + 256LL * 7LL);
  long long recorded = 256LL * 7LL;  // date-0 share
  for (const auto& record : result.nodal_records) recorded += record.oracle_calls;
  EXPECT_EQ(recorded, result.oracle_calls_total);
}

TEST(BackwardInduce, RejectsMismatchedConfigs) {
  const TransitionKernel kernel(single_asset_model({0.5, 1.0}), 2);
  const Payoff put{PayoffKind::put, 100.0};
  PricerConfig cfg;
  cfg.schedules = {QAEConfig{64, 5}};  // K = 1 config against a K = 2 kernel
  cfg.value_bounds = {100.0};
  cfg.boundary = BoundaryPolicy::flat_put({}, 1);
  EXPECT_THROW((void)backward_induce(kernel, put, cfg, 1u), std::invalid_argument);

  auto setup = DeepItmSetup::make(1, QAEConfig{64, 4}, /*exact=*/true);  // even reps
  EXPECT_THROW((void)backward_induce(setup.kernel, setup.payoff, setup.config, 1u),
               std::invalid_argument);
}

TEST(SelectParameters, FrozenTwoDateSchedule) {
  const std::vector<AnalyticityParams> analyticity{{2.0, 100.0}};
  const std::vector<double> bounds{100.0, 100.0};
  const auto sel = select_parameters(0.05, analyticity, 1, 2, bounds);
  ASSERT_EQ(sel.degrees.size(), 1u);
  EXPECT_EQ(sel.degrees[0], 8);
  ASSERT_EQ(sel.eps_bar.size(), 2u);
  EXPECT_NEAR(sel.eps_bar[0], 0.0022137941829089857, 1e-15);
  EXPECT_NEAR(sel.eps_bar[1], 0.0042880691814709288, 1e-15);
  ASSERT_EQ(sel.schedules.size(), 2u);
  EXPECT_EQ(sel.schedules[0].n_qae, 3162);
  EXPECT_EQ(sel.schedules[1].n_qae, 1633);
  EXPECT_EQ(sel.schedules[0].n_rep, 85);
  EXPECT_EQ(sel.schedules[1].n_rep, 85);
  EXPECT_EQ(sel.n_est, 10);
  EXPECT_EQ(sel.n_total, 1518015);
}

TEST(SelectParameters, DegreeGrowsAsToleranceTightens) {
  const std::vector<AnalyticityParams> analyticity{{2.0, 100.0}};
  const std::vector<double> bounds{100.0, 100.0};
  EXPECT_EQ(select_parameters(0.025, analyticity, 1, 2, bounds).degrees[0], 9);
  long long previous = 0;
  for (const double eps : {0.08, 0.04, 0.02}) {
    const auto sel = select_parameters(eps, analyticity, 1, 2, bounds);
    EXPECT_GT(sel.n_total, previous);
    previous = sel.n_total;
  }
}

TEST(SelectParameters, DegenerateBoundClampsDegreeAtOne) {
  const std::vector<AnalyticityParams> analyticity{{2.0, 0.0}};
  const std::vector<double> bounds{100.0, 100.0};
  const auto sel = select_parameters(0.05, analyticity, 1, 2, bounds);
  EXPECT_EQ(sel.degrees[0], 1);
}

TEST(SelectParameters, ScaleInvarianceOfTolerances) {
  const std::vector<AnalyticityParams> analyticity{{2.0, 100.0}, {2.0, 100.0}};
  const std::vector<double> bounds{100.0, 100.0, 100.0};
  const auto base = select_parameters(0.05, analyticity, 1, 3, bounds);
  const std::vector<AnalyticityParams> scaled_a{{2.0, 200.0}, {2.0, 200.0}};
  const std::vector<double> scaled_b{200.0, 200.0, 200.0};
  const auto scaled = select_parameters(0.05, scaled_a, 1, 3, scaled_b);
  EXPECT_EQ(base.degrees, scaled.degrees);
  ASSERT_EQ(base.eps_bar.size(), scaled.eps_bar.size());
  for (std::size_t i = 0; i < base.eps_bar.size(); ++i) {
    EXPECT_NEAR(base.eps_bar[i], scaled.eps_bar[i], 1e-15);
  }
}

TEST(SelectParameters, ValidatesInputs) {
  const std::vector<AnalyticityParams> analyticity{{2.0, 100.0}};
  const std::vector<double> bounds{100.0, 100.0};
  EXPECT_THROW((void)select_parameters(0.1, analyticity, 1, 2, bounds), std::domain_error);
  EXPECT_THROW((void)select_parameters(0.0, analyticity, 1, 2, bounds), std::domain_error);
  const std::vector<AnalyticityParams> bad_rho{{1.0, 100.0}};
  EXPECT_THROW((void)select_parameters(0.05, bad_rho, 1, 2, bounds), std::domain_error);
  EXPECT_THROW((void)select_parameters(0.05, analyticity, 1, 3, bounds),
               std::invalid_argument);
}

TEST(MakePricerConfig, WiresScheduleIntoRunnableConfig) {
  const std::vector<AnalyticityParams> analyticity{{2.0, 100.0}};
  const std::vector<double> bounds{100.0, 100.0};
  const auto sel = select_parameters(0.05, analyticity, 1, 2, bounds);
  std::vector<HyperRectangle> domains;
  domains.emplace_back(std::vector<double>{70.0}, std::vector<double>{140.0});
  const auto cfg = make_pricer_config(sel, std::move(domains), bounds);
  EXPECT_EQ(cfg.num_dates(), 2);
  EXPECT_EQ(cfg.degree_at(1), 8);
  EXPECT_EQ(cfg.schedule_at(0).n_qae, 3162);
  EXPECT_NO_THROW(cfg.validate(1));
  EXPECT_EQ(count_oracle_calls(cfg), sel.n_total);
}

TEST(CountOracleCalls, ClosedFormExample) {
  PricerConfig cfg;
  cfg.degrees = {1};
  cfg.schedules = {QAEConfig{100, 5}, QAEConfig{200, 5}};
  cfg.value_bounds = {100.0, 100.0};
  std::vector<HyperRectangle> domains;
  domains.emplace_back(std::vector<double>{80.0}, std::vector<double>{120.0});
  cfg.boundary = BoundaryPolicy::flat_put(std::move(domains), 2);
  // 100*5 at the pricing date + 2 nodes * 200*5 at date 1.
  EXPECT_EQ(count_oracle_calls(cfg), 2500);
}

TEST(ErrorBounds, FrozenWorkedExample) {
  BoundInputs inputs;
  inputs.analyticity = {{2.0, 1.0}};
  inputs.eps_boundary = {0.005};
  inputs.eps_qae = {0.005, 0.01};
  const std::vector<int> degrees{4};
  EXPECT_NEAR(error_bound_thm3(inputs, degrees, 1, 2), 0.23437014520646703, 1e-4);
  EXPECT_NEAR(error_bound_thm3(inputs, degrees, 1, 2), 0.23437014520646703, 1e-12);
  // For K = 2 the two bounds coincide.
  EXPECT_NEAR(error_bound_thm4(inputs, degrees, 1, 2),
              error_bound_thm3(inputs, degrees, 1, 2), 1e-15);
}

TEST(ErrorBounds, HandComputedThreeDateCase) {
  BoundInputs inputs;
  inputs.analyticity = {{2.0, 1.0}, {2.0, 1.0}};
  inputs.eps_boundary = {0.01, 0.01};
  inputs.eps_qae = {0.005, 0.005, 0.005};
  const std::vector<int> degrees{2, 2};
  const double lam = lebesgue_bound(1, 2);
  const double eps_int = interpolation_error_bound({2.0, 1.0}, 1, 2);
  const double thm3 = 0.005 + (eps_int + 0.01) + lam * 0.005 +
                      lam * (eps_int + 0.01) + lam * lam * 0.005;
  const double thm4 = 0.005 + 2.0 * (eps_int + 0.01) + 2.0 * lam * 0.005;
  EXPECT_NEAR(error_bound_thm3(inputs, degrees, 1, 3), thm3, 1e-12);
  EXPECT_NEAR(error_bound_thm4(inputs, degrees, 1, 3), thm4, 1e-12);
  // The refined bound drops the compounded Lebesgue product.
  EXPECT_LT(error_bound_thm4(inputs, degrees, 1, 3),
            error_bound_thm3(inputs, degrees, 1, 3));
}

TEST(ErrorBounds, StructuralProperties) {
  BoundInputs inputs;
  inputs.analyticity = {{2.0, 1.0}};
  inputs.eps_boundary = {0.0};
  inputs.eps_qae = {0.0, 0.0};
  const std::vector<int> degrees{4};
  // With all stochastic terms off, only the interpolation term remains.
  EXPECT_NEAR(error_bound_thm3(inputs, degrees, 1, 2),
              interpolation_error_bound({2.0, 1.0}, 1, 4), 1e-15);
  // The bound is linear in the QAE tolerances.
  BoundInputs scaled = inputs;
  scaled.eps_qae = {0.004, 0.006};
  BoundInputs doubled = inputs;
  doubled.eps_qae = {0.008, 0.012};
  const double base = error_bound_thm3(inputs, degrees, 1, 2);
  const double with_qae = error_bound_thm3(scaled, degrees, 1, 2);
  const double with_double = error_bound_thm3(doubled, degrees, 1, 2);
  EXPECT_NEAR(with_double - base, 2.0 * (with_qae - base), 1e-12);
  // Raising a degree lowers the interpolation part monotonically.
  const std::vector<int> finer{8};
  BoundInputs quiet = inputs;
  EXPECT_LT(error_bound_thm3(quiet, finer, 1, 2), error_bound_thm3(quiet, degrees, 1, 2));
}

TEST(ErrorBounds, ValidatesShapes) {
  BoundInputs inputs;
  inputs.analyticity = {{2.0, 1.0}};
  inputs.eps_boundary = {0.0};
  inputs.eps_qae = {0.0};  // needs K entries
  const std::vector<int> degrees{4};
  EXPECT_THROW((void)error_bound_thm3(inputs, degrees, 1, 2), std::invalid_argument);
  inputs.eps_qae = {0.0, 0.0};
  inputs.analyticity = {{0.9, 1.0}};
  EXPECT_THROW((void)error_bound_thm3(inputs, degrees, 1, 2), std::domain_error);
}

}  // namespace
}  // namespace chebqae
