// SPDX-License-Identifier: MIT
//
// chebqae: Bermudan option pricing by Chebyshev interpolation of continuation
// values, with nodal values estimated through an emulated amplitude-estimation
// measurement law. Every subcommand writes exactly one deterministic JSON
// record per result to stdout; timings and human-readable notes go to stderr.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "chebqae/chebyshev.hpp"
#include "chebqae/lsm.hpp"
#include "chebqae/market.hpp"
#include "chebqae/oracles.hpp"
#include "chebqae/pricer.hpp"
#include "chebqae/qae.hpp"

namespace {

using nlohmann::json;

struct LoadedConfig {
  chebqae::GBMModel model;
  int n_z = 2;
  chebqae::Payoff payoff;
  std::vector<chebqae::HyperRectangle> domains;
  std::vector<double> value_bounds;
  std::vector<chebqae::AnalyticityParams> analyticity;
  std::optional<double> eps;
  std::vector<int> degrees;
  std::vector<chebqae::QAEConfig> schedules;
  bool exact_probabilities = false;
  long long lsm_samples = 100000;
  int lsm_degree = 5;
  json canonical;  // parsed config echoed into every record
};

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (const unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  char buffer[19];
  std::snprintf(buffer, sizeof(buffer), "0x%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

std::string format_csv(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

LoadedConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json root = json::parse(in);

  LoadedConfig cfg;
  const json& model = root.at("model");
  cfg.model.spot = model.at("spot").get<std::vector<double>>();
  cfg.model.vols = model.at("vols").get<std::vector<double>>();
  cfg.model.correlation = model.at("correlation").get<std::vector<std::vector<double>>>();
  cfg.model.exercise_times = model.at("exercise_times").get<std::vector<double>>();
  cfg.n_z = model.at("n_z").get<int>();

  const json& payoff = root.at("payoff");
  const std::string kind = payoff.at("kind").get<std::string>();
  if (kind == "put") {
    cfg.payoff.kind = chebqae::PayoffKind::put;
  } else if (kind == "basket_put") {
    cfg.payoff.kind = chebqae::PayoffKind::basket_put;
  } else {
    throw std::runtime_error("payoff.kind must be 'put' or 'basket_put'");
  }
  cfg.payoff.strike = payoff.at("strike").get<double>();

  if (root.contains("domains")) {
    const json& domains = root.at("domains");
    const std::string mode = domains.value("mode", "default");
    if (mode == "default") {
      cfg.domains = chebqae::default_domains(cfg.model, domains.value("width_sigmas", 3.0));
    } else if (mode == "explicit") {
      for (const json& box : domains.at("boxes")) {
        cfg.domains.emplace_back(box.at("lower").get<std::vector<double>>(),
                                 box.at("upper").get<std::vector<double>>());
      }
    } else {
      throw std::runtime_error("domains.mode must be 'default' or 'explicit'");
    }
  } else {
    cfg.domains = chebqae::default_domains(cfg.model, 3.0);
  }

  const json& pricer = root.at("pricer");
  cfg.value_bounds = pricer.at("value_bounds").get<std::vector<double>>();
  if (pricer.contains("analyticity")) {
    for (const json& entry : pricer.at("analyticity")) {
      cfg.analyticity.push_back(
          {entry.at("rho").get<double>(), entry.at("bound").get<double>()});
    }
  }
  if (pricer.contains("eps")) cfg.eps = pricer.at("eps").get<double>();
  if (pricer.contains("degrees")) cfg.degrees = pricer.at("degrees").get<std::vector<int>>();
  if (pricer.contains("schedules")) {
    for (const json& entry : pricer.at("schedules")) {
      cfg.schedules.push_back(
          {entry.at("n_qae").get<int>(), entry.at("n_rep").get<int>()});
    }
  }
  cfg.exact_probabilities = pricer.value("exact_probabilities", false);

  if (root.contains("lsm")) {
    const json& lsm = root.at("lsm");
    cfg.lsm_samples = lsm.value("n_samples", cfg.lsm_samples);
    cfg.lsm_degree = lsm.value("degree", cfg.lsm_degree);
  }

  cfg.canonical = std::move(root);
  return cfg;
}

json schedules_to_json(const std::vector<chebqae::QAEConfig>& schedules) {
  json out = json::array();
  for (const auto& s : schedules) out.push_back({{"n_qae", s.n_qae}, {"n_rep", s.n_rep}});
  return out;
}

// Resolve the pricing configuration: an explicit eps (from the flag or the
// config) wins and drives the a-priori schedule; otherwise the config must
// spell out degrees and schedules.
struct ResolvedPricer {
  chebqae::PricerConfig config;
  std::optional<chebqae::ScheduleSelection> selection;
  std::optional<double> eps;
};

ResolvedPricer resolve_pricer(const LoadedConfig& cfg, std::optional<double> eps_flag,
                              int threads) {
  ResolvedPricer out;
  const int num_dates = cfg.model.num_dates();
  std::optional<double> eps = eps_flag ? eps_flag : cfg.eps;
  if (eps) {
    if (static_cast<int>(cfg.analyticity.size()) != num_dates - 1) {
      throw std::runtime_error(
          "pricer.analyticity must provide (rho, bound) for each date 1..K-1 "
          "when eps drives the schedule");
    }
    out.selection = chebqae::select_parameters(*eps, cfg.analyticity, cfg.model.dim(),
                                               num_dates, cfg.value_bounds);
    out.config = chebqae::make_pricer_config(*out.selection, cfg.domains, cfg.value_bounds);
    out.eps = eps;
  } else {
    if (cfg.schedules.empty()) {
      throw std::runtime_error(
          "config must set either pricer.eps or pricer.degrees + pricer.schedules");
    }
    out.config.degrees = cfg.degrees;
    out.config.schedules = cfg.schedules;
    out.config.value_bounds = cfg.value_bounds;
    out.config.boundary = chebqae::BoundaryPolicy::flat_put(cfg.domains, num_dates);
  }
  out.config.exact_probabilities = cfg.exact_probabilities;
  out.config.threads = threads;
  return out;
}

void emit(const json& record) { std::cout << record.dump() << "\n"; }

class WallClock {
 public:
  explicit WallClock(std::string label) : label_(std::move(label)) {}
  ~WallClock() {
    const auto elapsed = std::chrono::steady_clock::now() - start_;
    const double ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(elapsed).count();
    std::fprintf(stderr, "%s: %.1f ms\n", label_.c_str(), ms);
  }

 private:
  std::string label_;
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int run_price_qae(const std::string& config_path, std::uint64_t seed, int threads,
                  std::optional<double> eps_flag) {
  const WallClock clock("price-qae");
  const LoadedConfig cfg = load_config(config_path);
  const ResolvedPricer resolved = resolve_pricer(cfg, eps_flag, threads);
  const chebqae::TransitionKernel kernel(cfg.model, cfg.n_z);
  const auto result =
      chebqae::backward_induce(kernel, cfg.payoff, resolved.config, seed);

  json record{{"command", "price-qae"},
              {"config_hash", fnv1a_hex(cfg.canonical.dump())},
              {"seed", seed},
              {"threads", threads},
              {"value", result.value},
              {"p0_true", result.p0_true},
              {"p0_estimate", result.p0_estimate},
              {"oracle_calls", result.oracle_calls_total},
              {"nodes_estimated", result.nodal_records.size()},
              {"degrees", resolved.config.degrees},
              {"schedules", schedules_to_json(resolved.config.schedules)},
              {"exact_probabilities", resolved.config.exact_probabilities},
              {"config", cfg.canonical}};
  if (resolved.eps) {
    record["eps"] = *resolved.eps;
    record["n_est"] = resolved.selection->n_est;
    record["n_total"] = resolved.selection->n_total;
  }
  emit(record);
  return 0;
}

int run_price_lsm(const std::string& config_path, std::uint64_t seed,
                  std::optional<long long> samples, std::optional<int> degree) {
  const WallClock clock("price-lsm");
  const LoadedConfig cfg = load_config(config_path);
  const chebqae::TransitionKernel kernel(cfg.model, cfg.n_z);
  chebqae::LSMConfig lsm;
  lsm.n_samples = samples.value_or(cfg.lsm_samples);
  lsm.degree = degree.value_or(cfg.lsm_degree);
  lsm.seed = seed;
  const auto result = chebqae::lsm_price(kernel, cfg.payoff, lsm);

  emit(json{{"command", "price-lsm"},
            {"config_hash", fnv1a_hex(cfg.canonical.dump())},
            {"seed", seed},
            {"n_samples", lsm.n_samples},
            {"degree", lsm.degree},
            {"value", result.value},
            {"std_error", result.std_error},
            {"transitions_sampled", result.transitions_sampled},
            {"config", cfg.canonical}});
  return 0;
}

int run_price_oracle(const std::string& config_path, const std::string& method,
                     std::optional<int> truncate_dates, int steps) {
  const WallClock clock("price-oracle");
  const LoadedConfig cfg = load_config(config_path);
  json record{{"command", "price-oracle"},
              {"config_hash", fnv1a_hex(cfg.canonical.dump())},
              {"method", method},
              {"config", cfg.canonical}};
  if (method == "dp") {
    const chebqae::TransitionKernel kernel(cfg.model, cfg.n_z);
    record["value"] = chebqae::dp_exact_price(kernel, cfg.payoff, truncate_dates);
    if (truncate_dates) record["num_dates"] = *truncate_dates;
  } else if (method == "binomial") {
    if (cfg.model.dim() != 1) throw std::runtime_error("binomial oracle requires d = 1");
    record["value"] = chebqae::binomial_bermudan_price(
        cfg.model.spot[0], cfg.payoff.strike, cfg.model.vols[0],
        cfg.model.exercise_times, steps);
    record["steps_per_interval"] = steps;
  } else if (method == "bs") {
    if (cfg.model.dim() != 1) throw std::runtime_error("bs oracle requires d = 1");
    record["value"] = chebqae::bs_european_put(cfg.model.spot[0], cfg.payoff.strike,
                                               cfg.model.vols[0],
                                               cfg.model.exercise_times.back());
  } else {
    throw std::runtime_error("method must be dp, binomial, or bs");
  }
  emit(record);
  return 0;
}

int run_select_params(const std::string& config_path, double eps) {
  const WallClock clock("select-params");
  const LoadedConfig cfg = load_config(config_path);
  const auto selection =
      chebqae::select_parameters(eps, cfg.analyticity, cfg.model.dim(),
                                 cfg.model.num_dates(), cfg.value_bounds);
  emit(json{{"command", "select-params"},
            {"config_hash", fnv1a_hex(cfg.canonical.dump())},
            {"eps", eps},
            {"degrees", selection.degrees},
            {"eps_bar", selection.eps_bar},
            {"schedules", schedules_to_json(selection.schedules)},
            {"n_est", selection.n_est},
            {"n_total", selection.n_total}});
  return 0;
}

int run_validate_qae(int t_max) {
  const WallClock clock("validate-qae");
  double max_tv = 0.0;
  int cases = 0;
  for (int t = 2; t <= t_max; ++t) {
    for (int i = 0; i <= 10; ++i) {
      const double a = i / 10.0;
      const auto simulated = chebqae::statevector_qae_distribution(a, t);
      const auto analytic = chebqae::qae_outcome_distribution(a, 1 << t);
      max_tv = std::max(max_tv, chebqae::total_variation(simulated, analytic));
      ++cases;
    }
  }
  const double band_floor = 8.0 / (std::numbers::pi * std::numbers::pi);
  json band = json::array();
  bool band_ok = true;
  for (const int n_qae : {70, 140, 280}) {
    const auto dist = chebqae::qae_outcome_distribution(0.3, n_qae / 2);
    double mass = 0.0;
    for (const auto& pt : dist) {
      if (std::abs(pt.estimate - 0.3) <= 7.0 / n_qae) mass += pt.probability;
    }
    band.push_back({{"n_qae", n_qae}, {"mass", mass}});
    band_ok = band_ok && mass >= band_floor;
  }
  const bool pass = max_tv < 1e-9 && band_ok;
  emit(json{{"command", "validate-qae"},
            {"statevector_cases", cases},
            {"max_total_variation", max_tv},
            {"band_masses", band},
            {"band_floor", band_floor},
            {"pass", pass}});
  return pass ? 0 : 2;
}

int run_sweep(const std::string& config_path, std::uint64_t seed, int threads,
              const std::vector<double>& epsilons, const std::string& out_path) {
  const WallClock clock("sweep-epsilon");
  if (epsilons.empty()) throw std::runtime_error("sweep needs at least one epsilon");
  const LoadedConfig cfg = load_config(config_path);
  const chebqae::TransitionKernel kernel(cfg.model, cfg.n_z);
  const double reference = chebqae::dp_exact_price(kernel, cfg.payoff);

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + out_path);
  out << "epsilon,n_tot,abs_error,bound_thm3,bound_thm4,seed\r\n";

  json rows = json::array();
  for (const double eps : epsilons) {
    const ResolvedPricer resolved = resolve_pricer(cfg, eps, threads);
    const auto result = chebqae::backward_induce(kernel, cfg.payoff, resolved.config, seed);
    const double abs_error = std::abs(result.value - reference);

    chebqae::BoundInputs inputs;
    inputs.analyticity = cfg.analyticity;
    inputs.eps_boundary.assign(cfg.analyticity.size(), 0.0);
    for (std::size_t k = 0; k < resolved.selection->eps_bar.size(); ++k) {
      // Amplitude tolerance -> value tolerance at date k via 2 Vmax_{k+1}.
      inputs.eps_qae.push_back(2.0 * cfg.value_bounds[k] *
                               resolved.selection->eps_bar[k]);
    }
    const double thm3 = chebqae::error_bound_thm3(inputs, resolved.selection->degrees,
                                                  cfg.model.dim(), cfg.model.num_dates());
    const double thm4 = chebqae::error_bound_thm4(inputs, resolved.selection->degrees,
                                                  cfg.model.dim(), cfg.model.num_dates());
    out << format_csv(eps) << "," << resolved.selection->n_total << ","
        << format_csv(abs_error) << "," << format_csv(thm3) << "," << format_csv(thm4)
        << "," << seed << "\r\n";
    rows.push_back({{"epsilon", eps},
                    {"n_tot", resolved.selection->n_total},
                    {"abs_error", abs_error},
                    {"bound_thm3", thm3},
                    {"bound_thm4", thm4}});
  }
  emit(json{{"command", "sweep-epsilon"},
            {"config_hash", fnv1a_hex(cfg.canonical.dump())},
            {"seed", seed},
            {"reference", reference},
            {"rows", rows},
            {"out", out_path}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Bermudan option pricing via Chebyshev interpolation with an emulated "
      "amplitude-estimation measurement law"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  int threads = 1;
  double eps = 0.0;
  bool eps_set = false;

  auto* price_qae = app.add_subcommand("price-qae", "Run the interpolation pricer");
  price_qae->add_option("--config", config_path, "JSON configuration file")->required();
  price_qae->add_option("--seed", seed, "master seed")->envname("CHEBQAE_SEED");
  price_qae->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  price_qae->add_option("--eps", eps, "target accuracy driving the schedule")
      ->each([&eps_set](const std::string&) { eps_set = true; });

  long long lsm_samples = 0;
  int lsm_degree = -1;
  auto* price_lsm = app.add_subcommand("price-lsm", "Run the least-squares baseline");
  price_lsm->add_option("--config", config_path, "JSON configuration file")->required();
  price_lsm->add_option("--seed", seed, "master seed")->envname("CHEBQAE_SEED");
  price_lsm->add_option("--samples", lsm_samples, "sample paths");
  price_lsm->add_option("--degree", lsm_degree, "regression total degree");

  std::string method = "dp";
  int truncate = 0;
  int steps = 1000;
  auto* price_oracle = app.add_subcommand("price-oracle", "Run a reference oracle");
  price_oracle->add_option("--config", config_path, "JSON configuration file")->required();
  price_oracle->add_option("--method", method, "dp | binomial | bs");
  price_oracle->add_option("--k", truncate, "truncate the chain to the first k dates");
  price_oracle->add_option("--steps", steps, "binomial steps per exercise interval");

  double select_eps = 0.05;
  auto* select = app.add_subcommand("select-params", "Print the a-priori schedule");
  select->add_option("--config", config_path, "JSON configuration file")->required();
  select->add_option("--eps", select_eps, "target accuracy")->required();

  int t_max = 8;
  auto* validate = app.add_subcommand("validate-qae",
                                      "Cross-check the measurement law against a "
                                      "statevector simulation");
  validate->add_option("--t-max", t_max, "largest counting-register width")
      ->check(CLI::Range(2, 12));

  std::vector<double> epsilons;
  std::string out_path;
  auto* sweep = app.add_subcommand("sweep-epsilon", "Accuracy/cost sweep to CSV");
  sweep->add_option("--config", config_path, "JSON configuration file")->required();
  sweep->add_option("--seed", seed, "master seed")->envname("CHEBQAE_SEED");
  sweep->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--epsilons", epsilons, "comma-separated accuracy targets")
      ->required()
      ->delimiter(',');
  sweep->add_option("--out", out_path, "CSV output path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (price_qae->parsed()) {
      return run_price_qae(config_path, seed, threads,
                           eps_set ? std::optional<double>(eps) : std::nullopt);
    }
    if (price_lsm->parsed()) {
      return run_price_lsm(config_path, seed,
                           lsm_samples > 0 ? std::optional<long long>(lsm_samples)
                                           : std::nullopt,
                           lsm_degree >= 0 ? std::optional<int>(lsm_degree) : std::nullopt);
    }
    if (price_oracle->parsed()) {
      return run_price_oracle(config_path, method,
                              truncate > 0 ? std::optional<int>(truncate) : std::nullopt,
                              steps);
    }
    if (select->parsed()) return run_select_params(config_path, select_eps);
    if (validate->parsed()) return run_validate_qae(t_max);
    if (sweep->parsed()) return run_sweep(config_path, seed, threads, epsilons, out_path);
  } catch (const std::exception& error) {
    std::fprintf(stderr, "error: %s\n", error.what());
    return 1;
  }
  return 0;
}
