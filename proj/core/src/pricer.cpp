// SPDX-License-Identifier: MIT
#include "chebqae/pricer.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "chebqae/random.hpp"

namespace chebqae {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

[[nodiscard]] long long pow_ll(long long base, int exp) {
  long long out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

void append_point(std::ostringstream& msg, std::span<const double> point) {
  msg << "(";
  for (std::size_t i = 0; i < point.size(); ++i) {
    if (i > 0) msg << ", ";
    msg << point[i];
  }
  msg << ")";
}

}  // namespace

int PricerConfig::degree_at(int k) const {
  if (k < 1 || k > static_cast<int>(degrees.size())) {
    throw std::out_of_range("PricerConfig: degree index out of [1, K-1]");
  }
  return degrees[static_cast<std::size_t>(k - 1)];
}

const QAEConfig& PricerConfig::schedule_at(int k) const {
  if (k < 0 || k >= static_cast<int>(schedules.size())) {
    throw std::out_of_range("PricerConfig: schedule index out of [0, K-1]");
  }
  return schedules[static_cast<std::size_t>(k)];
}

double PricerConfig::value_bound_at(int k) const {
  if (k < 1 || k > static_cast<int>(value_bounds.size())) {
    throw std::out_of_range("PricerConfig: value bound index out of [1, K]");
  }
  return value_bounds[static_cast<std::size_t>(k - 1)];
}

void PricerConfig::validate(int dim) const {
  const int k_dates = num_dates();
  require(k_dates >= 1, "PricerConfig: at least one exercise date");
  require(static_cast<int>(degrees.size()) == k_dates - 1,
          "PricerConfig: need one degree per date 1..K-1");
  require(static_cast<int>(value_bounds.size()) == k_dates,
          "PricerConfig: need one value bound per date 1..K");
  require(static_cast<int>(boundary.domains.size()) == k_dates - 1,
          "PricerConfig: need one domain per date 1..K-1");
  require(boundary.num_dates == k_dates, "PricerConfig: boundary policy date count mismatch");
  for (int m : degrees) require(m >= 0, "PricerConfig: degrees must be >= 0");
  for (double b : value_bounds) require(b > 0.0, "PricerConfig: value bounds must be positive");
  for (const QAEConfig& s : schedules) {
    require(s.n_qae >= 2, "PricerConfig: schedule n_qae must be >= 2");
    require(s.n_rep >= 1 && s.n_rep % 2 == 1, "PricerConfig: schedule n_rep must be odd");
  }
  for (const HyperRectangle& box : boundary.domains) {
    require(box.dim() == dim, "PricerConfig: domain dimension mismatch");
  }
  require(threads >= 1, "PricerConfig: threads must be >= 1");
}

double nodal_probability(
    const TransitionKernel& kernel, int k, std::span<const double> node,
    const std::function<double(std::span<const double>)>& next_value_extended,
    double value_bound_next) {
  require(value_bound_next > 0.0, "nodal_probability: value bound must be positive");
  double expectation = 0.0;
  for (std::size_t b = 0; b < kernel.branch_count(); ++b) {
    const std::vector<double> target = kernel.target(k, node, b);
    const double value = next_value_extended(target);
    if (!(std::abs(value) <= value_bound_next)) {
      std::ostringstream msg;
      msg << "nodal_probability: value " << value << " at target ";
      append_point(msg, target);
      msg << " reachable from node ";
      append_point(msg, node);
      msg << " at date " << k << " exceeds the bound " << value_bound_next
          << " (amplitude would leave [0,1])";
      throw std::runtime_error(msg.str());
    }
    expectation += value;
  }
  expectation *= kernel.branch_probability();
  const double p = 0.5 + expectation / (2.0 * value_bound_next);
  return std::min(1.0, std::max(0.0, p));  // shave pure roundoff
}

PricingResult backward_induce(const TransitionKernel& kernel, const Payoff& payoff,
                              const PricerConfig& cfg, std::uint64_t seed) {
  const int k_dates = kernel.num_dates();
  require(cfg.num_dates() == k_dates, "backward_induce: config/kernel date count mismatch");
  cfg.validate(kernel.dim());

  PricingResult result;
  std::vector<std::optional<TensorInterpolant>> interpolants(
      static_cast<std::size_t>(k_dates) + 1);

  // V~_{k} evaluated inside D_k (payoff itself for k = K).
  const auto inner_value = [&](int k) {
    return std::function<double(std::span<const double>)>(
        [&, k](std::span<const double> s) -> double {
          if (k == k_dates) return payoff(s);
          const TensorInterpolant& interp = *interpolants[static_cast<std::size_t>(k)];
          return std::max(payoff(s), interp(s));
        });
  };
  // G_k[V~_k] defined on the whole state space.
  const auto extended_value = [&](int k) {
    return std::function<double(std::span<const double>)>(
        [&, k, inner = inner_value(k)](std::span<const double> s) -> double {
          return extend_value(cfg.boundary, k, inner, s);
        });
  };

  for (int k = k_dates - 1; k >= 1; --k) {
    const HyperRectangle& domain = cfg.boundary.domain(k);
    const int m = cfg.degree_at(k);
    const double bound_next = cfg.value_bound_at(k + 1);
    const QAEConfig& schedule = cfg.schedule_at(k);
    const auto nodes = tensor_grid(domain, m);
    const auto next_extended = extended_value(k + 1);

    std::vector<NodalRecord> records(nodes.size());
    std::vector<double> nodal_q(nodes.size());
    const int worker_count =
        std::max(1, std::min<int>(cfg.threads, static_cast<int>(nodes.size())));
    std::atomic<std::size_t> cursor{0};
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(worker_count));

    const auto worker = [&](int worker_id) {
      try {
        for (std::size_t j = cursor.fetch_add(1); j < nodes.size();
             j = cursor.fetch_add(1)) {
          std::mt19937_64 rng = substream(seed, static_cast<std::uint64_t>(k), j);
          const double p_true =
              nodal_probability(kernel, k, nodes[j], next_extended, bound_next);
          double p_estimate = p_true;
          if (!cfg.exact_probabilities) {
            p_estimate = run_median_qae(p_true, schedule, rng).value;
          }
          const double q_estimate = (2.0 * p_estimate - 1.0) * bound_next;
          records[j] = NodalRecord{k,      j,          nodes[j], p_true,
                                   p_estimate, q_estimate,
                                   static_cast<long long>(schedule.n_qae) * schedule.n_rep};
          nodal_q[j] = q_estimate;
        }
      } catch (...) {
        failures[static_cast<std::size_t>(worker_id)] = std::current_exception();
      }
    };
    if (worker_count == 1) {
      worker(0);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(worker_count));
      for (int w = 0; w < worker_count; ++w) pool.emplace_back(worker, w);
      for (std::thread& t : pool) t.join();
    }
    for (const std::exception_ptr& failure : failures) {
      if (failure) std::rethrow_exception(failure);
    }

    interpolants[static_cast<std::size_t>(k)] = fit_interpolant(domain, m, nodal_q);
    for (NodalRecord& record : records) {
      result.oracle_calls_total += record.oracle_calls;
      result.nodal_records.push_back(std::move(record));
    }
  }

  // Final amplitude at the pricing date (one virtual node at S_0).
  const double bound_1 = cfg.value_bound_at(1);
  const QAEConfig& schedule_0 = cfg.schedule_at(0);
  std::mt19937_64 rng0 = substream(seed, 0, 0);
  result.p0_true = nodal_probability(kernel, 0, kernel.model().spot, extended_value(1),
                                     bound_1);
  result.p0_estimate = cfg.exact_probabilities
                           ? result.p0_true
                           : run_median_qae(result.p0_true, schedule_0, rng0).value;
  result.value = (2.0 * result.p0_estimate - 1.0) * bound_1;
  result.oracle_calls_total += static_cast<long long>(schedule_0.n_qae) * schedule_0.n_rep;

  for (int k = 1; k <= k_dates - 1; ++k) {
    result.continuations.push_back(*interpolants[static_cast<std::size_t>(k)]);
  }

  if (result.oracle_calls_total != count_oracle_calls(cfg)) {
    throw std::logic_error("backward_induce: oracle-call ledger mismatch");
  }
  return result;
}

ScheduleSelection select_parameters(double eps,
                                    std::span<const AnalyticityParams> analyticity,
                                    int d, int num_dates,
                                    std::span<const double> value_bounds) {
  if (!(eps > 0.0 && eps < 0.1)) {
    throw std::domain_error("select_parameters: eps must be in (0, 0.1)");
  }
  require(d >= 1, "select_parameters: dimension must be >= 1");
  require(num_dates >= 1, "select_parameters: need at least one date");
  require(static_cast<int>(analyticity.size()) == num_dates - 1,
          "select_parameters: need (rho, B) per date 1..K-1");
  require(static_cast<int>(value_bounds.size()) == num_dates,
          "select_parameters: need a value bound per date 1..K");
  for (const AnalyticityParams& p : analyticity) {
    if (!(p.rho > 1.0)) throw std::domain_error("select_parameters: rho must be > 1");
    require(p.bound >= 0.0, "select_parameters: B must be >= 0");
  }
  for (double b : value_bounds) require(b > 0.0, "select_parameters: value bounds positive");

  ScheduleSelection out;
  const double vmax_1 = value_bounds[0];

  // Degrees from the sequential thresholds: the k-th threshold includes the
  // running Lebesgue product of the degrees already chosen.
  double lebesgue_product = 1.0;           // Ltilde_{1,k-1}
  std::vector<double> lebesgue_partial;    // Ltilde_{1,k}, k = 1..K-1
  for (int k = 1; k <= num_dates - 1; ++k) {
    const AnalyticityParams& p = analyticity[static_cast<std::size_t>(k - 1)];
    const double arg = std::pow(2.0, 0.5 * d + 2.0) * std::sqrt(static_cast<double>(d)) *
                       static_cast<double>(num_dates - 1) *
                       std::pow(1.0 - 1.0 / (p.rho * p.rho), -0.5 * d) * p.bound *
                       lebesgue_product / (eps * vmax_1);
    int m = 1;
    if (arg > 1.0) {
      m = std::max(1, static_cast<int>(std::ceil(std::log(arg) / std::log(p.rho))));
    }
    out.degrees.push_back(m);
    lebesgue_product *= lebesgue_bound(d, m);
    lebesgue_partial.push_back(lebesgue_product);
  }

  double denom = 1.0;
  for (int k = 1; k <= num_dates - 1; ++k) {
    const double nodes =
        std::pow(static_cast<double>(out.degrees[static_cast<std::size_t>(k - 1)] + 1), d);
    denom += std::sqrt(nodes * lebesgue_partial[static_cast<std::size_t>(k - 1)]);
  }

  out.eps_bar.push_back(eps / 4.0 / denom);
  for (int k = 1; k <= num_dates - 1; ++k) {
    const double nodes =
        std::pow(static_cast<double>(out.degrees[static_cast<std::size_t>(k - 1)] + 1), d);
    const double vmax_k = value_bounds[static_cast<std::size_t>(k - 1)];
    out.eps_bar.push_back(std::sqrt(nodes / lebesgue_partial[static_cast<std::size_t>(k - 1)]) /
                          denom * vmax_1 * eps / (4.0 * vmax_k));
  }

  out.n_est = 1;
  for (int m : out.degrees) out.n_est += pow_ll(m + 1, d);
  const int n_rep =
      12 * static_cast<int>(std::ceil(std::log(static_cast<double>(out.n_est) / 0.01))) + 1;

  for (double eb : out.eps_bar) {
    const int n_qae = static_cast<int>(std::ceil(7.0 / eb));
    out.schedules.push_back(QAEConfig{n_qae, n_rep});
  }

  out.n_total = static_cast<long long>(out.schedules[0].n_qae) * n_rep;
  for (int k = 1; k <= num_dates - 1; ++k) {
    out.n_total += pow_ll(out.degrees[static_cast<std::size_t>(k - 1)] + 1, d) *
                   static_cast<long long>(out.schedules[static_cast<std::size_t>(k)].n_qae) *
                   n_rep;
  }
  return out;
}

PricerConfig make_pricer_config(const ScheduleSelection& selection,
                                std::vector<HyperRectangle> domains,
                                std::vector<double> value_bounds) {
  PricerConfig cfg;
  cfg.degrees = selection.degrees;
  cfg.schedules = selection.schedules;
  cfg.value_bounds = std::move(value_bounds);
  const int num_dates = static_cast<int>(selection.schedules.size());
  cfg.boundary = BoundaryPolicy::flat_put(std::move(domains), num_dates);
  return cfg;
}

long long count_oracle_calls(const PricerConfig& cfg) {
  const int k_dates = cfg.num_dates();
  const QAEConfig& schedule_0 = cfg.schedule_at(0);
  long long total = static_cast<long long>(schedule_0.n_qae) * schedule_0.n_rep;
  const int d = cfg.boundary.domains.empty() ? 1 : cfg.boundary.domains[0].dim();
  for (int k = 1; k <= k_dates - 1; ++k) {
    const QAEConfig& schedule = cfg.schedule_at(k);
    total += pow_ll(cfg.degree_at(k) + 1, d) *
             static_cast<long long>(schedule.n_qae) * schedule.n_rep;
  }
  return total;
}

namespace {

void validate_bound_inputs(const BoundInputs& inputs, std::span<const int> degrees,
                           int d, int num_dates) {
  if (d < 1 || num_dates < 1) throw std::invalid_argument("bounds: bad dimensions");
  require(static_cast<int>(degrees.size()) == num_dates - 1,
          "bounds: need one degree per date 1..K-1");
  require(static_cast<int>(inputs.analyticity.size()) == num_dates - 1,
          "bounds: need (rho, B) per date 1..K-1");
  require(static_cast<int>(inputs.eps_boundary.size()) == num_dates - 1,
          "bounds: need eps^OB per date 1..K-1");
  require(static_cast<int>(inputs.eps_qae.size()) == num_dates,
          "bounds: need eps^QAE per date 0..K-1");
  for (const AnalyticityParams& p : inputs.analyticity) {
    if (!(p.rho > 1.0)) throw std::domain_error("bounds: rho must be > 1");
  }
  for (double e : inputs.eps_boundary) require(e >= 0.0, "bounds: eps^OB must be >= 0");
  for (double e : inputs.eps_qae) require(e >= 0.0, "bounds: eps^QAE must be >= 0");
}

}  // namespace

double error_bound_thm3(const BoundInputs& inputs, std::span<const int> degrees, int d,
                        int num_dates) {
  validate_bound_inputs(inputs, degrees, d, num_dates);
  double total = inputs.eps_qae[0];  // Ltilde_{1,0} = 1
  double running = 1.0;              // Ltilde_{1,k-1} entering date k
  for (int k = 1; k <= num_dates - 1; ++k) {
    const int m = degrees[static_cast<std::size_t>(k - 1)];
    const double eps_int =
        interpolation_error_bound(inputs.analyticity[static_cast<std::size_t>(k - 1)], d, m);
    total += running * (eps_int + inputs.eps_boundary[static_cast<std::size_t>(k - 1)]);
    running *= lebesgue_bound(d, m);  // now Ltilde_{1,k}
    total += running * inputs.eps_qae[static_cast<std::size_t>(k)];
  }
  return total;
}

double error_bound_thm4(const BoundInputs& inputs, std::span<const int> degrees, int d,
                        int num_dates) {
  validate_bound_inputs(inputs, degrees, d, num_dates);
  double total = inputs.eps_qae[0];  // Lambda_0 := 1
  for (int k = 1; k <= num_dates - 1; ++k) {
    const int m = degrees[static_cast<std::size_t>(k - 1)];
    const double eps_int =
        interpolation_error_bound(inputs.analyticity[static_cast<std::size_t>(k - 1)], d, m);
    total += eps_int + inputs.eps_boundary[static_cast<std::size_t>(k - 1)];
    total += lebesgue_bound(d, m) * inputs.eps_qae[static_cast<std::size_t>(k)];
  }
  return total;
}

}  // namespace chebqae
