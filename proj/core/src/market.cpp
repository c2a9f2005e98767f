// SPDX-License-Identifier: MIT
#include "chebqae/market.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "chebqae/random.hpp"

namespace chebqae {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

void validate_model(const GBMModel& model) {
  const int d = model.dim();
  require(d >= 1, "GBMModel: at least one asset required");
  require(static_cast<int>(model.vols.size()) == d, "GBMModel: vols size mismatch");
  require(static_cast<int>(model.correlation.size()) == d,
          "GBMModel: correlation must be d x d");
  for (int i = 0; i < d; ++i) {
    require(model.spot[static_cast<std::size_t>(i)] > 0.0, "GBMModel: spot must be positive");
    require(model.vols[static_cast<std::size_t>(i)] > 0.0, "GBMModel: vols must be positive");
    require(static_cast<int>(model.correlation[static_cast<std::size_t>(i)].size()) == d,
            "GBMModel: correlation must be d x d");
    const double diag = model.correlation[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)];
    require(std::abs(diag - 1.0) < 1e-12, "GBMModel: correlation diagonal must be 1");
    for (int j = 0; j < d; ++j) {
      const double a = model.correlation[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      const double b = model.correlation[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
      require(std::abs(a - b) < 1e-12, "GBMModel: correlation must be symmetric");
    }
  }
  require(model.num_dates() >= 1, "GBMModel: at least one exercise date required");
  double prev = 0.0;
  for (double t : model.exercise_times) {
    require(t > prev, "GBMModel: exercise times must be strictly increasing and positive");
    prev = t;
  }
}

}  // namespace

double Payoff::operator()(std::span<const double> s) const {
  double total = 0.0;
  for (double v : s) total += v;
  return std::max(strike - total, 0.0);
}

std::vector<double> discretize_normal(int n_z) {
  if (n_z < 2) throw std::invalid_argument("discretize_normal: N_z must be >= 2");
  const boost::math::normal_distribution<double> normal{};
  std::vector<double> z(static_cast<std::size_t>(n_z));
  for (int i = 0; i < n_z; ++i) {
    z[static_cast<std::size_t>(i)] = boost::math::quantile(normal, (i + 0.5) / n_z);
  }
  // Force exact symmetry about 0 so the mean vanishes to rounding.
  for (int i = 0; i < n_z / 2; ++i) {
    const double v = 0.5 * (z[static_cast<std::size_t>(n_z - 1 - i)] - z[static_cast<std::size_t>(i)]);
    z[static_cast<std::size_t>(i)] = -v;
    z[static_cast<std::size_t>(n_z - 1 - i)] = v;
  }
  if (n_z % 2 == 1) z[static_cast<std::size_t>(n_z / 2)] = 0.0;
  return z;
}

TransitionKernel::TransitionKernel(GBMModel model, int n_z)
    : model_(std::move(model)), n_z_(n_z) {
  validate_model(model_);
  const int d = model_.dim();
  z_ = discretize_normal(n_z_);

  Eigen::MatrixXd corr(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      corr(i, j) = model_.correlation[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(corr);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("TransitionKernel: correlation matrix is not positive-definite");
  }
  const Eigen::MatrixXd lower = llt.matrixL();
  chol_.assign(static_cast<std::size_t>(d) * static_cast<std::size_t>(d), 0.0);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) {
      chol_[static_cast<std::size_t>(i) * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] =
          lower(i, j);
    }
  }

  branch_count_ = 1;
  branch_probability_ = 1.0;
  for (int i = 0; i < d; ++i) {
    branch_count_ *= static_cast<std::size_t>(n_z_);
    branch_probability_ /= static_cast<double>(n_z_);
  }
}

double TransitionKernel::dt(int k) const {
  if (k < 0 || k >= num_dates()) {
    std::ostringstream msg;
    msg << "TransitionKernel: step index k=" << k << " out of [0, " << num_dates() - 1 << "]";
    throw std::out_of_range(msg.str());
  }
  const double prev = (k == 0) ? 0.0 : model_.exercise_times[static_cast<std::size_t>(k - 1)];
  return model_.exercise_times[static_cast<std::size_t>(k)] - prev;
}

std::vector<double> TransitionKernel::target(int k, std::span<const double> source,
                                             std::size_t branch) const {
  const int d = dim();
  require(static_cast<int>(source.size()) == d, "TransitionKernel: source dimension mismatch");
  if (branch >= branch_count_) {
    throw std::out_of_range("TransitionKernel: branch index out of range");
  }
  const double step = dt(k);
  const double sqrt_dt = std::sqrt(step);

  // Decode the branch into per-dimension z indices (last dimension fastest).
  std::vector<double> z(static_cast<std::size_t>(d));
  std::size_t rest = branch;
  for (int i = d - 1; i >= 0; --i) {
    z[static_cast<std::size_t>(i)] = z_[rest % static_cast<std::size_t>(n_z_)];
    rest /= static_cast<std::size_t>(n_z_);
  }

  std::vector<double> out(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    double lz = 0.0;
    for (int j = 0; j <= i; ++j) {
      lz += chol_[static_cast<std::size_t>(i) * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] *
            z[static_cast<std::size_t>(j)];
    }
    const double sigma = model_.vols[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] =
        source[static_cast<std::size_t>(i)] *
        std::exp(-0.5 * sigma * sigma * step + sigma * sqrt_dt * lz);
  }
  return out;
}

std::vector<double> TransitionKernel::sample_step(int k, std::span<const double> source,
                                                  std::mt19937_64& rng) const {
  const int d = dim();
  std::size_t branch = 0;
  for (int i = 0; i < d; ++i) {
    branch = branch * static_cast<std::size_t>(n_z_) +
             uniform_below(rng, static_cast<std::uint64_t>(n_z_));
  }
  return target(k, source, branch);
}

double conditional_expectation(
    const TransitionKernel& kernel, int k,
    const std::function<double(std::span<const double>)>& g,
    std::span<const double> source) {
  double total = 0.0;
  for (std::size_t b = 0; b < kernel.branch_count(); ++b) {
    total += g(kernel.target(k, source, b));
  }
  return total * kernel.branch_probability();
}

std::vector<std::vector<double>> sample_path(const TransitionKernel& kernel,
                                             std::mt19937_64& rng) {
  std::vector<std::vector<double>> path;
  path.reserve(static_cast<std::size_t>(kernel.num_dates()) + 1);
  path.push_back(kernel.model().spot);
  for (int k = 0; k < kernel.num_dates(); ++k) {
    path.push_back(kernel.sample_step(k, path.back(), rng));
  }
  return path;
}

BoundaryPolicy BoundaryPolicy::flat_put(std::vector<HyperRectangle> domains,
                                        int num_dates) {
  require(static_cast<int>(domains.size()) == num_dates - 1,
          "BoundaryPolicy: need one domain per date 1..K-1");
  BoundaryPolicy policy;
  policy.domains = std::move(domains);
  policy.num_dates = num_dates;
  policy.is_outer = [doms = policy.domains](int k, std::span<const double> s) {
    const HyperRectangle& box = doms[static_cast<std::size_t>(k - 1)];
    for (int i = 0; i < box.dim(); ++i) {
      if (s[static_cast<std::size_t>(i)] > box.upper(i)) return true;
    }
    return false;
  };
  policy.outer_value = [](int, std::span<const double>) { return 0.0; };
  return policy;
}

const HyperRectangle& BoundaryPolicy::domain(int k) const {
  if (k < 1 || k > static_cast<int>(domains.size())) {
    std::ostringstream msg;
    msg << "BoundaryPolicy: no domain for date k=" << k;
    throw std::out_of_range(msg.str());
  }
  return domains[static_cast<std::size_t>(k - 1)];
}

double extend_value(const BoundaryPolicy& policy, int k,
                    const std::function<double(std::span<const double>)>& inner,
                    std::span<const double> s) {
  if (k == policy.num_dates) return inner(s);  // G_K is the identity
  const HyperRectangle& box = policy.domain(k);
  if (box.contains(s)) return inner(s);
  if (policy.is_outer && policy.is_outer(k, s)) return policy.outer_value(k, s);
  return inner(box.clamp(s));
}

std::vector<HyperRectangle> default_domains(const GBMModel& model, double width_sigmas) {
  require(width_sigmas > 0.0, "default_domains: width must be positive");
  std::vector<HyperRectangle> domains;
  const int d = model.dim();
  for (int k = 1; k < model.num_dates(); ++k) {
    const double t = model.exercise_times[static_cast<std::size_t>(k - 1)];
    std::vector<double> lo(static_cast<std::size_t>(d)), hi(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
      const double s0 = model.spot[static_cast<std::size_t>(i)];
      const double width = width_sigmas * model.vols[static_cast<std::size_t>(i)] * std::sqrt(t);
      lo[static_cast<std::size_t>(i)] = s0 * std::exp(-width);
      hi[static_cast<std::size_t>(i)] = s0 * std::exp(width);
    }
    domains.emplace_back(std::move(lo), std::move(hi));
  }
  return domains;
}

}  // namespace chebqae
