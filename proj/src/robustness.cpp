#include "dphide/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#include "dphide/errors.hpp"
#include "dphide/normal_model.hpp"
#include "dphide/optimize.hpp"
#include "dphide/rng.hpp"

namespace dphide {

double influence_location(const IfQuery& q) {
  if (!std::isfinite(q.x) || !std::isfinite(q.escort_theta) ||
      !std::isfinite(q.true_theta0)) {
    throw InputError("influence_location: inputs must be finite");
  }
  const double g = q.gamma.value();
  const double d = q.escort_theta - q.true_theta0;
  if (q.gamma.is_modified_kl() || d == 0.0) return q.x - q.true_theta0;
  // Both terms divided by exp(gamma (gamma - 1) d^2 / 2).
  const double tilt = -0.5 * g * d * (q.escort_theta + q.true_theta0 - 2.0 * q.x);
  const double shift = q.gamma.is_kl() ? 0.0 : 0.5 * g * (g - 1.0) * d * d;
  const double gg = q.gamma.is_kl() ? 1.0 : g;
  return ((q.x - q.true_theta0) * std::exp(tilt - shift) - gg * d) /
         (1.0 + gg * gg * d * d);
}

double population_functional(PowerIndex gamma, double escort_theta, double theta0,
                             double x, double epsilon, KlForm kl_form) {
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw DomainError("population_functional: epsilon must lie in [0, 1)");
  }
  auto objective = [&](double alpha) {
    double atom = 0.0;
    if (epsilon > 0.0) {
      const double xs[1] = {x};
      atom = criterion_location(escort_theta, alpha, gamma, xs, kl_form);
    }
    return (1.0 - epsilon) *
               expected_criterion_location(escort_theta, alpha, gamma, theta0, kl_form) +
           epsilon * atom;
  };
  // Five-point stencil derivative; the objective is smooth in alpha.
  auto slope = [&](double alpha) {
    const double h = 1e-4;
    return (-objective(alpha + 2 * h) + 8 * objective(alpha + h) -
            8 * objective(alpha - h) + objective(alpha - 2 * h)) /
           (12 * h);
  };

  const double lower = theta0 - 10.0;
  const double upper = theta0 + 10.0;
  ScalarMaxOptions options;
  options.x_tolerance = 1e-10;
  options.max_iterations = 500;
  auto best = maximize_brent(objective, lower, upper, theta0, options);
  best = polish_stationary_point(objective, slope, best, lower, upper);
  if (!best.converged || !std::isfinite(best.argmax)) {
    throw ConvergenceError("population_functional: optimizer did not converge");
  }
  return best.argmax;
}

double population_eps_if(PowerIndex gamma, double escort_theta, double theta0,
                         double x, double epsilon, KlForm kl_form) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw DomainError("population_eps_if: epsilon must lie in (0, 0.5)");
  }
  const double t = population_functional(gamma, escort_theta, theta0, x, epsilon, kl_form);
  return (t - theta0) / epsilon;
}

double population_if_extrapolated(PowerIndex gamma, double escort_theta, double theta0,
                                  double x, double epsilon, KlForm kl_form) {
  const double q1 = population_eps_if(gamma, escort_theta, theta0, x, epsilon, kl_form);
  const double q2 = population_eps_if(gamma, escort_theta, theta0, x, epsilon / 2, kl_form);
  const double q4 = population_eps_if(gamma, escort_theta, theta0, x, epsilon / 4, kl_form);
  const double r1 = 2.0 * q2 - q1;
  const double r2 = 2.0 * q4 - q2;
  return (4.0 * r2 - r1) / 3.0;
}

std::vector<double> log_spaced_grid(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi) || count < 2) {
    throw InputError("log_spaced_grid: need 0 < lo < hi and count >= 2");
  }
  std::vector<double> grid(static_cast<std::size_t>(count));
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / (count - 1);
  for (int i = 0; i < count; ++i) grid[i] = std::exp(a + step * i);
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

int EpsIfProtocol::replaced() const {
  return static_cast<int>(std::floor(epsilon * n + 1e-9));
}

void EpsIfProtocol::validate() const {
  if (n < 2) throw InputError("eps-if: n must be at least 2");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw InputError("eps-if: epsilon must lie in (0, 1)");
  if (replaced() < 1) throw InputError("eps-if: floor(eps * n) must be at least 1");
  if (replaced() >= n) throw InputError("eps-if: floor(eps * n) must be below n");
  if (!std::isfinite(theta0)) throw InputError("eps-if: theta0 must be finite");
  if (grid.empty()) throw InputError("eps-if: grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) throw InputError("eps-if: grid values must be finite");
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw InputError("eps-if: grid must be strictly increasing");
    }
  }
  if (replications < 1) throw InputError("eps-if: replications must be at least 1");
  if (gamma_list.empty()) throw InputError("eps-if: gamma list is empty");
  for (double g : gamma_list) {
    if (!std::isfinite(g)) throw InputError("eps-if: gamma values must be finite");
  }
  if (escort == LocationRule::fixed) {
    throw InputError("eps-if: escort must be the sample mean or median");
  }
}

namespace {

// Estimates of one replication, laid out [grid][gamma]; NaN = not converged.
std::vector<double> replication_estimates(const EpsIfProtocol& p, int replication) {
  Engine engine = substream(p.seed, {key_of(p.epsilon), static_cast<std::uint64_t>(p.n),
                                     static_cast<std::uint64_t>(replication)});
  std::normal_distribution<double> normal(p.theta0, 1.0);
  std::vector<double> base(static_cast<std::size_t>(p.n));
  for (double& v : base) v = normal(engine);
  std::stable_sort(base.begin(), base.end());

  const std::size_t keep = base.size() - static_cast<std::size_t>(p.replaced());
  const EscortSpec escort{p.escort, 0.0, ScaleRule::fixed, 1.0};
  std::vector<double> out;
  out.reserve(p.grid.size() * p.gamma_list.size());
  std::vector<double> sample = base;
  for (double g : p.grid) {
    std::fill(sample.begin() + static_cast<std::ptrdiff_t>(keep), sample.end(), g);
    const double theta = resolve_escort_location(escort, sample);
    for (double gamma : p.gamma_list) {
      const auto fit = dphide_location_at(sample, PowerIndex(gamma), theta, p.estimator);
      out.push_back(fit.converged ? fit.alpha_hat : std::nan(""));
    }
  }
  return out;
}

// estimates layout: [replication][grid][gamma]
std::vector<EpsIfPoint> average(const EpsIfProtocol& p, const std::vector<double>& est) {
  const std::size_t n_grid = p.grid.size();
  const std::size_t n_gamma = p.gamma_list.size();
  const std::size_t per_rep = n_grid * n_gamma;
  std::vector<EpsIfPoint> rows;
  rows.reserve(per_rep);
  for (std::size_t k = 0; k < n_gamma; ++k) {
    for (std::size_t j = 0; j < n_grid; ++j) {
      double sum = 0.0;
      double sum_sq = 0.0;
      int used = 0;
      for (int r = 0; r < p.replications; ++r) {
        const double v = est[static_cast<std::size_t>(r) * per_rep + j * n_gamma + k];
        if (std::isnan(v)) continue;
        sum += v;
        sum_sq += v * v;
        ++used;
      }
      EpsIfPoint row{p.gamma_list[k], p.grid[j], std::nan(""), std::nan(""),
                     p.replications - used};
      if (used > 0) {
        row.mean_estimate = sum / used;
        row.mc_se = used > 1 ? std::sqrt(std::max(0.0, (sum_sq - used * row.mean_estimate *
                                                                    row.mean_estimate) /
                                                           (used - 1)) /
                                         used)
                             : 0.0;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace

std::vector<EpsIfPoint> empirical_eps_if(const EpsIfProtocol& protocol) {
  protocol.validate();
  const std::size_t per_rep = protocol.grid.size() * protocol.gamma_list.size();
  std::vector<double> est(per_rep * static_cast<std::size_t>(protocol.replications));
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic, 4)
  for (int r = 0; r < protocol.replications; ++r) {
    try {
      const auto row = replication_estimates(protocol, r);
      std::copy(row.begin(), row.end(),
                est.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(r) * per_rep));
    } catch (...) {
#pragma omp critical(dphide_eps_if_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return average(protocol, est);
}

namespace reference {

std::vector<EpsIfPoint> empirical_eps_if(const EpsIfProtocol& protocol) {
  protocol.validate();
  std::vector<double> est;
  for (int r = 0; r < protocol.replications; ++r) {
    const auto row = replication_estimates(protocol, r);
    est.insert(est.end(), row.begin(), row.end());
  }
  return average(protocol, est);
}

}  // namespace reference

}  // namespace dphide
