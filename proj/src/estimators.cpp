#include "dphide/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

#include "dphide/errors.hpp"
#include "dphide/optimize.hpp"

namespace dphide {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr int kScanPoints = 41;
constexpr double kTieWindow = 1e-9;

void require_finite(std::span<const double> sample, std::size_t min_size,
                    const char* what) {
  if (sample.size() < min_size) {
    throw InputError(std::string(what) + ": sample too small");
  }
  for (double x : sample) {
    if (!std::isfinite(x)) {
      throw InputError(std::string(what) + ": sample contains a non-finite value");
    }
  }
}

double mean_of(std::span<const double> sample) {
  return std::accumulate(sample.begin(), sample.end(), 0.0) /
         static_cast<double>(sample.size());
}

// Best grid point of f over [lower, upper]; near-ties go to the point
// closest to `anchor`.
double scan_grid(const std::function<double(double)>& f, double lower,
                 double upper, double anchor) {
  const double step = (upper - lower) / (kScanPoints - 1);
  double best_x = anchor;
  double best_f = f(anchor);
  for (int i = 0; i < kScanPoints; ++i) {
    const double x = lower + step * i;
    const double fx = f(x);
    if (!(fx > kNegInf)) continue;
    if (fx > best_f + kTieWindow) {
      best_x = x;
      best_f = fx;
    } else if (std::abs(fx - best_f) <= kTieWindow &&
               std::abs(x - anchor) < std::abs(best_x - anchor)) {
      best_x = x;
      best_f = std::max(fx, best_f);
    }
  }
  return best_x;
}

}  // namespace

void EscortSpec::validate() const {
  if (location_rule == LocationRule::fixed && !std::isfinite(location_value)) {
    throw InputError("fixed escort location must be finite");
  }
  if (scale_rule == ScaleRule::fixed &&
      !(scale_value > 0.0 && std::isfinite(scale_value))) {
    throw InputError("fixed escort scale must be positive and finite");
  }
}

double resolve_escort_location(const EscortSpec& spec,
                               std::span<const double> sample) {
  spec.validate();
  switch (spec.location_rule) {
    case LocationRule::sample_mean:
      require_finite(sample, 1, "escort");
      return mean_of(sample);
    case LocationRule::sample_median:
      return median(sample);
    case LocationRule::fixed:
      return spec.location_value;
  }
  throw InputError("unknown escort location rule");
}

NormalLocScale resolve_escort(const EscortSpec& spec,
                              std::span<const double> sample) {
  const double theta = resolve_escort_location(spec, sample);
  double sigma = 0.0;
  switch (spec.scale_rule) {
    case ScaleRule::sample_sd: {
      const auto fit = mle_normal(sample);
      if (!fit.sd) throw InputError("escort: sd needs at least two observations");
      sigma = *fit.sd;
      break;
    }
    case ScaleRule::normal_consistent_mad:
      sigma = mad(sample, true);
      break;
    case ScaleRule::fixed:
      sigma = spec.scale_value;
      break;
  }
  if (!(sigma > 0.0)) {
    throw InputError("escort: scale estimate is zero (degenerate sample)");
  }
  return {theta, sigma};
}

EstimateResult dphide_location_at(std::span<const double> sample,
                                  PowerIndex gamma, double escort_theta,
                                  const EstimatorOptions& options) {
  require_finite(sample, 1, "dphide_location");
  if (!std::isfinite(escort_theta)) {
    throw InputError("dphide_location: escort must be finite");
  }
  auto objective = [&](double alpha) {
    return criterion_location(escort_theta, alpha, gamma, sample, options.kl_form);
  };
  auto slope = [&](double alpha) {
    return estimating_equation_location(escort_theta, alpha, gamma, sample,
                                        options.kl_form);
  };

  const double width = options.bracket_half_width;
  double lower = escort_theta - width;
  double upper = escort_theta + width;
  double start = escort_theta;
  if (options.global_scan) {
    start = scan_grid(objective, lower, upper, escort_theta);
    const double step = 2.0 * width / (kScanPoints - 1);
    lower = std::max(lower, start - step);
    upper = std::min(upper, start + step);
  }

  ScalarMaxOptions brent;
  brent.x_tolerance = options.tolerance;
  brent.max_iterations = options.max_iterations;
  ScalarMaxResult best = maximize_brent(objective, lower, upper, start, brent);
  best = polish_stationary_point(objective, slope, best, lower, upper);

  return {best.argmax,          std::nullopt,  best.value,
          best.iterations,      best.converged, NormalLocScale(escort_theta, 1.0)};
}

EstimateResult dphide_location(std::span<const double> sample, PowerIndex gamma,
                               const EscortSpec& escort,
                               const EstimatorOptions& options) {
  require_finite(sample, 1, "dphide_location");
  return dphide_location_at(sample, gamma, resolve_escort_location(escort, sample),
                            options);
}

EstimateResult dphide_loc_scale(std::span<const double> sample, PowerIndex gamma,
                                const EscortSpec& escort,
                                const EstimatorOptions& options) {
  require_finite(sample, 2, "dphide_loc_scale");
  const NormalLocScale esc = resolve_escort(escort, sample);

  auto objective = [&](const std::vector<double>& p) {
    const double sigma = std::exp(p[1]);
    if (!std::isfinite(p[0]) || !(sigma > 0.0) || !std::isfinite(sigma)) {
      return kNegInf;
    }
    return criterion_loc_scale(esc, NormalLocScale(p[0], sigma), gamma, sample,
                               options.kl_form)
        .value;
  };

  std::vector<double> start{esc.theta(), std::log(esc.sigma())};
  if (options.global_scan) {
    const double width = options.bracket_half_width * esc.sigma();
    start[0] = scan_grid(
        [&](double a) { return objective({a, start[1]}); }, esc.theta() - width,
        esc.theta() + width, esc.theta());
  }

  SimplexOptions simplex;
  simplex.f_tolerance = options.tolerance;
  simplex.max_iterations = 10 * options.max_iterations;
  const auto fit = maximize_nelder_mead(objective, start, {0.5 * esc.sigma(), 0.25},
                                        simplex);
  if (!(fit.value > kNegInf)) {
    throw InputError("dphide_loc_scale: no feasible candidate found");
  }
  return {fit.argmax[0], std::exp(fit.argmax[1]), fit.value,
          fit.iterations, fit.converged,           esc};
}

std::vector<ScanPoint> criterion_scan(std::span<const double> sample,
                                      const std::vector<double>& gammas,
                                      double escort_theta,
                                      const std::vector<double>& alphas,
                                      KlForm kl_form) {
  require_finite(sample, 1, "criterion_scan");
  std::vector<ScanPoint> out;
  out.reserve(gammas.size() * alphas.size());
  for (double g : gammas) {
    const PowerIndex index(g);
    for (double a : alphas) {
      out.push_back({g, a, criterion_location(escort_theta, a, index, sample, kl_form)});
    }
  }
  return out;
}

NormalMle mle_normal(std::span<const double> sample) {
  require_finite(sample, 1, "mle_normal");
  const double mean = mean_of(sample);
  if (sample.size() < 2) return {mean, std::nullopt};
  double ss = 0.0;
  for (double x : sample) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(sample.size()))};
}

double median(std::span<const double> sample) {
  require_finite(sample, 1, "median");
  std::vector<double> v(sample.begin(), sample.end());
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

double mad(std::span<const double> sample, bool consistent) {
  const double center = median(sample);
  std::vector<double> dev(sample.size());
  std::transform(sample.begin(), sample.end(), dev.begin(),
                 [center](double x) { return std::abs(x - center); });
  const double raw = median(dev);
  return consistent ? kMadConsistency * raw : raw;
}

double huber_location(std::span<const double> sample, double tau, double scale) {
  require_finite(sample, 1, "huber_location");
  if (!(tau > 0.0) || !(scale > 0.0)) {
    throw InputError("huber_location: tau and scale must be positive");
  }
  // sum psi((x - mu)/scale) is nonincreasing in mu, >= 0 at min and <= 0 at max.
  auto score = [&](double mu) {
    double acc = 0.0;
    for (double x : sample) acc += std::clamp((x - mu) / scale, -tau, tau);
    return acc;
  };
  auto [lo_it, hi_it] = std::minmax_element(sample.begin(), sample.end());
  double lo = *lo_it;
  double hi = *hi_it;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (score(mid) > 0.0) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

HuberIrlsResult huber_location_irls(std::span<const double> sample, double tau,
                                    const HuberIrlsOptions& options) {
  require_finite(sample, 2, "huber_location_irls");
  if (!(tau > 0.0) || !(options.scale_tuning > 0.0)) {
    throw InputError("huber_location_irls: tuning constants must be positive");
  }
  const std::size_t n = sample.size();
  const double c = options.scale_tuning;
  const double inside = std::erf(c / std::numbers::sqrt2);  // P(|Z| < c)
  const double density = std::exp(-0.5 * c * c) / std::sqrt(2.0 * std::numbers::pi);
  // E min(Z^2, c^2) for Z ~ N(0, 1)
  const double beta = inside + c * c * (1.0 - inside) - 2.0 * c * density;
  const double denom = static_cast<double>(n - 1) * beta;

  double mu = mean_of(sample);
  std::vector<double> resid(n);
  std::vector<double> abs_resid(n);
  for (std::size_t i = 0; i < n; ++i) {
    resid[i] = sample[i] - mu;
    abs_resid[i] = std::abs(resid[i]);
  }
  double scale = kMadConsistency * median(abs_resid);

  std::vector<double> previous(n);
  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    previous = resid;
    const double cap = (c * scale) * (c * scale);
    double ss = 0.0;
    for (double r : resid) ss += std::min(r * r, cap);
    scale = std::sqrt(ss / denom);
    if (!(scale > 0.0)) {
      return {mu, 0.0, iter, true};
    }
    double wsum = 0.0;
    double wx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double u = std::abs(resid[i]) / scale;
      const double w = u > tau ? tau / u : 1.0;
      wsum += w;
      wx += w * sample[i];
    }
    mu = wx / wsum;
    double change = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      resid[i] = sample[i] - mu;
      change += (previous[i] - resid[i]) * (previous[i] - resid[i]);
      norm += previous[i] * previous[i];
    }
    if (std::sqrt(change / std::max(1e-20, norm)) <= options.tolerance) {
      return {mu, scale, iter, true};
    }
  }
  return {mu, scale, options.max_iterations, false};
}

}  // namespace dphide
