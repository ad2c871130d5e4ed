#include "dphide/normal_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "dphide/errors.hpp"

namespace dphide {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPosInf = std::numeric_limits<double>::infinity();

void require_nonempty(std::span<const double> sample) {
  if (sample.empty()) {
    throw InputError("criterion requires a nonempty sample");
  }
}

// Domain constant gamma s~^2 - (gamma - 1) s^2 of the Gaussian ratio integral.
double ratio_denominator(const NormalLocScale& escort,
                         const NormalLocScale& candidate, double g) {
  const double s2 = escort.sigma() * escort.sigma();
  const double t2 = candidate.sigma() * candidate.sigma();
  return g * t2 - (g - 1.0) * s2;
}

// Log of \int (p_escort/p_candidate)^(gamma-1) dP_escort; the constraint has
// already been checked.
double log_ratio_moment(const NormalLocScale& escort,
                        const NormalLocScale& candidate, double g,
                        double denom) {
  const double d = escort.theta() - candidate.theta();
  return g * std::log(candidate.sigma()) -
         (g - 1.0) * std::log(escort.sigma()) - 0.5 * std::log(denom) +
         g * (g - 1.0) * d * d / (2.0 * denom);
}

double kl_divergence(const NormalLocScale& escort,
                     const NormalLocScale& candidate) {
  const double d = escort.theta() - candidate.theta();
  const double t2 = candidate.sigma() * candidate.sigma();
  return std::log(candidate.sigma() / escort.sigma()) +
         (escort.sigma() * escort.sigma() + d * d) / (2.0 * t2) - 0.5;
}

double legacy_kl_bracket(const NormalLocScale& escort,
                         const NormalLocScale& candidate) {
  const double ratio = candidate.sigma() / escort.sigma();
  const double z = (escort.theta() - candidate.theta()) / candidate.sigma();
  return 0.5 * (1.0 - ratio * ratio - z * z) - std::log(ratio);
}

}  // namespace

NormalLocScale::NormalLocScale(double theta, double sigma)
    : theta_(theta), sigma_(sigma) {
  if (!std::isfinite(theta)) {
    throw DomainError("location must be finite");
  }
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw DomainError("scale must be positive and finite");
  }
}

void ContaminationModel::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw InputError("contamination fraction must lie in [0, 1]");
  }
  if (!std::isfinite(theta0) || !std::isfinite(outlier)) {
    throw InputError("contamination model parameters must be finite");
  }
}

double log_density(const NormalLocScale& params, double x) {
  const double z = (x - params.theta()) / params.sigma();
  return -std::log(params.sigma()) -
         0.5 * std::log(2.0 * std::numbers::pi) - 0.5 * z * z;
}

double gaussian_ratio_integral(const NormalLocScale& escort,
                               const NormalLocScale& candidate,
                               PowerIndex gamma) {
  if (!gamma.is_generic()) {
    throw DomainError("gaussian_ratio_integral is undefined for gamma in {0, 1}");
  }
  const double g = gamma.value();
  const double denom = ratio_denominator(escort, candidate, g);
  if (!(denom > 0.0)) {
    throw InfeasibleDomainError(
        "gamma * sigma_candidate^2 - (gamma - 1) * sigma_escort^2 must be positive");
  }
  const double log_moment = log_ratio_moment(escort, candidate, g, denom);
  if (log_moment > kExponentLimit) {
    return g > 1.0 ? kPosInf : kNegInf;
  }
  return std::exp(log_moment) / (g - 1.0);
}

double dual_integral_term(const NormalLocScale& escort,
                          const NormalLocScale& candidate, PowerIndex gamma) {
  if (gamma.is_modified_kl()) {
    // \int (1 - p_candidate / p_escort) dP_escort
    return 0.0;
  }
  if (gamma.is_kl()) {
    return kl_divergence(escort, candidate);
  }
  const double g = gamma.value();
  const double denom = ratio_denominator(escort, candidate, g);
  if (!(denom > 0.0)) {
    throw InfeasibleDomainError(
        "gamma * sigma_candidate^2 - (gamma - 1) * sigma_escort^2 must be positive");
  }
  const double log_moment = log_ratio_moment(escort, candidate, g, denom);
  if (log_moment > kExponentLimit) {
    return g > 1.0 ? kPosInf : kNegInf;
  }
  return std::expm1(log_moment) / (g - 1.0);
}

double h_point_normal(const NormalLocScale& escort,
                      const NormalLocScale& candidate, PowerIndex gamma,
                      double x) {
  return h_point(gamma, dual_integral_term(escort, candidate, gamma),
                 log_density(escort, x), log_density(candidate, x));
}

CriterionValue criterion_loc_scale(const NormalLocScale& escort,
                                   const NormalLocScale& candidate,
                                   PowerIndex gamma,
                                   std::span<const double> sample,
                                   KlForm kl_form) {
  require_nonempty(sample);
  const double n = static_cast<double>(sample.size());
  const double log_scale_ratio = std::log(candidate.sigma() / escort.sigma());

  // log r_i = log(s~/s) - (((X - theta)/s)^2 - ((X - alpha)/s~)^2) / 2
  auto log_ratio_at = [&](double x) {
    const double u = (x - escort.theta()) / escort.sigma();
    const double v = (x - candidate.theta()) / candidate.sigma();
    return log_scale_ratio - 0.5 * (u * u - v * v);
  };

  if (gamma.is_modified_kl()) {
    double acc = 0.0;
    for (double x : sample) acc += log_ratio_at(x);
    return {-acc / n, candidate, true};
  }

  if (gamma.is_kl()) {
    double acc = 0.0;
    for (double x : sample) {
      const double lr = log_ratio_at(x);
      if (lr > kExponentLimit) return {kNegInf, candidate, true};
      acc += std::expm1(lr);
    }
    // The +1 of the displayed criterion is absorbed into expm1.
    const double bracket = kl_form == KlForm::exact
                               ? kl_divergence(escort, candidate)
                               : legacy_kl_bracket(escort, candidate);
    return {bracket - acc / n, candidate, true};
  }

  const double g = gamma.value();
  const double denom = ratio_denominator(escort, candidate, g);
  if (!(denom > 0.0)) {
    return {kNegInf, candidate, false};
  }
  const double log_moment = log_ratio_moment(escort, candidate, g, denom);
  if (log_moment > kExponentLimit) {
    return {kNegInf, candidate, true};
  }
  double acc = 0.0;
  for (double x : sample) {
    const double e = g * log_ratio_at(x);
    if (e > kExponentLimit) return {kNegInf, candidate, true};
    acc += std::expm1(e);
  }
  // The constants 1/(g-1) - 1/g - 1/(g(g-1)) cancel exactly; expm1 keeps the
  // value accurate near the escort.
  return {std::expm1(log_moment) / (g - 1.0) - acc / (g * n), candidate, true};
}

double criterion_location(double escort_theta, double candidate_alpha,
                          PowerIndex gamma, std::span<const double> sample,
                          KlForm kl_form) {
  require_nonempty(sample);
  const double n = static_cast<double>(sample.size());
  const double d = escort_theta - candidate_alpha;
  const double s = escort_theta + candidate_alpha;

  if (gamma.is_modified_kl()) {
    double acc = 0.0;
    for (double x : sample) acc += d * (s - 2.0 * x);
    return acc / (2.0 * n);
  }

  const double g = gamma.is_kl() ? 1.0 : gamma.value();
  double acc = 0.0;
  for (double x : sample) {
    const double e = -0.5 * g * d * (s - 2.0 * x);
    if (e > kExponentLimit) return kNegInf;
    acc += std::expm1(e);
  }

  if (gamma.is_kl()) {
    const double quad = kl_form == KlForm::exact ? 0.5 * d * d : -0.5 * d * d;
    return quad - acc / n;
  }
  const double lead = 0.5 * g * (g - 1.0) * d * d;
  if (lead > kExponentLimit) return kNegInf;
  return std::expm1(lead) / (g - 1.0) - acc / (g * n);
}

double psi_location(double escort_theta, double candidate_alpha,
                    PowerIndex gamma, double x, KlForm kl_form) {
  if (gamma.is_modified_kl()) {
    return x - candidate_alpha;
  }
  const double d = escort_theta - candidate_alpha;
  const double g = gamma.is_kl() ? 1.0 : gamma.value();
  const double weight =
      std::exp(-0.5 * g * d * (escort_theta + candidate_alpha - 2.0 * x));
  double lead;
  if (gamma.is_kl()) {
    lead = kl_form == KlForm::exact ? -d : d;
  } else {
    lead = -g * d * std::exp(0.5 * g * (g - 1.0) * d * d);
  }
  return lead + (x - candidate_alpha) * weight;
}

double estimating_equation_location(double escort_theta,
                                    double candidate_alpha, PowerIndex gamma,
                                    std::span<const double> sample,
                                    KlForm kl_form) {
  require_nonempty(sample);
  double acc = 0.0;
  for (double x : sample) {
    acc += psi_location(escort_theta, candidate_alpha, gamma, x, kl_form);
  }
  return acc / static_cast<double>(sample.size());
}

double expected_criterion_location(double escort_theta, double candidate_alpha,
                                   PowerIndex gamma, double theta0,
                                   KlForm kl_form) {
  const double d = escort_theta - candidate_alpha;
  const double shift = escort_theta + candidate_alpha - 2.0 * theta0;
  if (gamma.is_modified_kl()) {
    return 0.5 * d * shift;
  }
  const double g = gamma.is_kl() ? 1.0 : gamma.value();
  // E exp{-(g/2) d (theta + alpha - 2Y)}, Y ~ N(theta0, 1)
  const double log_mgf = -0.5 * g * d * shift + 0.5 * g * g * d * d;
  if (log_mgf > kExponentLimit) return kNegInf;
  if (gamma.is_kl()) {
    const double quad = kl_form == KlForm::exact ? 0.5 * d * d : -0.5 * d * d;
    return quad - std::expm1(log_mgf);
  }
  const double lead = 0.5 * g * (g - 1.0) * d * d;
  if (lead > kExponentLimit) return kNegInf;
  return std::expm1(lead) / (g - 1.0) - std::expm1(log_mgf) / g;
}

}  // namespace dphide
