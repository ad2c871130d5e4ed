#pragma once

// Closed-form dual criteria for the normal location and location-scale
// models.
//
// Conventions: the escort is the instrumental parameter (theta, sigma) that
// enters through p_escort, the candidate (alpha, sigma~) is the point being
// scored. Every criterion is the empirical mean of h(escort, candidate, X_i),
// so it is exactly 0 when candidate == escort.

#include <span>

#include "dphide/divergence.hpp"

namespace dphide {

/// Location/scale pair of a normal distribution; sigma > 0.
class NormalLocScale {
 public:
  NormalLocScale(double theta, double sigma);

  double theta() const noexcept { return theta_; }
  double sigma() const noexcept { return sigma_; }

  friend bool operator==(const NormalLocScale&, const NormalLocScale&) = default;

 private:
  double theta_;
  double sigma_;
};

/// (1 - epsilon) N(theta0, 1) + epsilon delta_outlier.
struct ContaminationModel {
  double epsilon = 0.0;
  double theta0 = 0.0;
  double outlier = 10.0;

  void validate() const;
};

/// Selects between the two forms of the gamma = 1 criterion.
///
/// `exact` is the gamma -> 1 limit of the power-family criterion, i.e. the
/// integral term is KL(P_escort || P_candidate); it agrees with quadrature.
/// `legacy` uses the alternative bracket
///   location:        -(theta - alpha)^2 / 2
///   location-scale:  (1 - (s~/s)^2 - ((theta - alpha)/s~)^2)/2 - log(s~/s)
/// which is what the historical Newcomb fits were computed with. It is kept
/// only to reproduce those numbers; it is not a dual divergence criterion.
enum class KlForm { exact, legacy };

struct CriterionValue {
  double value;
  NormalLocScale candidate;
  bool feasible;
};

/// Exponents beyond this magnitude make a criterion saturate to -infinity.
inline constexpr double kExponentLimit = 700.0;

double log_density(const NormalLocScale& params, double x);

/// (1/(gamma-1)) \int (p_escort / p_candidate)^(gamma-1) dP_escort.
/// Requires gamma outside {0, 1}; throws InfeasibleDomainError when
/// gamma s~^2 - (gamma-1) s^2 <= 0. Returns an infinity on overflow.
double gaussian_ratio_integral(const NormalLocScale& escort,
                               const NormalLocScale& candidate,
                               PowerIndex gamma);

/// \int phi'(p_escort / p_candidate) dP_escort for every gamma. This is the
/// integral term of h_point for the normal model.
double dual_integral_term(const NormalLocScale& escort,
                          const NormalLocScale& candidate, PowerIndex gamma);

/// h(escort, candidate, x) evaluated through the closed-form integral term.
double h_point_normal(const NormalLocScale& escort,
                      const NormalLocScale& candidate, PowerIndex gamma,
                      double x);

/// P_n h for the location-scale model. feasible == false when the domain
/// constraint fails; value is then -inf. Overflowing exponents also give
/// -inf (but feasible stays true). Throws InputError for an empty sample.
CriterionValue criterion_loc_scale(const NormalLocScale& escort,
                                   const NormalLocScale& candidate,
                                   PowerIndex gamma,
                                   std::span<const double> sample,
                                   KlForm kl_form = KlForm::exact);

/// P_n h for the unit-variance location model.
double criterion_location(double escort_theta, double candidate_alpha,
                          PowerIndex gamma, std::span<const double> sample,
                          KlForm kl_form = KlForm::exact);

/// d/d alpha of h(theta, alpha, x) for the location model.
double psi_location(double escort_theta, double candidate_alpha,
                    PowerIndex gamma, double x, KlForm kl_form = KlForm::exact);

/// Mean of psi_location over the sample; the estimating equation.
double estimating_equation_location(double escort_theta,
                                    double candidate_alpha, PowerIndex gamma,
                                    std::span<const double> sample,
                                    KlForm kl_form = KlForm::exact);

/// \int h(theta, alpha) dP_{theta0} for the location model with P_{theta0} =
/// N(theta0, 1), in closed form.
double expected_criterion_location(double escort_theta, double candidate_alpha,
                                   PowerIndex gamma, double theta0,
                                   KlForm kl_form = KlForm::exact);

}  // namespace dphide
