#pragma once

// Influence functions of the normal-location DphiDE: the analytic IF, a
// population-level finite-epsilon oracle, and the empirical epsilon-IF
// protocol (replace the largest order statistics by a moving point g).

#include <cstdint>
#include <vector>

#include "dphide/divergence.hpp"
#include "dphide/estimators.hpp"

namespace dphide {

struct IfQuery {
  double x;
  PowerIndex gamma;
  double escort_theta;
  double true_theta0;
};

/// IF(x; T_theta, P_theta0) for the unit-variance normal location model.
/// Reduces to x - theta0 when gamma = 0 or escort_theta == true_theta0.
double influence_location(const IfQuery& query);

/// Maximizer over alpha of the population criterion
///   (1 - eps) \int h(theta, alpha) dN(theta0, 1) + eps h(theta, alpha, x).
/// eps = 0 is allowed here (Fisher consistency). Throws ConvergenceError when
/// the optimizer fails.
double population_functional(PowerIndex gamma, double escort_theta,
                             double theta0, double x, double epsilon,
                             KlForm kl_form = KlForm::exact);

/// (population_functional - theta0) / eps, eps in (0, 0.5).
double population_eps_if(PowerIndex gamma, double escort_theta, double theta0,
                         double x, double epsilon,
                         KlForm kl_form = KlForm::exact);

/// Richardson extrapolation of population_eps_if over eps, eps/2, eps/4,
/// cancelling the O(eps) and O(eps^2) terms of the quotient. Needed where
/// |IF| is large and the plain quotient at small eps is still visibly biased.
double population_if_extrapolated(PowerIndex gamma, double escort_theta,
                                  double theta0, double x, double epsilon,
                                  KlForm kl_form = KlForm::exact);

/// `count` points from lo to hi, equally spaced on the log scale. lo, hi > 0.
std::vector<double> log_spaced_grid(double lo, double hi, int count);

struct EpsIfProtocol {
  int n = 100;
  double theta0 = 1.0;
  double epsilon = 0.1;
  std::vector<double> grid = log_spaced_grid(0.01, 25.0, 50);
  int replications = 1000;
  std::uint64_t seed = 1;
  std::vector<double> gamma_list{0.0, 0.5, 1.0, 2.0};
  LocationRule escort = LocationRule::sample_median;
  EstimatorOptions estimator{};

  /// Number of order statistics replaced, floor(eps n).
  int replaced() const;
  void validate() const;
};

struct EpsIfPoint {
  double gamma;
  double g;
  double mean_estimate;
  double mc_se;
  int excluded;  // non-converged replications
};

/// Rows ordered by gamma (protocol order), then grid value.
/// Each replication draws n points from N(theta0, 1) on the substream
/// (seed, eps, n, replication), sorts them and, for every grid value g,
/// replaces the floor(eps n) largest by g before re-estimating.
std::vector<EpsIfPoint> empirical_eps_if(const EpsIfProtocol& protocol);

namespace reference {
std::vector<EpsIfPoint> empirical_eps_if(const EpsIfProtocol& protocol);
}

}  // namespace dphide
