#pragma once

// Dual phi-divergence estimators (DphiDE) for the normal location and
// location-scale models, their escort rules, and the classical baselines.

#include <optional>
#include <span>
#include <vector>

#include "dphide/divergence.hpp"
#include "dphide/normal_model.hpp"

namespace dphide {

/// Consistency factor making the MAD estimate sigma at the normal model.
inline constexpr double kMadConsistency = 1.4826;

enum class LocationRule { sample_mean, sample_median, fixed };
enum class ScaleRule { sample_sd, normal_consistent_mad, fixed };

/// How the escort parameter is derived from the data.
struct EscortSpec {
  LocationRule location_rule = LocationRule::sample_median;
  double location_value = 0.0;  // used by LocationRule::fixed
  ScaleRule scale_rule = ScaleRule::normal_consistent_mad;
  double scale_value = 1.0;     // used by ScaleRule::fixed

  static EscortSpec median_mad() { return {}; }
  static EscortSpec mean_sd() {
    return {LocationRule::sample_mean, 0.0, ScaleRule::sample_sd, 1.0};
  }
  static EscortSpec fixed(double theta, double sigma = 1.0) {
    return {LocationRule::fixed, theta, ScaleRule::fixed, sigma};
  }

  void validate() const;
};

/// Location from the escort rule (no scale needed).
double resolve_escort_location(const EscortSpec& spec,
                               std::span<const double> sample);

/// Full escort point. Throws InputError when the scale rule yields 0.
NormalLocScale resolve_escort(const EscortSpec& spec,
                              std::span<const double> sample);

struct EstimatorOptions {
  KlForm kl_form = KlForm::exact;
  /// Search interval half-width, in units of the escort scale (1 for the
  /// location model).
  double bracket_half_width = 10.0;
  double tolerance = 1e-8;
  int max_iterations = 200;
  /// Coarse 41-point pre-scan of the bracket before local refinement.
  bool global_scan = false;
};

struct EstimateResult {
  double alpha_hat;
  std::optional<double> sigma_hat;  // location-scale model only
  double criterion_at_max;
  int iterations;
  bool converged;
  NormalLocScale escort_used;
};

/// Maximizes criterion_location over [escort - w, escort + w]. Needs n >= 1.
EstimateResult dphide_location(std::span<const double> sample, PowerIndex gamma,
                               const EscortSpec& escort,
                               const EstimatorOptions& options = {});

/// Same, with the escort location already computed.
EstimateResult dphide_location_at(std::span<const double> sample,
                                  PowerIndex gamma, double escort_theta,
                                  const EstimatorOptions& options = {});

/// Maximizes criterion_loc_scale over (alpha, log sigma~) by Nelder-Mead
/// started at the escort. Needs n >= 2. Throws InputError when every
/// candidate evaluated was infeasible.
EstimateResult dphide_loc_scale(std::span<const double> sample, PowerIndex gamma,
                                const EscortSpec& escort,
                                const EstimatorOptions& options = {});

struct ScanPoint {
  double gamma;
  double alpha;
  double value;
};

/// criterion_location(escort_theta, alpha) for every gamma and every alpha,
/// gamma-major.
std::vector<ScanPoint> criterion_scan(std::span<const double> sample,
                                      const std::vector<double>& gammas,
                                      double escort_theta,
                                      const std::vector<double>& alphas,
                                      KlForm kl_form = KlForm::exact);

struct NormalMle {
  double mean;
  std::optional<double> sd;  // 1/n divisor; absent for n = 1
};

NormalMle mle_normal(std::span<const double> sample);

double median(std::span<const double> sample);

/// Median absolute deviation about the median, times kMadConsistency when
/// `consistent` is set.
double mad(std::span<const double> sample, bool consistent = true);

/// Huber M-estimate of location with a fixed scale: the root of
/// sum psi((x_i - mu) / scale), psi(t) = clamp(t, -tau, tau), by bisection
/// to 1e-10.
double huber_location(std::span<const double> sample, double tau = 1.4,
                      double scale = 1.0);

struct HuberIrlsOptions {
  int max_iterations = 1000;
  /// Relative change of the residual vector that ends the iteration.
  double tolerance = 1e-10;
  /// Winsorizing constant of the concurrent scale update.
  double scale_tuning = 1.345;
};

struct HuberIrlsResult {
  double location;
  double scale;
  int iterations;
  bool converged;
};

/// Huber location by iteratively reweighted least squares, started at the
/// sample mean, with the scale re-estimated at every step by Huber's
/// winsorized-variance recursion
///   s^2 = sum min(r_i^2, (c s)^2) / ((n - 1) beta(c)),
/// seeded with the normal-consistent MAD of the initial residuals.
HuberIrlsResult huber_location_irls(std::span<const double> sample,
                                    double tau = 1.4,
                                    const HuberIrlsOptions& options = {});

}  // namespace dphide
