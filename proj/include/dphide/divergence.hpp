#pragma once

// Cressie-Read power divergences phi_gamma and the pointwise dual integrand
// h(theta, alpha, x) of the dual phi-divergence representation.

#include <string>

namespace dphide {

/// Divergence selector gamma of the power family. gamma = 0 is the modified
/// Kullback-Leibler divergence, 1/2 Hellinger, 1 Kullback-Leibler, 2 chi^2.
class PowerIndex {
 public:
  /// Values within this distance of 0 or 1 use the closed limit formulas.
  static constexpr double kLimitWindow = 1e-9;

  explicit PowerIndex(double gamma);

  double value() const noexcept { return gamma_; }
  bool is_modified_kl() const noexcept;
  bool is_kl() const noexcept;
  bool is_generic() const noexcept { return !is_modified_kl() && !is_kl(); }

  /// "KLm", "Hellinger", "KL", "chi2" for the named cases, else "gamma=<g>".
  std::string name() const;

 private:
  double gamma_;
};

/// phi_gamma(x) for x >= 0. At x = 0 the right limit is returned, which is
/// +infinity for gamma <= 0 and 1/gamma otherwise.
double phi(PowerIndex index, double x);

/// First derivative, x > 0.
double phi_prime(PowerIndex index, double x);

/// Second derivative x^(gamma - 2), x > 0.
double phi_double_prime(PowerIndex index, double x);

/// Pointwise dual integrand
///   h = I - [ r phi'(r) - phi(r) ],   r = p_escort(x) / p_candidate(x),
/// where I = \int phi'(p_escort / p_candidate) dP_escort is supplied by the
/// caller. The ratio enters only through its logarithm.
/// Throws DomainError if either log-density is -inf or NaN.
double h_point(PowerIndex index, double integral_term, double log_p_escort,
               double log_p_candidate);

/// r phi'(r) - phi(r) expressed through log r; (r^gamma - 1)/gamma for the
/// generic case, log r for gamma = 0 and r - 1 for gamma = 1.
double conjugate_term(PowerIndex index, double log_ratio);

}  // namespace dphide
