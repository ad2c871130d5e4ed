#include "dphide/divergence.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dphide/errors.hpp"

namespace dphide {

PowerIndex::PowerIndex(double gamma) : gamma_(gamma) {
  if (!std::isfinite(gamma)) {
    throw DomainError("power index must be finite");
  }
}

bool PowerIndex::is_modified_kl() const noexcept {
  return std::abs(gamma_) < kLimitWindow;
}

bool PowerIndex::is_kl() const noexcept {
  return std::abs(gamma_ - 1.0) < kLimitWindow;
}

std::string PowerIndex::name() const {
  if (is_modified_kl()) return "KLm";
  if (is_kl()) return "KL";
  if (gamma_ == 0.5) return "Hellinger";
  if (gamma_ == 2.0) return "chi2";
  std::ostringstream os;
  os << "gamma=" << gamma_;
  return os.str();
}

double phi(PowerIndex index, double x) {
  if (!(x >= 0.0)) {
    throw DomainError("phi: argument must be nonnegative");
  }
  const double g = index.value();
  if (x == 0.0) {
    if (index.is_modified_kl() || g < 0.0) {
      return std::numeric_limits<double>::infinity();
    }
    return index.is_kl() ? 1.0 : 1.0 / g;
  }
  const double dx = x - 1.0;
  if (index.is_modified_kl()) {
    return -std::log1p(dx) + dx;
  }
  if (index.is_kl()) {
    return x * std::log1p(dx) - dx;
  }
  return (std::expm1(g * std::log(x)) - g * dx) / (g * (g - 1.0));
}

double phi_prime(PowerIndex index, double x) {
  if (!(x > 0.0)) {
    throw DomainError("phi_prime: argument must be positive");
  }
  if (index.is_modified_kl()) {
    return 1.0 - 1.0 / x;
  }
  if (index.is_kl()) {
    return std::log(x);
  }
  const double gm1 = index.value() - 1.0;
  return std::expm1(gm1 * std::log(x)) / gm1;
}

double phi_double_prime(PowerIndex index, double x) {
  if (!(x > 0.0)) {
    throw DomainError("phi_double_prime: argument must be positive");
  }
  if (index.is_modified_kl()) {
    return 1.0 / (x * x);
  }
  if (index.is_kl()) {
    return 1.0 / x;
  }
  return std::pow(x, index.value() - 2.0);
}

double conjugate_term(PowerIndex index, double log_ratio) {
  if (index.is_modified_kl()) {
    return log_ratio;
  }
  if (index.is_kl()) {
    return std::expm1(log_ratio);
  }
  const double g = index.value();
  return std::expm1(g * log_ratio) / g;
}

double h_point(PowerIndex index, double integral_term, double log_p_escort,
               double log_p_candidate) {
  if (std::isnan(log_p_escort) || std::isnan(log_p_candidate) ||
      log_p_candidate == -std::numeric_limits<double>::infinity() ||
      log_p_escort == -std::numeric_limits<double>::infinity()) {
    throw DomainError("h_point: density must be positive at the sample point");
  }
  return integral_term - conjugate_term(index, log_p_escort - log_p_candidate);
}

}  // namespace dphide
