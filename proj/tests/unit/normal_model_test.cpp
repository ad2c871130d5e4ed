#include "dphide/normal_model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "dphide/errors.hpp"
#include "oracles.hpp"

namespace {

using dphide::KlForm;
using dphide::NormalLocScale;
using dphide::PowerIndex;

const std::vector<double> kSample{-1.2, 0.3, 0.9, 2.5, -0.4, 1.7};

double feasibility(double g, double sigma, double tau) {
  return g * tau * tau - (g - 1.0) * sigma * sigma;
}

TEST(NormalLocScale, RejectsBadParameters) {
  EXPECT_THROW(NormalLocScale(0.0, 0.0), dphide::DomainError);
  EXPECT_THROW(NormalLocScale(0.0, -1.0), dphide::DomainError);
  EXPECT_THROW(NormalLocScale(std::nan(""), 1.0), dphide::DomainError);
}

TEST(GaussianRatioIntegral, DomainBoundary) {
  const NormalLocScale escort(0.0, 1.0);
  // gamma = 2: 2 s~^2 - 1 > 0 iff s~ > 1/sqrt(2)
  EXPECT_THROW(dphide::gaussian_ratio_integral(escort, NormalLocScale(0.0, 0.7), PowerIndex(2.0)),
               dphide::InfeasibleDomainError);
  EXPECT_NO_THROW(
      dphide::gaussian_ratio_integral(escort, NormalLocScale(0.0, 0.71), PowerIndex(2.0)));
  EXPECT_THROW(dphide::gaussian_ratio_integral(escort, escort, PowerIndex(1.0)),
               dphide::DomainError);
}

TEST(GaussianRatioIntegral, EqualParametersGiveOneOverGammaMinusOne) {
  const NormalLocScale p(0.4, 1.3);
  EXPECT_NEAR(dphide::gaussian_ratio_integral(p, p, PowerIndex(2.0)), 1.0, 1e-14);
  EXPECT_NEAR(dphide::gaussian_ratio_integral(p, p, PowerIndex(0.5)), -2.0, 1e-14);
}

TEST(DualIntegralTerm, MatchesQuadrature) {
  const std::vector<double> values{-1.0, 0.0, 0.7};
  const std::vector<double> scales{0.8, 1.0, 1.3};
  for (double g : {-0.5, 0.0, 0.5, 1.0, 2.0}) {
    for (double theta : values) {
      for (double alpha : values) {
        for (double s : scales) {
          for (double t : scales) {
            if (g != 0.0 && g != 1.0 && feasibility(g, s, t) <= 0.0) continue;
            const double got = dphide::dual_integral_term(NormalLocScale(theta, s),
                                                          NormalLocScale(alpha, t),
                                                          PowerIndex(g));
            EXPECT_NEAR(got, oracle::integral_term(g, theta, s, alpha, t), 1e-8)
                << g << " " << theta << " " << alpha << " " << s << " " << t;
          }
        }
      }
    }
  }
}

TEST(CriterionLocScale, MatchesQuadratureOnTheGrid) {
  const std::vector<double> values{-1.0, 0.0, 0.7};
  const std::vector<double> scales{0.8, 1.0, 1.3};
  int checked = 0;
  for (double g : {-0.5, 0.5, 1.0, 2.0}) {
    for (double theta : values) {
      for (double alpha : values) {
        for (double s : scales) {
          for (double t : scales) {
            const auto got = dphide::criterion_loc_scale(
                NormalLocScale(theta, s), NormalLocScale(alpha, t), PowerIndex(g), kSample);
            if (g != 1.0 && feasibility(g, s, t) <= 0.0) {
              EXPECT_FALSE(got.feasible);
              EXPECT_TRUE(std::isinf(got.value) && got.value < 0);
              continue;
            }
            ASSERT_TRUE(got.feasible);
            EXPECT_NEAR(got.value, oracle::criterion(g, theta, s, alpha, t, kSample), 1e-6);
            ++checked;
          }
        }
      }
    }
  }
  EXPECT_GT(checked, 250);
}

TEST(CriterionLocScale, ZeroAtTheEscort) {
  const NormalLocScale p(0.3, 1.2);
  for (double g : {-0.5, 0.0, 0.5, 1.0, 2.0}) {
    EXPECT_NEAR(dphide::criterion_loc_scale(p, p, PowerIndex(g), kSample).value, 0.0, 1e-15);
  }
}

TEST(CriterionLocScale, EmptySampleIsAnInputError) {
  const NormalLocScale p(0.0, 1.0);
  EXPECT_THROW(dphide::criterion_loc_scale(p, p, PowerIndex(0.5), std::vector<double>{}),
               dphide::InputError);
}

TEST(CriterionLocScale, LegacyKlFormDoesNotMatchQuadrature) {
  const NormalLocScale escort(0.0, 1.0);
  const NormalLocScale candidate(0.7, 1.3);
  const double exact = oracle::criterion(1.0, 0.0, 1.0, 0.7, 1.3, kSample);
  const double legacy = dphide::criterion_loc_scale(escort, candidate, PowerIndex(1.0), kSample,
                                                    KlForm::legacy)
                            .value;
  EXPECT_GT(std::abs(legacy - exact), 0.1);
}

TEST(CriterionLocScale, LimitCasesAreContinuous) {
  const NormalLocScale escort(0.1, 0.9);
  const NormalLocScale candidate(0.6, 1.2);
  for (double base : {0.0, 1.0}) {
    const double at = dphide::criterion_loc_scale(escort, candidate, PowerIndex(base), kSample).value;
    for (double off : {1e-6, -1e-6}) {
      const double near =
          dphide::criterion_loc_scale(escort, candidate, PowerIndex(base + off), kSample).value;
      EXPECT_NEAR(near, at, 1e-5);
    }
  }
}

TEST(CriterionLocation, AgreesWithUnitScaleLocScale) {
  for (double g : {-0.5, 0.0, 0.5, 1.0, 2.0}) {
    for (double alpha : {-1.0, 0.2, 1.5}) {
      const double loc = dphide::criterion_location(0.4, alpha, PowerIndex(g), kSample);
      const double ls = dphide::criterion_loc_scale(NormalLocScale(0.4, 1.0),
                                                    NormalLocScale(alpha, 1.0), PowerIndex(g),
                                                    kSample)
                            .value;
      EXPECT_NEAR(loc, ls, 1e-12);
    }
  }
}

TEST(CriterionLocation, LegacyFormFlipsTheQuadraticTerm) {
  const double exact = dphide::criterion_location(0.0, 0.8, PowerIndex(1.0), kSample);
  const double legacy =
      dphide::criterion_location(0.0, 0.8, PowerIndex(1.0), kSample, KlForm::legacy);
  EXPECT_NEAR(exact - legacy, 0.8 * 0.8, 1e-12);
}

TEST(PsiLocation, IsTheAlphaDerivativeOfH) {
  for (double g : {-0.5, 0.0, 0.5, 1.0, 2.0}) {
    for (KlForm form : {KlForm::exact, KlForm::legacy}) {
      for (double x : {-2.0, 0.3, 4.0}) {
        const double xs[1] = {x};
        auto h = [&](double a) {
          return dphide::criterion_location(0.2, a, PowerIndex(g), xs, form);
        };
        for (double alpha : {-0.5, 0.2, 1.1}) {
          const double fd = oracle::derivative(h, alpha);
          EXPECT_NEAR(dphide::psi_location(0.2, alpha, PowerIndex(g), x, form), fd,
                      1e-6 * (1.0 + std::abs(fd)));
        }
      }
    }
  }
}

TEST(ExpectedCriterionLocation, MatchesQuadrature) {
  for (double g : {-0.5, 0.0, 0.5, 1.0, 2.0}) {
    for (double theta : {-0.5, 0.0, 0.6}) {
      for (double alpha : {-1.0, 0.3, 1.2}) {
        EXPECT_NEAR(dphide::expected_criterion_location(theta, alpha, PowerIndex(g), 0.25),
                    oracle::expected_h(g, theta, alpha, 0.25), 1e-8);
      }
    }
  }
}

TEST(ExpectedCriterionLocation, MaximizedAtTheTruth) {
  for (double g : {0.0, 0.5, 1.0, 2.0}) {
    auto f = [&](double a) {
      return dphide::expected_criterion_location(0.3, a, PowerIndex(g), -0.2);
    };
    EXPECT_NEAR(oracle::grid_argmax(f, -3.0, 3.0), -0.2, 1e-6) << g;
  }
}

TEST(Overflow, SaturatesToMinusInfinity) {
  const std::vector<double> far{1e4};
  EXPECT_TRUE(std::isinf(dphide::criterion_location(0.0, -50.0, PowerIndex(2.0), far)));
  EXPECT_TRUE(std::isinf(dphide::criterion_loc_scale(NormalLocScale(0, 1), NormalLocScale(-50, 1),
                                                     PowerIndex(2.0), far)
                             .value));
}

}  // namespace
