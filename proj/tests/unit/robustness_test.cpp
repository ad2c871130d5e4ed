#include "dphide/robustness.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "dphide/errors.hpp"
#include "dphide/parallel.hpp"

namespace {

using dphide::IfQuery;
using dphide::PowerIndex;

TEST(InfluenceLocation, Examples) {
  EXPECT_DOUBLE_EQ(dphide::influence_location({3.0, PowerIndex(0.0), 0.5, 0.0}), 3.0);
  EXPECT_NEAR(dphide::influence_location({0.0, PowerIndex(1.0), 1.0, 0.0}), -0.5, 1e-15);
  for (double g : {-0.5, 0.0, 0.5, 1.0, 2.0, 3.0}) {
    EXPECT_EQ(dphide::influence_location({2.5, PowerIndex(g), 1.0, 1.0}), 1.5);
  }
}

TEST(InfluenceLocation, ContinuousInGamma) {
  for (double base : {0.0, 1.0}) {
    const double at = dphide::influence_location({2.0, PowerIndex(base), 0.4, -0.1});
    EXPECT_NEAR(dphide::influence_location({2.0, PowerIndex(base + 1e-6), 0.4, -0.1}), at, 1e-5);
  }
}

TEST(InfluenceLocation, GrowsExponentiallyWithOffsetEscort) {
  // For theta != theta0 the weight exp(g (theta - theta0) x) dominates.
  const double a = dphide::influence_location({10.0, PowerIndex(2.0), 0.5, 0.0});
  const double b = dphide::influence_location({11.0, PowerIndex(2.0), 0.5, 0.0});
  EXPECT_NEAR(b / a, 1.1 * std::exp(1.0), 0.01);
}

TEST(PopulationOracle, AgreesWithTheAnalyticIf) {
  for (double g : {0.5, 1.0, 2.0}) {
    for (double theta0 : {0.0, 1.0}) {
      for (double dt : {-0.5, 0.0, 0.5}) {
        for (double x : {-3.0, 0.0, 5.0}) {
          const double theta = theta0 + dt;
          const double analytic = dphide::influence_location({x, PowerIndex(g), theta, theta0});
          const double oracle =
              dphide::population_if_extrapolated(PowerIndex(g), theta, theta0, x, 1e-5);
          EXPECT_NEAR(oracle, analytic, 1e-2) << g << " " << theta << " " << x;
          if (std::abs(analytic) < 10.0) {
            EXPECT_NEAR(dphide::population_eps_if(PowerIndex(g), theta, theta0, x, 1e-5),
                        analytic, 1e-2);
          }
        }
      }
    }
  }
}

TEST(PopulationOracle, Examples) {
  EXPECT_NEAR(dphide::population_eps_if(PowerIndex(1.0), 1.0, 0.0, 0.0, 1e-5), -0.5, 1e-2);
  for (double eps : {1e-3, 0.1, 0.3}) {
    EXPECT_NEAR(dphide::population_eps_if(PowerIndex(0.0), 0.7, 0.0, 4.0, eps), 4.0, 1e-6);
  }
  const double v = dphide::population_eps_if(PowerIndex(2.0), 0.0, 0.0, 10.0, 0.1);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_LT(std::abs(v), 10.0);
  EXPECT_THROW(dphide::population_eps_if(PowerIndex(2.0), 0.0, 0.0, 1.0, 0.0), dphide::DomainError);
  EXPECT_THROW(dphide::population_eps_if(PowerIndex(2.0), 0.0, 0.0, 1.0, 0.5), dphide::DomainError);
}

TEST(PopulationOracle, QuotientConvergesToTheIf) {
  const double analytic = dphide::influence_location({5.0, PowerIndex(2.0), 0.5, 0.0});
  double previous = INFINITY;
  for (double eps : {1e-3, 1e-4, 1e-5, 1e-6}) {
    const double gap =
        std::abs(dphide::population_eps_if(PowerIndex(2.0), 0.5, 0.0, 5.0, eps) - analytic);
    EXPECT_LT(gap, previous);
    previous = gap;
  }
  EXPECT_LT(previous, 0.5);
}

TEST(PopulationOracle, FisherConsistent) {
  for (double g : {0.0, 0.5, 1.0, 2.0}) {
    EXPECT_NEAR(dphide::population_functional(PowerIndex(g), 0.8, 0.3, 0.0, 0.0), 0.3, 1e-8);
  }
}

TEST(LogGrid, EndpointsAndSpacing) {
  const auto grid = dphide::log_spaced_grid(0.01, 25.0, 50);
  ASSERT_EQ(grid.size(), 50u);
  EXPECT_DOUBLE_EQ(grid.front(), 0.01);
  EXPECT_DOUBLE_EQ(grid.back(), 25.0);
  EXPECT_NEAR(grid[2] / grid[1], grid[1] / grid[0], 1e-12);
  EXPECT_THROW(dphide::log_spaced_grid(0.0, 1.0, 5), dphide::InputError);
}

TEST(EpsIfProtocol, Validation) {
  dphide::EpsIfProtocol p;
  EXPECT_NO_THROW(p.validate());
  EXPECT_EQ(p.replaced(), 10);
  p.epsilon = 0.005;
  EXPECT_THROW(p.validate(), dphide::InputError);
  p = {};
  p.grid = {1.0, 0.5};
  EXPECT_THROW(p.validate(), dphide::InputError);
  p = {};
  p.grid = {1.0, 1.0};
  EXPECT_THROW(p.validate(), dphide::InputError);
}

dphide::EpsIfProtocol small_protocol() {
  dphide::EpsIfProtocol p;
  p.replications = 40;
  p.grid = {0.5, 5.0, 10.0, 25.0};
  p.seed = 3;
  return p;
}

TEST(EmpiricalEpsIf, ParallelMatchesSerialBitForBit) {
  const auto p = small_protocol();
  dphide::set_thread_count(4);
  const auto par = dphide::empirical_eps_if(p);
  dphide::set_thread_count(0);
  const auto ser = dphide::reference::empirical_eps_if(p);
  ASSERT_EQ(par.size(), ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) {
    EXPECT_EQ(par[i].mean_estimate, ser[i].mean_estimate);
    EXPECT_EQ(par[i].mc_se, ser[i].mc_se);
  }
}

TEST(EmpiricalEpsIf, MleIsALineOfSlopeEps) {
  auto p = small_protocol();
  p.gamma_list = {0.0};
  const auto rows = dphide::empirical_eps_if(p);
  // Same replications at every g, so differences are exact up to rounding.
  const double slope = (rows[3].mean_estimate - rows[2].mean_estimate) / (25.0 - 10.0);
  EXPECT_NEAR(slope, 0.1, 1e-10);
  // Mean of the kept 90 order statistics of N(1, 1) is 1 - phi(z)/0.9 with
  // z = 1.2816, i.e. about 0.8045.
  const double intercept = rows[2].mean_estimate - 0.1 * 10.0;
  EXPECT_NEAR(intercept / 0.9, 0.8045, 3 * rows[2].mc_se / 0.9 + 0.02);
}

TEST(EmpiricalEpsIf, RobustCurvesStayBounded) {
  const auto rows = dphide::empirical_eps_if(small_protocol());
  for (const auto& r : rows) {
    EXPECT_EQ(r.excluded, 0);
    if (r.gamma > 0.0) EXPECT_LT(std::abs(r.mean_estimate - 1.0), 1.0) << r.gamma << " " << r.g;
  }
}

}  // namespace
