#pragma once

// Derivative-free maximizers used by the estimators. Objectives may return
// -inf (infeasible or overflowing candidates); both routines treat such
// points as strictly worse than any finite value.

#include <functional>
#include <vector>

namespace dphide {

struct ScalarMaxResult {
  double argmax;
  double value;
  int iterations;
  bool converged;
};

struct ScalarMaxOptions {
  double x_tolerance = 1e-8;  // relative to 1 + |x|
  int max_iterations = 200;
};

/// Brent's golden-section / parabolic search for a maximum of `f` on
/// [lower, upper], started from `start` (which must lie inside the bracket).
/// The returned point is never worse than `start`.
ScalarMaxResult maximize_brent(const std::function<double(double)>& f,
                               double lower, double upper, double start,
                               const ScalarMaxOptions& options = {});

/// Refines a maximizer by solving slope(x) = 0 with a safeguarded secant
/// iteration inside [lower, upper]. `slope` must be the derivative of `f`.
/// The refined point replaces `found` only when |slope| shrinks and the
/// objective does not drop by more than `value_slack`.
ScalarMaxResult polish_stationary_point(
    const std::function<double(double)>& f,
    const std::function<double(double)>& slope, const ScalarMaxResult& found,
    double lower, double upper, double value_slack = 1e-12);

struct SimplexOptions {
  double f_tolerance = 1e-8;  // spread of objective values over the simplex
  int max_iterations = 2000;
  int restarts = 1;
};

struct SimplexResult {
  std::vector<double> argmax;
  double value;
  int iterations;
  bool converged;
};

/// Nelder-Mead maximization of `f` from `start` with initial edge lengths
/// `steps`. After convergence the simplex is rebuilt around the best point
/// and the search repeated up to `restarts` times; the run counts as
/// converged once a restart no longer improves the value beyond f_tolerance.
SimplexResult maximize_nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> start, const std::vector<double>& steps,
    const SimplexOptions& options = {});

}  // namespace dphide
