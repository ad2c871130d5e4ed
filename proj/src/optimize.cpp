#include "dphide/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dphide/errors.hpp"

namespace dphide {

namespace {

constexpr double kGolden = 0.3819660112501051;  // (3 - sqrt 5) / 2
constexpr double kInf = std::numeric_limits<double>::infinity();

// Minimization form of a maximization objective; NaN and -inf map to +inf.
double as_cost(double value) {
  return std::isnan(value) ? kInf : -value;
}

}  // namespace

ScalarMaxResult maximize_brent(const std::function<double(double)>& f,
                               double lower, double upper, double start,
                               const ScalarMaxOptions& options) {
  if (!(lower < upper) || !(start >= lower && start <= upper)) {
    throw DomainError("maximize_brent: start must lie inside a nonempty bracket");
  }
  double a = lower;
  double b = upper;
  double x = start;
  double w = start;
  double v = start;
  double fx = as_cost(f(start));
  double fw = fx;
  double fv = fx;
  double d = 0.0;
  double e = 0.0;

  for (int iter = 1; iter <= options.max_iterations; ++iter) {
    const double xm = 0.5 * (a + b);
    const double tol1 = options.x_tolerance * (1.0 + std::abs(x));
    const double tol2 = 2.0 * tol1;
    if (std::abs(x - xm) <= tol2 - 0.5 * (b - a)) {
      return {x, -fx, iter, true};
    }

    bool golden = true;
    if (std::abs(e) > tol1 && std::isfinite(fx) && std::isfinite(fw) &&
        std::isfinite(fv)) {
      double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::abs(q);
      const double etemp = e;
      e = d;
      if (!(std::abs(p) >= std::abs(0.5 * q * etemp) || p <= q * (a - x) ||
            p >= q * (b - x))) {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) {
          d = std::copysign(tol1, xm - x);
        }
        golden = false;
      }
    }
    if (golden) {
      e = (x >= xm) ? a - x : b - x;
      d = kGolden * e;
    }

    const double u = std::abs(d) >= tol1 ? x + d : x + std::copysign(tol1, d);
    const double fu = as_cost(f(u));
    if (fu <= fx) {
      if (u >= x) a = x; else b = x;
      v = w; fv = fw;
      w = x; fw = fx;
      x = u; fx = fu;
    } else {
      if (u < x) a = u; else b = u;
      if (fu <= fw || w == x) {
        v = w; fv = fw;
        w = u; fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u; fv = fu;
      }
    }
  }
  return {x, -fx, options.max_iterations, false};
}

ScalarMaxResult polish_stationary_point(
    const std::function<double(double)>& f,
    const std::function<double(double)>& slope, const ScalarMaxResult& found,
    double lower, double upper, double value_slack) {
  double x0 = found.argmax;
  double s0 = slope(x0);
  if (!std::isfinite(s0) || s0 == 0.0) return found;

  const double start_slope = std::abs(s0);
  double best_x = x0;
  double best_slope = start_slope;

  double x1 = x0 + 1e-6 * (1.0 + std::abs(x0));
  if (x1 > upper) x1 = x0 - 1e-6 * (1.0 + std::abs(x0));
  double s1 = slope(x1);
  for (int iter = 0; iter < 30 && std::isfinite(s1); ++iter) {
    if (std::abs(s1) < best_slope) {
      best_slope = std::abs(s1);
      best_x = x1;
    }
    if (s1 == 0.0 || s1 == s0) break;
    const double x2 = x1 - s1 * (x1 - x0) / (s1 - s0);
    if (!(x2 >= lower && x2 <= upper)) break;
    if (std::abs(x2 - x1) <= 1e-15 * (1.0 + std::abs(x1))) {
      x1 = x2;
      s1 = slope(x1);
      if (std::isfinite(s1) && std::abs(s1) < best_slope) {
        best_slope = std::abs(s1);
        best_x = x1;
      }
      break;
    }
    x0 = x1;
    s0 = s1;
    x1 = x2;
    s1 = slope(x1);
  }

  if (best_slope >= start_slope) return found;
  const double value = f(best_x);
  if (!(value >= found.value - value_slack)) return found;
  return {best_x, std::max(value, found.value), found.iterations, found.converged};
}

namespace {

struct SimplexRun {
  std::vector<double> best;
  double cost;
  int iterations;
  bool converged;
};

SimplexRun nelder_mead_once(
    const std::function<double(const std::vector<double>&)>& f,
    const std::vector<double>& start, const std::vector<double>& steps,
    double f_tolerance, int max_iterations) {
  const std::size_t dim = start.size();
  std::vector<std::vector<double>> pts(dim + 1, start);
  for (std::size_t i = 0; i < dim; ++i) pts[i + 1][i] += steps[i];
  std::vector<double> cost(dim + 1);
  for (std::size_t i = 0; i <= dim; ++i) cost[i] = as_cost(f(pts[i]));

  std::vector<std::size_t> order(dim + 1);
  std::vector<double> centroid(dim);
  std::vector<double> trial(dim);
  auto at = [&](double t, std::vector<double>& out) {
    // centroid + t * (centroid - worst)
    const auto& worst = pts[order[dim]];
    for (std::size_t j = 0; j < dim; ++j) {
      out[j] = centroid[j] + t * (centroid[j] - worst[j]);
    }
    return as_cost(f(out));
  };

  for (int iter = 0; iter < max_iterations; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return cost[l] < cost[r]; });
    const double lo = cost[order[0]];
    const double hi = cost[order[dim]];
    if (std::isfinite(hi) &&
        2.0 * std::abs(hi - lo) <= f_tolerance * (std::abs(hi) + std::abs(lo)) + 1e-20) {
      return {pts[order[0]], lo, iter, true};
    }
    double extent = 0.0;
    for (std::size_t i = 1; i <= dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        extent = std::max(extent, std::abs(pts[order[i]][j] - pts[order[0]][j]) /
                                      (1.0 + std::abs(pts[order[0]][j])));
      }
    }
    if (extent <= 1e-13) {
      return {pts[order[0]], lo, iter, std::isfinite(lo)};
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += pts[order[i]][j];
    }
    for (double& c : centroid) c /= static_cast<double>(dim);

    const std::size_t worst = order[dim];
    const double second = cost[order[dim - 1]];
    std::vector<double> reflected(dim);
    const double fr = at(1.0, reflected);
    if (fr < lo) {
      const double fe = at(2.0, trial);
      if (fe < fr) {
        pts[worst] = trial;
        cost[worst] = fe;
      } else {
        pts[worst] = reflected;
        cost[worst] = fr;
      }
      continue;
    }
    if (fr < second) {
      pts[worst] = reflected;
      cost[worst] = fr;
      continue;
    }
    // Contraction: outside if the reflection beat the worst point.
    const double t = fr < hi ? 0.5 : -0.5;
    const double fc = at(t, trial);
    if (fc < std::min(fr, hi)) {
      pts[worst] = trial;
      cost[worst] = fc;
      continue;
    }
    const auto& best = pts[order[0]];
    for (std::size_t i = 1; i <= dim; ++i) {
      auto& p = pts[order[i]];
      for (std::size_t j = 0; j < dim; ++j) p[j] = best[j] + 0.5 * (p[j] - best[j]);
      cost[order[i]] = as_cost(f(p));
    }
  }
  const auto best = std::min_element(cost.begin(), cost.end()) - cost.begin();
  return {pts[best], cost[best], max_iterations, false};
}

}  // namespace

SimplexResult maximize_nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> start, const std::vector<double>& steps,
    const SimplexOptions& options) {
  if (start.empty() || steps.size() != start.size()) {
    throw DomainError("maximize_nelder_mead: start and steps must have equal, nonzero size");
  }
  SimplexRun run =
      nelder_mead_once(f, start, steps, options.f_tolerance, options.max_iterations);
  int total = run.iterations;
  bool converged = run.converged;
  for (int r = 0; r < options.restarts; ++r) {
    SimplexRun again = nelder_mead_once(f, run.best, steps, options.f_tolerance,
                                        options.max_iterations);
    total += again.iterations;
    const double gain = run.cost - again.cost;
    if (again.cost <= run.cost) run = again;
    converged = again.converged &&
                !(gain > options.f_tolerance * (1.0 + std::abs(again.cost)));
    if (converged) break;
  }
  return {run.best, -run.cost, total, converged};
}

}  // namespace dphide
