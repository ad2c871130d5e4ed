// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dphide/dataset.hpp"
#include "dphide/estimators.hpp"
#include "dphide/normal_model.hpp"
#include "dphide/robustness.hpp"
#include "dphide/simulation.hpp"
#include "oracles.hpp"

namespace {

using dphide::PowerIndex;

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c, d);
  return buf;
}

Outcome quadrature_equivalence() {
  std::mt19937_64 eng(20240101);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> sample(20);
  for (double& v : sample) v = nd(eng);

  const std::vector<double> locs{-1.0, 0.0, 0.7};
  const std::vector<double> scales{0.8, 1.0, 1.3};
  double worst = 0.0;
  int cells = 0;
  for (double g : {-0.5, 0.5, 1.0, 2.0}) {
    for (double theta : locs) {
      for (double alpha : locs) {
        for (double s : scales) {
          for (double t : scales) {
            if (g != 1.0 && g * t * t - (g - 1.0) * s * s <= 0.0) continue;
            const auto got = dphide::criterion_loc_scale(dphide::NormalLocScale(theta, s),
                                                         dphide::NormalLocScale(alpha, t),
                                                         PowerIndex(g), sample);
            worst = std::max(worst, std::abs(got.value -
                                             oracle::criterion(g, theta, s, alpha, t, sample)));
            ++cells;
          }
        }
        const double loc = dphide::criterion_location(theta, alpha, PowerIndex(g), sample);
        worst = std::max(worst,
                         std::abs(loc - oracle::criterion(g, theta, 1.0, alpha, 1.0, sample)));
        ++cells;
      }
    }
  }
  return {worst < 1e-6, fmt("%.0f cells, max |diff| = %.3g (< 1e-6)", cells, worst)};
}

Outcome modified_kl_is_mle() {
  std::mt19937_64 eng(77);
  std::uniform_real_distribution<double> unif(-5.0, 5.0);
  std::uniform_int_distribution<int> size(5, 300);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double mu = unif(eng);
    std::normal_distribution<double> nd(mu, 1.0 + 0.02 * k);
    std::vector<double> x(static_cast<std::size_t>(size(eng)));
    for (double& v : x) v = nd(eng);
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    const double escort = mu + unif(eng);
    const auto fit = dphide::dphide_location_at(x, PowerIndex(0.0), escort);
    worst = std::max(worst, std::abs(fit.alpha_hat - mean));
  }
  return {worst < 1e-8, fmt("100 datasets, max |alpha_hat - mean| = %.3g (< 1e-8)", worst)};
}

Outcome newcomb() {
  const auto file = dphide::load_values(DPHIDE_DATA_DIR "/newcomb.txt");
  if (dphide::values_checksum(file) != dphide::kNewcombChecksum) {
    return {false, "data/newcomb.txt fails its checksum"};
  }
  struct Cell { double g; dphide::KlForm form; double a; double s; };
  const Cell cells[] = {{0.0, dphide::KlForm::exact, 26.21, 10.66},
                        {0.5, dphide::KlForm::exact, 27.67, 5.16},
                        {1.0, dphide::KlForm::legacy, 27.00, 4.47},
                        {2.0, dphide::KlForm::exact, 27.64, 4.84}};
  double worst = 0.0;
  std::string detail;
  for (const auto& c : cells) {
    dphide::EstimatorOptions opts;
    opts.kl_form = c.form;
    const auto fit = dphide::dphide_loc_scale(file, PowerIndex(c.g),
                                              dphide::EscortSpec::median_mad(), opts);
    worst = std::max({worst, std::abs(fit.alpha_hat - c.a), std::abs(*fit.sigma_hat - c.s)});
    detail += fmt("(%.2f, %.2f) ", fit.alpha_hat, *fit.sigma_hat);
  }
  return {worst <= 0.05, detail + fmt("max deviation %.4f (<= 0.05)", worst)};
}

struct Target {
  std::string estimator;
  int n;
  double value;
};

// Relative deviation of every target cell, plus the exclusion count.
Outcome check_targets(const dphide::MseTable& table, const std::vector<Target>& targets,
                      double tol, std::string& detail) {
  bool ok = table.total_excluded() == 0;
  for (const auto& t : targets) {
    const auto* cell = table.find(t.estimator, t.n);
    const double dev = std::abs(cell->mse - t.value) / t.value;
    ok = ok && dev <= tol;
    detail += t.estimator + "@" + std::to_string(t.n) +
              fmt(" %.4f vs %.4f (%.0f%%); ", cell->mse, t.value, 100 * dev);
  }
  if (table.total_excluded() > 0) detail += "non-converged replications excluded; ";
  return {ok, detail};
}

Outcome true_model_mse() {
  dphide::ExperimentConfig c;
  c.sample_sizes = {100, 200};
  c.epsilon = 0.0;
  c.replications = 1000;
  c.seed = 7;
  const auto table = dphide::run_mse_experiment(c);
  std::vector<Target> targets;
  for (const char* e : {"0", "0.5", "1", "2"}) {
    targets.push_back({e, 100, 0.0096});
    targets.push_back({e, 200, 0.0055});
  }
  targets.push_back({"huber", 100, 0.0100});
  targets.push_back({"huber", 200, 0.0057});
  std::string detail;
  return check_targets(table, targets, 0.35, detail);
}

Outcome contaminated_mse() {
  bool ok = true;
  std::string detail;
  const struct { double eps; std::vector<Target> targets; } scenarios[] = {
      {0.1, {{"0", 200, 1.0360}, {"2", 200, 0.0598}, {"huber", 200, 0.0540}}},
      {0.2, {{"2", 200, 0.1812}, {"huber", 200, 0.6220}}},
      {0.25, {{"2", 200, 0.2980}, {"huber", 200, 3.3328}}},
  };
  for (const auto& s : scenarios) {
    dphide::ExperimentConfig c;
    c.sample_sizes = {200};
    c.epsilon = s.eps;
    c.replications = 1000;
    c.seed = 7;
    const auto table = dphide::run_mse_experiment(c);
    detail += fmt("eps=%.2f: ", s.eps);
    ok = check_targets(table, s.targets, 0.35, detail).pass && ok;
    if (s.eps == 0.25) {
      const double g2 = table.find("2", 200)->mse;
      const double g1 = table.find("1", 200)->mse;
      const double g05 = table.find("0.5", 200)->mse;
      const double hub = table.find("huber", 200)->mse;
      const double g0 = table.find("0", 200)->mse;
      const bool ordered = g2 < g1 && g1 < g05 && g05 < hub && hub < g0;
      ok = ok && ordered;
      detail += ordered ? "ordering 2<1<0.5<huber<0 holds" : "ordering 2<1<0.5<huber<0 FAILS";
    }
  }
  return {ok, detail};
}

Outcome influence_functions() {
  double worst = 0.0;
  double worst_plain = 0.0;
  bool collapse = true;
  int cells = 0;
  for (double theta0 : {0.0, 1.0}) {
    for (double g : {0.5, 1.0, 2.0}) {
      for (double dt : {-0.5, 0.0, 0.5}) {
        for (double x : {-3.0, 0.0, 5.0}) {
          const double theta = theta0 + dt;
          const double analytic = dphide::influence_location({x, PowerIndex(g), theta, theta0});
          const double oracle_if =
              dphide::population_if_extrapolated(PowerIndex(g), theta, theta0, x, 1e-5);
          worst = std::max(worst, std::abs(analytic - oracle_if));
          const double quotient = dphide::population_eps_if(PowerIndex(g), theta, theta0, x, 1e-5);
          worst_plain = std::max(worst_plain, std::abs(analytic - quotient));
          ++cells;
          if (dt == 0.0) collapse = collapse && analytic == x - theta0;
        }
      }
    }
  }
  for (double g : {-0.5, 0.0, 3.0}) {
    collapse = collapse && dphide::influence_location({2.5, PowerIndex(g), 1.0, 1.0}) == 1.5;
  }
  return {worst < 1e-2 && collapse,
          fmt("%.0f cells, max |IF - extrapolated oracle| = %.3g (< 1e-2), plain quotient %.3g; ",
              cells, worst, worst_plain) +
              (collapse ? "theta = theta0 collapse exact" : "theta = theta0 collapse FAILS")};
}

Outcome eps_influence() {
  dphide::EpsIfProtocol p;
  p.epsilon = 0.1;
  p.seed = 1;
  p.escort = dphide::LocationRule::sample_median;
  p.grid.push_back(10.0);
  std::sort(p.grid.begin(), p.grid.end());
  p.grid.erase(std::unique(p.grid.begin(), p.grid.end()), p.grid.end());
  const auto rows = dphide::empirical_eps_if(p);

  auto at = [&](double gamma, double g) {
    for (const auto& r : rows) {
      if (r.gamma == gamma && r.g == g) return r.mean_estimate;
    }
    return std::nan("");
  };
  bool ok = true;
  const double rise = at(0.0, 25.0) - at(0.0, 10.0);
  ok = ok && rise > 1.0;
  std::string detail = fmt("gamma 0 rise %.3f (> 1); ", rise);
  for (double gamma : {0.5, 1.0, 2.0}) {
    const double change = std::abs(at(gamma, 25.0) - at(gamma, 10.0));
    double spread = 0.0;
    for (const auto& r : rows) {
      if (r.gamma != gamma) continue;
      spread = std::max(spread, std::abs(r.mean_estimate - p.theta0));
      ok = ok && r.excluded == 0;
    }
    ok = ok && change < 0.1 && spread < 1.0;
    detail += fmt("gamma %.1f change %.4f (< 0.1), max |mean - theta0| %.3f (< 1); ", gamma,
                  change, spread);
  }
  return {ok, detail};
}

Outcome criterion_scan() {
  const int n = 1000;
  auto engine = dphide::substream(8, {static_cast<std::uint64_t>(n)});
  const auto sample = dphide::draw_contaminated(n, {0.0, 0.0, 10.0}, engine);
  const double root_n = std::sqrt(static_cast<double>(n));
  bool ok = true;
  std::string detail;
  for (auto rule : {dphide::LocationRule::sample_median, dphide::LocationRule::sample_mean}) {
    const dphide::EscortSpec spec{rule, 0.0, dphide::ScaleRule::fixed, 1.0};
    const double theta = dphide::resolve_escort_location(spec, sample);
    std::vector<double> alphas;
    for (int i = -1000; i <= 1000; ++i) alphas.push_back(theta + 1e-3 * i);
    const auto points = dphide::criterion_scan(sample, {0.0, 0.5, 1.0, 2.0}, theta, alphas);
    for (double g : {0.0, 0.5, 1.0, 2.0}) {
      double best = -INFINITY;
      double arg = 0.0;
      for (const auto& pt : points) {
        if (pt.gamma == g && pt.value > best) {
          best = pt.value;
          arg = pt.alpha;
        }
      }
      const bool cell_ok = std::abs(best) < 2.0 / root_n && std::abs(arg) < 3.0 / root_n;
      ok = ok && cell_ok;
      detail += std::string(rule == dphide::LocationRule::sample_median ? "median" : "mean") +
                fmt(" g=%.1f max %.2e argmax %.4f; ", g, best, arg);
    }
  }
  return {ok, detail + fmt("bounds %.4f / %.4f", 2.0 / root_n, 3.0 / root_n)};
}

}  // namespace

int main() {
  const struct {
    int id;
    const char* name;
    std::function<Outcome()> run;
  } criteria[] = {
      {1, "closed form vs quadrature", quadrature_equivalence},
      {2, "KLm estimate equals the sample mean", modified_kl_is_mle},
      {3, "Newcomb location-scale fits", newcomb},
      {4, "true-model MSE", true_model_mse},
      {5, "contaminated MSE and ordering", contaminated_mse},
      {6, "influence functions vs population oracle", influence_functions},
      {7, "empirical eps-influence curves", eps_influence},
      {8, "criterion scan at n = 1000", criterion_scan},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out{false, ""};
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d: %s -- %s [%.1f s]\n", out.pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str(), secs);
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
