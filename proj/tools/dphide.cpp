// Command-line front end: estimation on data files, the Newcomb fits, MSE
// simulations, influence functions and criterion scans. CSV goes to stdout
// or --out; diagnostics go to stderr.
//
// Exit codes: 0 success, 2 input error, 3 convergence failure,
// 4 reference-tolerance failure.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dphide/csv.hpp"
#include "dphide/dataset.hpp"
#include "dphide/errors.hpp"
#include "dphide/estimators.hpp"
#include "dphide/parallel.hpp"
#include "dphide/robustness.hpp"
#include "dphide/simulation.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitTolerance = 4;

using dphide::InputError;
using dphide::csv::format_number;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, sep)) parts.push_back(item);
  if (!text.empty() && text.back() == sep) parts.emplace_back();
  return parts;
}

double parse_finite(const std::string& text, const std::string& what) {
  double v = 0.0;
  try {
    v = dphide::csv::parse_number(text);
  } catch (const InputError&) {
    throw InputError(what + ": not a number: '" + text + "'");
  }
  if (!std::isfinite(v)) throw InputError(what + ": expected a finite number, got '" + text + "'");
  return v;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  for (const auto& item : split(text, ',')) out.push_back(parse_finite(item, what));
  if (out.empty()) throw InputError(what + ": empty list");
  return out;
}

// "a:b:step", inclusive of b up to rounding.
std::vector<double> parse_range(const std::string& text, const std::string& what) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw InputError(what + ": expected a:b:step, got '" + text + "'");
  const double a = parse_finite(parts[0], what);
  const double b = parse_finite(parts[1], what);
  const double step = parse_finite(parts[2], what);
  if (!(step > 0.0) || b < a) throw InputError(what + ": need a <= b and step > 0");
  const double count = std::floor((b - a) / step + 1e-9) + 1.0;
  if (count > 1e7) throw InputError(what + ": range has too many points");
  std::vector<double> out;
  for (int i = 0; i < static_cast<int>(count); ++i) out.push_back(a + step * i);
  return out;
}

std::vector<int> parse_sizes(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_list(text, "--n")) {
    if (v != std::floor(v) || v < 1 || v > 1e8) throw InputError("--n: sample sizes must be integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

dphide::KlForm parse_kl_form(const std::string& text) {
  if (text == "exact") return dphide::KlForm::exact;
  if (text == "legacy") return dphide::KlForm::legacy;
  throw InputError("--kl-form must be exact or legacy");
}

dphide::LocationRule parse_location_rule(const std::string& text) {
  if (text == "median") return dphide::LocationRule::sample_median;
  if (text == "mean") return dphide::LocationRule::sample_mean;
  throw InputError("--escort must be median or mean");
}

// "<loc>[,<scale>]" with loc in {median, mean, number} and scale in
// {mad, sd, number}. A missing scale pairs median with mad, mean with sd and
// a number with 1.
dphide::EscortSpec parse_escort(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.empty() || parts.size() > 2) throw InputError("--escort: expected loc[,scale]");
  dphide::EscortSpec spec;
  const std::string& loc = parts[0];
  if (loc == "median") {
    spec.location_rule = dphide::LocationRule::sample_median;
    spec.scale_rule = dphide::ScaleRule::normal_consistent_mad;
  } else if (loc == "mean") {
    spec.location_rule = dphide::LocationRule::sample_mean;
    spec.scale_rule = dphide::ScaleRule::sample_sd;
  } else {
    spec.location_rule = dphide::LocationRule::fixed;
    spec.location_value = parse_finite(loc, "--escort");
    spec.scale_rule = dphide::ScaleRule::fixed;
    spec.scale_value = 1.0;
  }
  if (parts.size() == 2) {
    const std::string& sc = parts[1];
    if (sc == "mad") {
      spec.scale_rule = dphide::ScaleRule::normal_consistent_mad;
    } else if (sc == "sd") {
      spec.scale_rule = dphide::ScaleRule::sample_sd;
    } else {
      spec.scale_rule = dphide::ScaleRule::fixed;
      spec.scale_value = parse_finite(sc, "--escort");
    }
  }
  spec.validate();
  return spec;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw InputError("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void apply_threads(int threads) {
  if (threads < 0) throw InputError("--threads must be nonnegative");
  if (threads == 0) threads = dphide::threads_from_environment();
  dphide::set_thread_count(threads);
}

struct DataSource {
  std::string file;
  std::string bundled;

  bool given() const { return !file.empty() || !bundled.empty(); }
  std::vector<double> load() const {
    if (!file.empty()) return dphide::load_values(file);
    return dphide::bundled_dataset(bundled);
  }
};

void add_source(CLI::App* cmd, DataSource& source) {
  auto* data = cmd->add_option("--data", source.file,
                               "File with one number per line ('#' starts a comment line)");
  auto* bundled = cmd->add_option("--bundled", source.bundled, "Bundled dataset: newcomb");
  data->excludes(bundled);
}

// estimate / newcomb ---------------------------------------------------------

struct EstimateArgs {
  DataSource source;
  std::string gamma = "0,0.5,1,2";
  std::string model = "location";
  std::string escort = "median,mad";
  std::string kl_form = "exact";
  bool global = false;
  std::string out;
};

int run_estimate(const EstimateArgs& args) {
  if (!args.source.given()) throw InputError("one of --data or --bundled is required");
  const auto sample = args.source.load();
  const auto gammas = parse_list(args.gamma, "--gamma");
  const auto escort = parse_escort(args.escort);
  if (args.model != "location" && args.model != "loc-scale") {
    throw InputError("--model must be location or loc-scale");
  }
  dphide::EstimatorOptions opts;
  opts.kl_form = parse_kl_form(args.kl_form);
  opts.global_scan = args.global;

  Output out(args.out);
  dphide::csv::write_row(out.stream(), {"gamma", "alpha_hat", "sigma_hat", "criterion", "converged"});
  bool all_converged = true;
  for (double g : gammas) {
    const auto fit = args.model == "location"
                         ? dphide::dphide_location(sample, dphide::PowerIndex(g), escort, opts)
                         : dphide::dphide_loc_scale(sample, dphide::PowerIndex(g), escort, opts);
    all_converged = all_converged && fit.converged;
    dphide::csv::write_row(out.stream(),
                           {format_number(g), format_number(fit.alpha_hat),
                            fit.sigma_hat ? format_number(*fit.sigma_hat) : "",
                            format_number(fit.criterion_at_max), fit.converged ? "1" : "0"});
  }
  if (!all_converged) {
    std::cerr << "error: at least one fit did not converge\n";
    return kExitConvergence;
  }
  return 0;
}

// simulate-mse ---------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  double eps = 0.0;
  std::string n;
  std::string gamma;
  int replications = 1000;
  std::uint64_t seed = 1;
  double theta0 = 0.0;
  double outlier = 10.0;
  bool no_huber = false;
  double tau = 1.4;
  std::string huber_scale = "irls";
  std::string escort = "median";
  std::string kl_form = "exact";
  std::string reference;
  double tol = 0.35;
  std::string out;
  int threads = 0;
  struct {
    CLI::Option *eps, *n, *gamma, *replications, *seed, *theta0, *outlier, *tau, *huber_scale,
        *escort, *kl_form;
  } given;
};

int run_simulate(const SimulateArgs& a) {
  apply_threads(a.threads);
  dphide::ExperimentConfig c;
  if (!a.config.empty()) c = dphide::load_experiment_config(a.config, c);
  if (a.given.eps->count()) c.epsilon = a.eps;
  if (a.given.n->count()) c.sample_sizes = parse_sizes(a.n);
  if (a.given.gamma->count()) c.gamma_list = parse_list(a.gamma, "--gamma");
  if (a.given.replications->count()) c.replications = a.replications;
  if (a.given.seed->count()) c.seed = a.seed;
  if (a.given.theta0->count()) c.theta0 = a.theta0;
  if (a.given.outlier->count()) c.outlier = a.outlier;
  if (a.no_huber) c.include_huber = false;
  if (a.given.tau->count()) c.huber_tau = a.tau;
  if (a.given.huber_scale->count()) {
    if (a.huber_scale == "irls") c.huber_scale = dphide::HuberScale::irls;
    else if (a.huber_scale == "unit") c.huber_scale = dphide::HuberScale::unit;
    else throw InputError("--huber-scale must be irls or unit");
  }
  if (a.given.escort->count()) c.escort = parse_location_rule(a.escort);
  if (a.given.kl_form->count()) c.estimator.kl_form = parse_kl_form(a.kl_form);
  c.validate();

  std::optional<dphide::MseTable> reference;
  if (!a.reference.empty()) reference = dphide::load_mse_csv(a.reference);
  if (!(a.tol >= 0.0)) throw InputError("--tol must be nonnegative");

  const auto table = dphide::run_mse_experiment(c);
  Output out(a.out);
  dphide::write_mse_csv(out.stream(), table);
  if (table.total_excluded() > 0) {
    std::cerr << "warning: " << table.total_excluded()
              << " non-converged replications were excluded\n";
  }
  if (reference) {
    const auto report = dphide::summarize(table, *reference, a.tol);
    report.print(std::cerr);
    if (!report.all_within()) return kExitTolerance;
  }
  return 0;
}

// influence ------------------------------------------------------------------

struct InfluenceArgs {
  std::string gamma = "0,0.5,1,2";
  double theta = 0.5;
  double theta0 = 0.0;
  std::string x;
  std::string x_range = "-10:10:0.1";
  std::string out;
};

int run_influence(const InfluenceArgs& a) {
  const auto gammas = parse_list(a.gamma, "--gamma");
  const auto xs = a.x.empty() ? parse_range(a.x_range, "--x-range") : parse_list(a.x, "--x");
  if (!std::isfinite(a.theta) || !std::isfinite(a.theta0)) {
    throw InputError("--theta and --theta0 must be finite");
  }
  Output out(a.out);
  dphide::csv::write_row(out.stream(), {"gamma", "x", "IF"});
  for (double g : gammas) {
    for (double x : xs) {
      const double v = dphide::influence_location({x, dphide::PowerIndex(g), a.theta, a.theta0});
      dphide::csv::write_row(out.stream(), {format_number(g), format_number(x), format_number(v)});
    }
  }
  return 0;
}

// eps-if ---------------------------------------------------------------------

struct EpsIfArgs {
  double eps = 0.1;
  int n = 100;
  double theta0 = 1.0;
  int replications = 1000;
  std::uint64_t seed = 1;
  std::string gamma = "0,0.5,1,2";
  std::string escort = "median";
  double grid_min = 0.01;
  double grid_max = 25.0;
  int grid_points = 50;
  std::string grid;
  std::string out;
  int threads = 0;
};

int run_eps_if(const EpsIfArgs& a) {
  apply_threads(a.threads);
  dphide::EpsIfProtocol p;
  p.epsilon = a.eps;
  p.n = a.n;
  p.theta0 = a.theta0;
  p.replications = a.replications;
  p.seed = a.seed;
  p.gamma_list = parse_list(a.gamma, "--gamma");
  p.escort = parse_location_rule(a.escort);
  p.grid = a.grid.empty() ? dphide::log_spaced_grid(a.grid_min, a.grid_max, a.grid_points)
                          : parse_list(a.grid, "--grid");
  const auto rows = dphide::empirical_eps_if(p);
  Output out(a.out);
  dphide::csv::write_row(out.stream(), {"gamma", "g", "mean_estimate", "mc_se"});
  int excluded = 0;
  for (const auto& r : rows) {
    excluded += r.excluded;
    dphide::csv::write_row(out.stream(), {format_number(r.gamma), format_number(r.g),
                                          format_number(r.mean_estimate), format_number(r.mc_se)});
  }
  if (excluded > 0) {
    std::cerr << "warning: " << excluded << " non-converged fits were excluded\n";
  }
  return 0;
}

// criterion-scan -------------------------------------------------------------

struct ScanArgs {
  DataSource source;
  int simulate = 1000;
  double theta0 = 0.0;
  double eps = 0.0;
  double outlier = 10.0;
  std::uint64_t seed = 1;
  std::string gamma = "0,0.5,1,2";
  std::string escort = "median";
  std::string alpha_range;
  std::string kl_form = "exact";
  std::string out;
};

int run_scan(const ScanArgs& a) {
  std::vector<double> sample;
  if (a.source.given()) {
    sample = a.source.load();
  } else {
    if (a.simulate < 1) throw InputError("--simulate must be at least 1");
    const dphide::ContaminationModel model{a.eps, a.theta0, a.outlier};
    if (!(a.eps >= 0.0 && a.eps <= 1.0)) throw InputError("--eps must lie in [0, 1]");
    model.validate();
    auto engine = dphide::substream(a.seed, {static_cast<std::uint64_t>(a.simulate)});
    sample = dphide::draw_contaminated(static_cast<std::size_t>(a.simulate), model, engine);
  }
  const auto spec = parse_escort(a.escort);
  const double theta = dphide::resolve_escort_location(spec, sample);
  const auto alphas = a.alpha_range.empty()
                          ? parse_range(format_number(theta - 5.0) + ":" +
                                            format_number(theta + 5.0) + ":0.01",
                                        "--alpha-range")
                          : parse_range(a.alpha_range, "--alpha-range");
  const auto points = dphide::criterion_scan(sample, parse_list(a.gamma, "--gamma"), theta, alphas,
                                             parse_kl_form(a.kl_form));
  Output out(a.out);
  dphide::csv::write_row(out.stream(), {"gamma", "alpha", "criterion"});
  for (const auto& p : points) {
    dphide::csv::write_row(out.stream(),
                           {format_number(p.gamma), format_number(p.alpha), format_number(p.value)});
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dual phi-divergence estimators for the normal model"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Fit DphiDEs to a data file or bundled dataset");
  add_source(estimate, est.source);
  estimate->add_option("--gamma", est.gamma, "Comma-separated divergence indices")
      ->capture_default_str();
  estimate->add_option("--model", est.model, "location (unit variance) or loc-scale")
      ->capture_default_str();
  estimate->add_option("--escort", est.escort,
                       "Escort as loc[,scale]: median,mad | mean,sd | numbers")
      ->capture_default_str();
  estimate->add_option("--kl-form", est.kl_form, "gamma = 1 criterion: exact or legacy")
      ->capture_default_str();
  estimate->add_flag("--global", est.global, "Coarse 41-point pre-scan before local search");
  estimate->add_option("--out", est.out, "Output CSV path (default stdout)");

  EstimateArgs nc;
  nc.source.bundled = "newcomb";
  nc.model = "loc-scale";
  nc.kl_form = "legacy";
  auto* newcomb = app.add_subcommand(
      "newcomb", "Location-scale fits to the bundled Newcomb light-speed data");
  newcomb->add_option("--gamma", nc.gamma, "Comma-separated divergence indices")
      ->capture_default_str();
  newcomb->add_option("--escort", nc.escort, "Escort as loc[,scale]")->capture_default_str();
  newcomb->add_option("--kl-form", nc.kl_form,
                      "gamma = 1 criterion; legacy reproduces the historical fits")
      ->capture_default_str();
  newcomb->add_option("--out", nc.out, "Output CSV path (default stdout)");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand(
      "simulate-mse", "Monte-Carlo MSE table under (1-eps) N(theta0,1) + eps delta_outlier");
  simulate->add_option("--config", sim.config, "key = value config file; flags override it");
  sim.given.eps = simulate->add_option("--eps", sim.eps, "Contamination fraction")
                      ->capture_default_str();
  sim.given.n = simulate->add_option("--n", sim.n, "Sample sizes (default 25,50,75,100,150,200)");
  sim.given.gamma = simulate->add_option("--gamma", sim.gamma, "Divergence indices (default 0,0.5,1,2)");
  sim.given.replications =
      simulate->add_option("--replications", sim.replications, "Replications per sample size")
          ->capture_default_str();
  sim.given.seed = simulate->add_option("--seed", sim.seed, "Seed")->capture_default_str();
  sim.given.theta0 = simulate->add_option("--theta0", sim.theta0, "True location")
                         ->capture_default_str();
  sim.given.outlier = simulate->add_option("--outlier", sim.outlier, "Contamination point")
                          ->capture_default_str();
  simulate->add_flag("--no-huber", sim.no_huber, "Leave out the Huber M-estimator");
  sim.given.tau = simulate->add_option("--tau", sim.tau, "Huber tuning constant")
                      ->capture_default_str();
  sim.given.huber_scale =
      simulate->add_option("--huber-scale", sim.huber_scale,
                           "irls (concurrent Huber scale) or unit (scale fixed at 1)")
          ->capture_default_str();
  sim.given.escort = simulate->add_option("--escort", sim.escort, "median or mean")
                         ->capture_default_str();
  sim.given.kl_form = simulate->add_option("--kl-form", sim.kl_form, "exact or legacy")
                          ->capture_default_str();
  simulate->add_option("--reference", sim.reference, "Reference CSV (estimator,n,mse[,mc_se])");
  simulate->add_option("--tol", sim.tol, "Relative tolerance against --reference")
      ->capture_default_str();
  simulate->add_option("--out", sim.out, "Output CSV path (default stdout)");
  simulate->add_option("--threads", sim.threads,
                       "Worker threads; 0 uses DPHIDE_THREADS or all cores")
      ->capture_default_str();

  InfluenceArgs inf;
  auto* influence = app.add_subcommand("influence", "Influence function of the location DphiDE");
  influence->add_option("--gamma", inf.gamma, "Divergence indices")->capture_default_str();
  influence->add_option("--theta", inf.theta, "Escort value")->capture_default_str();
  influence->add_option("--theta0", inf.theta0, "True location")->capture_default_str();
  auto* x_opt = influence->add_option("--x", inf.x, "Contamination point(s), comma-separated");
  influence->add_option("--x-range", inf.x_range, "a:b:step grid of contamination points")
      ->capture_default_str()
      ->excludes(x_opt);
  influence->add_option("--out", inf.out, "Output CSV path (default stdout)");

  EpsIfArgs eif;
  auto* eps_if = app.add_subcommand(
      "eps-if", "Empirical eps-influence curves: the largest eps*n points moved to g");
  eps_if->add_option("--eps", eif.eps, "Fraction of order statistics replaced")
      ->capture_default_str();
  eps_if->add_option("--n", eif.n, "Sample size")->capture_default_str();
  eps_if->add_option("--theta0", eif.theta0, "True location")->capture_default_str();
  eps_if->add_option("--replications", eif.replications, "Replications")->capture_default_str();
  eps_if->add_option("--seed", eif.seed, "Seed")->capture_default_str();
  eps_if->add_option("--gamma", eif.gamma, "Divergence indices")->capture_default_str();
  eps_if->add_option("--escort", eif.escort, "median or mean")->capture_default_str();
  eps_if->add_option("--grid-min", eif.grid_min, "Smallest g")->capture_default_str();
  eps_if->add_option("--grid-max", eif.grid_max, "Largest g")->capture_default_str();
  eps_if->add_option("--grid-points", eif.grid_points, "Log-spaced grid size")
      ->capture_default_str();
  eps_if->add_option("--grid", eif.grid, "Explicit increasing grid, comma-separated");
  eps_if->add_option("--out", eif.out, "Output CSV path (default stdout)");
  eps_if->add_option("--threads", eif.threads, "Worker threads; 0 uses DPHIDE_THREADS or all cores")
      ->capture_default_str();

  ScanArgs sc;
  auto* scan = app.add_subcommand(
      "criterion-scan", "Location criterion P_n h(theta, alpha) over a grid of alpha");
  add_source(scan, sc.source);
  scan->add_option("--simulate", sc.simulate, "Simulated sample size when no data is given")
      ->capture_default_str();
  scan->add_option("--theta0", sc.theta0, "Simulation location")->capture_default_str();
  scan->add_option("--eps", sc.eps, "Simulation contamination fraction")->capture_default_str();
  scan->add_option("--outlier", sc.outlier, "Simulation contamination point")
      ->capture_default_str();
  scan->add_option("--seed", sc.seed, "Simulation seed")->capture_default_str();
  scan->add_option("--gamma", sc.gamma, "Divergence indices")->capture_default_str();
  scan->add_option("--escort", sc.escort, "median, mean or a number")->capture_default_str();
  scan->add_option("--alpha-range", sc.alpha_range,
                   "a:b:step (default escort-5:escort+5:0.01)");
  scan->add_option("--kl-form", sc.kl_form, "exact or legacy")->capture_default_str();
  scan->add_option("--out", sc.out, "Output CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*estimate) return run_estimate(est);
    if (*newcomb) return run_estimate(nc);
    if (*simulate) return run_simulate(sim);
    if (*influence) return run_influence(inf);
    if (*eps_if) return run_eps_if(eif);
    if (*scan) return run_scan(sc);
  } catch (const dphide::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConvergence;
  } catch (const dphide::KeyMismatchError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
