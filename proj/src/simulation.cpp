#include "dphide/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "dphide/csv.hpp"
#include "dphide/errors.hpp"

namespace dphide {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::istringstream in(value);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    const double v = csv::parse_number(value);
    if (!std::isfinite(v)) throw InputError("");
    return v;
  } catch (const InputError&) {
    throw InputError("config: '" + key + "' expects a number, got '" + value + "'");
  }
}

long long parse_integer(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size()) {
    throw InputError("config: '" + key + "' expects an integer, got '" + value + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw InputError("config: '" + key + "' expects true/false, got '" + value + "'");
}

// Order: gamma_list then Huber.
std::vector<std::string> estimator_labels(const ExperimentConfig& config) {
  std::vector<std::string> labels;
  for (double g : config.gamma_list) labels.push_back(estimator_label(g));
  if (config.include_huber) labels.push_back(kHuberLabel);
  return labels;
}

// errors layout: [size][replication][estimator]
MseTable aggregate(const ExperimentConfig& config, const std::vector<double>& errors) {
  MseTable table(estimator_labels(config), config.sample_sizes);
  const std::size_t n_est = table.estimators().size();
  const std::size_t reps = static_cast<std::size_t>(config.replications);
  for (std::size_t s = 0; s < config.sample_sizes.size(); ++s) {
    for (std::size_t e = 0; e < n_est; ++e) {
      double sum = 0.0;
      double sum_sq = 0.0;
      int used = 0;
      for (std::size_t r = 0; r < reps; ++r) {
        const double v = errors[(s * reps + r) * n_est + e];
        if (std::isnan(v)) continue;
        sum += v;
        sum_sq += v * v;
        ++used;
      }
      MseCell& cell = table.at(e, s);
      cell.excluded = static_cast<int>(reps) - used;
      if (used == 0) {
        cell.mse = std::nan("");
        cell.mc_se = std::nan("");
        continue;
      }
      cell.mse = sum / used;
      if (used > 1) {
        const double var = std::max(0.0, (sum_sq - used * cell.mse * cell.mse) / (used - 1));
        cell.mc_se = std::sqrt(var / used);
      } else {
        cell.mc_se = 0.0;
      }
    }
  }
  return table;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (sample_sizes.empty()) throw InputError("at least one sample size is required");
  for (int n : sample_sizes) {
    if (n < 2) throw InputError("sample sizes must be at least 2");
  }
  if (replications < 1) throw InputError("replications must be at least 1");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw InputError("epsilon must lie in [0, 1)");
  }
  if (!std::isfinite(theta0) || !std::isfinite(outlier)) {
    throw InputError("theta0 and outlier must be finite");
  }
  if (gamma_list.empty() && !include_huber) {
    throw InputError("no estimators selected");
  }
  for (double g : gamma_list) {
    if (!std::isfinite(g)) throw InputError("gamma values must be finite");
  }
  if (!(huber_tau > 0.0)) throw InputError("huber_tau must be positive");
  if (escort == LocationRule::fixed) {
    throw InputError("simulation escort must be the sample mean or median");
  }
}

ExperimentConfig parse_experiment_config(std::istream& in, ExperimentConfig base) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InputError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "sample_sizes") {
      base.sample_sizes.clear();
      for (const auto& item : split_list(value)) {
        base.sample_sizes.push_back(static_cast<int>(parse_integer(key, item)));
      }
    } else if (key == "epsilon") {
      base.epsilon = parse_real(key, value);
    } else if (key == "theta0") {
      base.theta0 = parse_real(key, value);
    } else if (key == "outlier") {
      base.outlier = parse_real(key, value);
    } else if (key == "replications") {
      base.replications = static_cast<int>(parse_integer(key, value));
    } else if (key == "gamma") {
      base.gamma_list.clear();
      for (const auto& item : split_list(value)) base.gamma_list.push_back(parse_real(key, item));
    } else if (key == "include_huber") {
      base.include_huber = parse_bool(key, value);
    } else if (key == "huber_tau") {
      base.huber_tau = parse_real(key, value);
    } else if (key == "huber_scale") {
      if (value == "irls") base.huber_scale = HuberScale::irls;
      else if (value == "unit") base.huber_scale = HuberScale::unit;
      else throw InputError("config: huber_scale must be irls or unit");
    } else if (key == "escort") {
      if (value == "median") base.escort = LocationRule::sample_median;
      else if (value == "mean") base.escort = LocationRule::sample_mean;
      else throw InputError("config: escort must be median or mean");
    } else if (key == "seed") {
      base.seed = static_cast<std::uint64_t>(parse_integer(key, value));
    } else if (key == "kl_form") {
      if (value == "exact") base.estimator.kl_form = KlForm::exact;
      else if (value == "legacy") base.estimator.kl_form = KlForm::legacy;
      else throw InputError("config: kl_form must be exact or legacy");
    } else {
      throw InputError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
  }
  base.validate();
  return base;
}

ExperimentConfig load_experiment_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config file '" + path + "'");
  return parse_experiment_config(in, std::move(base));
}

std::vector<double> draw_contaminated(std::size_t n, const ContaminationModel& model,
                                      Engine& engine) {
  model.validate();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(model.theta0, 1.0);
  std::vector<double> sample(n);
  for (double& x : sample) {
    x = unit(engine) < model.epsilon ? model.outlier : normal(engine);
  }
  return sample;
}

MseTable::MseTable(std::vector<std::string> estimators, std::vector<int> sample_sizes)
    : estimators_(std::move(estimators)), sizes_(std::move(sample_sizes)) {
  cells_.reserve(estimators_.size() * sizes_.size());
  for (const auto& e : estimators_) {
    for (int n : sizes_) cells_.push_back({e, n, std::nan(""), std::nan(""), 0});
  }
}

MseCell& MseTable::at(std::size_t estimator_index, std::size_t size_index) {
  return cells_.at(estimator_index * sizes_.size() + size_index);
}

const MseCell& MseTable::at(std::size_t estimator_index, std::size_t size_index) const {
  return cells_.at(estimator_index * sizes_.size() + size_index);
}

const MseCell* MseTable::find(const std::string& estimator, int n) const {
  for (const auto& c : cells_) {
    if (c.estimator == estimator && c.n == n) return &c;
  }
  return nullptr;
}

int MseTable::total_excluded() const {
  int total = 0;
  for (const auto& c : cells_) total += c.excluded;
  return total;
}

bool operator==(const MseTable& a, const MseTable& b) {
  if (a.estimators_ != b.estimators_ || a.sizes_ != b.sizes_) return false;
  auto same = [](double x, double y) {
    return (std::isnan(x) && std::isnan(y)) || x == y;
  };
  for (std::size_t i = 0; i < a.cells_.size(); ++i) {
    const auto& x = a.cells_[i];
    const auto& y = b.cells_[i];
    if (!same(x.mse, y.mse) || !same(x.mc_se, y.mc_se) || x.excluded != y.excluded) {
      return false;
    }
  }
  return true;
}

std::string estimator_label(double gamma) { return csv::format_number(gamma); }

void write_mse_csv(std::ostream& out, const MseTable& table) {
  csv::write_row(out, {"estimator", "n", "mse", "mc_se"});
  for (const auto& c : table.cells()) {
    csv::write_row(out, {c.estimator, std::to_string(c.n), csv::format_number(c.mse),
                         csv::format_number(c.mc_se)});
  }
}

MseTable read_mse_csv(std::istream& in) {
  const auto rows = csv::read_rows(in);
  if (rows.empty() || rows.front().size() < 3 || rows.front()[0] != "estimator" ||
      rows.front()[1] != "n" || rows.front()[2] != "mse") {
    throw InputError("MSE table: expected header estimator,n,mse[,mc_se]");
  }
  std::vector<std::string> estimators;
  std::vector<int> sizes;
  struct Parsed { std::string e; int n; double mse; double se; };
  std::vector<Parsed> parsed;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() < 3 || r.size() > 4) {
      throw InputError("MSE table line " + std::to_string(i + 1) + ": wrong field count");
    }
    const double n_value = csv::parse_number(r[1]);
    if (!(n_value >= 1) || n_value != std::floor(n_value)) {
      throw InputError("MSE table line " + std::to_string(i + 1) + ": bad sample size");
    }
    const int n = static_cast<int>(n_value);
    parsed.push_back({r[0], n, csv::parse_number(r[2]),
                      r.size() == 4 ? csv::parse_number(r[3]) : std::nan("")});
    if (std::find(estimators.begin(), estimators.end(), r[0]) == estimators.end()) {
      estimators.push_back(r[0]);
    }
    if (std::find(sizes.begin(), sizes.end(), n) == sizes.end()) sizes.push_back(n);
  }
  if (parsed.size() != estimators.size() * sizes.size()) {
    throw InputError("MSE table: every estimator needs one row per sample size");
  }
  MseTable table(estimators, sizes);
  for (const auto& p : parsed) {
    const auto e = std::find(estimators.begin(), estimators.end(), p.e) - estimators.begin();
    const auto s = std::find(sizes.begin(), sizes.end(), p.n) - sizes.begin();
    MseCell& cell = table.at(static_cast<std::size_t>(e), static_cast<std::size_t>(s));
    if (!std::isnan(cell.mse)) {
      throw InputError("MSE table: duplicate row for " + p.e + ", n=" + std::to_string(p.n));
    }
    cell.mse = p.mse;
    cell.mc_se = p.se;
  }
  return table;
}

MseTable load_mse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read MSE table '" + path + "'");
  return read_mse_csv(in);
}

std::vector<double> replication_errors(const ExperimentConfig& config, int n,
                                       int replication) {
  Engine engine = substream(config.seed, {static_cast<std::uint64_t>(n),
                                          key_of(config.epsilon),
                                          static_cast<std::uint64_t>(replication)});
  const auto sample = draw_contaminated(static_cast<std::size_t>(n),
                                        config.contamination(), engine);
  const EscortSpec escort{config.escort, 0.0, ScaleRule::fixed, 1.0};
  const double theta = resolve_escort_location(escort, sample);

  std::vector<double> errors;
  errors.reserve(config.gamma_list.size() + 1);
  auto squared = [&](double estimate) {
    const double d = estimate - config.theta0;
    return d * d;
  };
  for (double g : config.gamma_list) {
    const auto fit = dphide_location_at(sample, PowerIndex(g), theta, config.estimator);
    errors.push_back(fit.converged ? squared(fit.alpha_hat) : std::nan(""));
  }
  if (config.include_huber) {
    if (config.huber_scale == HuberScale::unit) {
      errors.push_back(squared(huber_location(sample, config.huber_tau, 1.0)));
    } else {
      const auto fit = huber_location_irls(sample, config.huber_tau);
      errors.push_back(fit.converged ? squared(fit.location) : std::nan(""));
    }
  }
  return errors;
}

MseTable run_mse_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::size_t n_est = config.gamma_list.size() + (config.include_huber ? 1 : 0);
  const std::size_t reps = static_cast<std::size_t>(config.replications);
  const std::size_t units = config.sample_sizes.size() * reps;
  std::vector<double> errors(units * n_est);
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic, 8)
  for (std::size_t u = 0; u < units; ++u) {
    try {
      const std::size_t s = u / reps;
      const auto row = replication_errors(config, config.sample_sizes[s],
                                          static_cast<int>(u % reps));
      std::copy(row.begin(), row.end(), errors.begin() + static_cast<std::ptrdiff_t>(u * n_est));
    } catch (...) {
#pragma omp critical(dphide_simulation_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return aggregate(config, errors);
}

namespace reference {

MseTable run_mse_experiment(const ExperimentConfig& config) {
  config.validate();
  std::vector<double> errors;
  for (int n : config.sample_sizes) {
    for (int r = 0; r < config.replications; ++r) {
      const auto row = replication_errors(config, n, r);
      errors.insert(errors.end(), row.begin(), row.end());
    }
  }
  return aggregate(config, errors);
}

}  // namespace reference

bool ComparisonReport::all_within() const {
  return std::all_of(cells.begin(), cells.end(),
                     [](const CellDeviation& c) { return c.within_tolerance; });
}

void ComparisonReport::print(std::ostream& out) const {
  out << "estimator,n,value,reference,relative_deviation,status\n";
  for (const auto& c : cells) {
    out << c.estimator << ',' << c.n << ',' << csv::format_number(c.value) << ','
        << csv::format_number(c.reference) << ','
        << csv::format_number(c.relative_deviation) << ','
        << (c.within_tolerance ? "ok" : "OUTSIDE") << '\n';
  }
  out << (all_within() ? "all cells" : "some cells NOT")
      << " within relative tolerance " << csv::format_number(tolerance) << '\n';
}

ComparisonReport summarize(const MseTable& table, const MseTable& reference,
                           double tolerance) {
  if (!(tolerance >= 0.0)) throw InputError("tolerance must be nonnegative");
  ComparisonReport report{tolerance, {}};
  for (const auto& cell : table.cells()) {
    const MseCell* ref = reference.find(cell.estimator, cell.n);
    if (ref == nullptr) {
      throw KeyMismatchError("reference has no cell for estimator " + cell.estimator +
                             ", n=" + std::to_string(cell.n));
    }
    const double dev = ref->mse == cell.mse
                           ? 0.0
                           : std::abs(cell.mse - ref->mse) / std::abs(ref->mse);
    report.cells.push_back({cell.estimator, cell.n, cell.mse, ref->mse, dev,
                            dev <= tolerance});
  }
  for (const auto& ref : reference.cells()) {
    const auto& sizes = table.sample_sizes();
    if (std::find(sizes.begin(), sizes.end(), ref.n) == sizes.end()) continue;
    if (table.find(ref.estimator, ref.n) == nullptr) {
      throw KeyMismatchError("table has no cell for reference estimator " +
                             ref.estimator + ", n=" + std::to_string(ref.n));
    }
  }
  return report;
}

}  // namespace dphide
