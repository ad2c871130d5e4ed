#pragma once

// Monte-Carlo MSE experiments for the normal location model under the
// point-mass contamination (1 - eps) N(theta0, 1) + eps delta_outlier.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dphide/estimators.hpp"
#include "dphide/normal_model.hpp"
#include "dphide/rng.hpp"

namespace dphide {

/// Scale used inside the Huber baseline.
enum class HuberScale {
  irls,  // concurrent winsorized-variance scale (huber_location_irls)
  unit,  // fixed scale 1 (huber_location)
};

struct ExperimentConfig {
  std::vector<int> sample_sizes{25, 50, 75, 100, 150, 200};
  double epsilon = 0.0;
  double theta0 = 0.0;
  double outlier = 10.0;
  int replications = 1000;
  std::vector<double> gamma_list{0.0, 0.5, 1.0, 2.0};
  bool include_huber = true;
  double huber_tau = 1.4;
  HuberScale huber_scale = HuberScale::irls;
  LocationRule escort = LocationRule::sample_median;
  std::uint64_t seed = 1;
  EstimatorOptions estimator{};

  void validate() const;
  ContaminationModel contamination() const { return {epsilon, theta0, outlier}; }
};

/// Reads `key = value` lines ('#' starts a comment) on top of `base`.
/// Keys: sample_sizes, epsilon, theta0, outlier, replications, gamma,
/// include_huber, huber_tau, huber_scale, escort, seed, kl_form.
ExperimentConfig parse_experiment_config(std::istream& in,
                                         ExperimentConfig base = {});
ExperimentConfig load_experiment_config(const std::string& path,
                                        ExperimentConfig base = {});

/// Each point is the outlier with probability epsilon, else N(theta0, 1).
std::vector<double> draw_contaminated(std::size_t n,
                                      const ContaminationModel& model,
                                      Engine& engine);

struct MseCell {
  std::string estimator;  // formatted gamma, or "huber"
  int n;
  double mse;
  double mc_se;    // NaN when unknown (reference tables)
  int excluded = 0;  // replications dropped for non-convergence
};

class MseTable {
 public:
  MseTable() = default;
  MseTable(std::vector<std::string> estimators, std::vector<int> sample_sizes);

  const std::vector<std::string>& estimators() const { return estimators_; }
  const std::vector<int>& sample_sizes() const { return sizes_; }
  const std::vector<MseCell>& cells() const { return cells_; }

  MseCell& at(std::size_t estimator_index, std::size_t size_index);
  const MseCell& at(std::size_t estimator_index, std::size_t size_index) const;
  const MseCell* find(const std::string& estimator, int n) const;
  int total_excluded() const;

  friend bool operator==(const MseTable&, const MseTable&);

 private:
  std::vector<std::string> estimators_;
  std::vector<int> sizes_;
  std::vector<MseCell> cells_;  // estimator-major
};

/// Row label used for a DphiDE with index gamma.
std::string estimator_label(double gamma);
inline const std::string kHuberLabel = "huber";

/// CSV with header estimator,n,mse,mc_se.
void write_mse_csv(std::ostream& out, const MseTable& table);
MseTable read_mse_csv(std::istream& in);
MseTable load_mse_csv(const std::string& path);

/// Squared errors of every estimator for one replication of one sample
/// size; NaN marks a non-converged estimate. Order: gamma_list, then Huber.
std::vector<double> replication_errors(const ExperimentConfig& config, int n,
                                       int replication);

/// OpenMP over (n, replication); bit-identical to reference::run_mse_experiment.
MseTable run_mse_experiment(const ExperimentConfig& config);

namespace reference {
MseTable run_mse_experiment(const ExperimentConfig& config);
}

struct CellDeviation {
  std::string estimator;
  int n;
  double value;
  double reference;
  double relative_deviation;
  bool within_tolerance;
};

struct ComparisonReport {
  double tolerance;
  std::vector<CellDeviation> cells;

  bool all_within() const;
  void print(std::ostream& out) const;
};

/// Per-cell |value - reference| / |reference| over the table's sample sizes.
/// Every table cell needs a reference cell and every reference cell at one
/// of the table's sample sizes needs a table cell; otherwise KeyMismatchError.
ComparisonReport summarize(const MseTable& table, const MseTable& reference,
                           double tolerance);

}  // namespace dphide
