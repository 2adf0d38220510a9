#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rfmatch/baselines.hpp"
#include "rfmatch/estimator.hpp"

namespace rfmatch {

struct BankSpec {
  int k = 0;  // 0 means the 2d+1 default for the chosen model
  int arity = 1;
  double freq_scale = 1.0;
  bool fixed_across_trials = true;
};

/// A replicated-trial experiment, parseable from a flat key = value file.
struct ExperimentPlan {
  std::string model;
  Eigen::VectorXd true_theta;
  std::vector<int> sample_sizes = {100};
  int trials = 100;
  BankSpec bank;
  ObjectiveConfig objective;
  AnnealSettings optimizer;
  bool baseline = false;
  std::uint64_t seed = 0;
  std::string output_prefix = "run";
  int burn_in = 0;

  void validate() const;  // throws ConfigError naming the offending key
};

/// Parse the plan format: `key = value` lines, `#` comments, comma-separated
/// lists. Unknown keys are rejected by name.
ExperimentPlan parse_plan(const std::string& text);

/// Rebuild the fully resolved plan recorded in a run manifest.
ExperimentPlan plan_from_manifest(const nlohmann::json& manifest);

struct TrialRecord {
  int trial_index = 0;
  int n = 0;
  Eigen::VectorXd theta_true;
  Eigen::VectorXd theta_hat;
  std::optional<Eigen::VectorXd> baseline_hat;
  double objective_value = 0.0;
  double wall_time = 0.0;  // seconds; kept out of the CSV on purpose
  std::string flags;
  bool failed = false;
};

struct ExperimentResult {
  std::vector<TrialRecord> records;  // ordered by (sample-size index, trial)
  std::string csv_text;              // exact bytes of the trials CSV
  nlohmann::json summary;            // per-n MSE / bias / variance (+ baseline)
  nlohmann::json manifest;           // enough to rerun byte-identically
};

/// Run every (n, trial) cell of the plan. Trials are farmed out to
/// `workers` threads (0 = RFMATCH_WORKERS env var, else hardware count);
/// output is byte-identical for any worker count. Per-trial failures become
/// flagged rows, excluded from summaries, counted in the manifest.
ExperimentResult run_experiment(const ExperimentPlan& plan, int workers = 0);

/// Axes for the comparison study; empty lists fall back to the plan's own
/// setting, so no axes means a plain single-configuration run.
struct DensityAxes {
  std::vector<int> arities;
  std::vector<ObjectiveVariant> variants;
};

/// Long-format estimates across {arity} x {objective} x {n} for external
/// density plotting. Data is shared across configurations within a trial so
/// the comparisons are paired.
ExperimentResult run_density_study(const ExperimentPlan& plan,
                                   const DensityAxes& axes, int workers = 0);

/// CSV of simulated feature means along a theta grid: one row per
/// (theta, feature index).
std::string run_feature_sweep(const ModelSpec& model, const FeatureBank& bank,
                              const std::vector<Eigen::VectorXd>& grid, int s,
                              int n, Stream& stream);

/// Shortest text that parses back to exactly this double.
std::string format_double(double x);

int worker_count_from_env();

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

/// Single-column CSV of reals, optional non-numeric header line.
Eigen::VectorXd read_series_csv(const std::string& path);

}  // namespace rfmatch
