#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "rfmatch/estimator.hpp"

namespace rfmatch {

struct SandwichOptions {
  double fd_step = 1e-4;  // per-coordinate step is fd_step * max(1, |theta_j|)
  int s_deriv = 200;      // replicates for the Jacobian of the feature mean
  int s_var = 500;        // fresh replicates for Var F(X_n)
};

struct SandwichReport {
  Eigen::MatrixXd jacobian;          // k x d, d Phi / d theta at theta_hat
  Eigen::MatrixXd feature_variance;  // k x k, Var F(X_n) at theta_hat
  Eigen::MatrixXd covariance;        // d x d
  Eigen::VectorXd std_errors;
};

/// (g'g)^{-1} g' v g (g'g)^{-1}, inflated by (1 + 1/s) for the
/// estimation-stage simulation count. Exposed for the scalar reduction test
/// and for building covariances from externally obtained pieces.
Eigen::MatrixXd sandwich_from_parts(const Eigen::MatrixXd& g,
                                    const Eigen::MatrixXd& v, int s);

/// Plug-in asymptotic covariance at theta_hat: Jacobian by central
/// differences of the simulated feature mean (common random numbers across
/// the whole stencil), feature variance from fresh replicates. Throws
/// InputError if theta_hat is within one step of the box edge and
/// IdentifiabilityError if g'g is singular.
SandwichReport sandwich_covariance(const ModelSpec& model,
                                   const Eigen::VectorXd& theta_hat, int n,
                                   const FeatureBank& bank,
                                   const ObjectiveConfig& config,
                                   const SandwichOptions& options,
                                   Stream& stream);

struct BootstrapReport {
  Eigen::VectorXd std_errors;
  Eigen::VectorXd percentile_lo;  // 2.5%
  Eigen::VectorXd percentile_hi;  // 97.5%
  std::vector<Eigen::VectorXd> estimates;
  int n_failed = 0;
};

/// Parametric bootstrap: simulate B datasets at theta_hat, re-estimate each
/// with its own streams, take coordinate SDs and percentile intervals.
/// Re-estimates that throw are dropped and counted; more than 20% failures
/// raises EstimationError.
BootstrapReport bootstrap_se(const ModelSpec& model,
                             const Eigen::VectorXd& theta_hat, int n,
                             const FeatureBank& bank,
                             const ObjectiveConfig& config,
                             const AnnealSettings& settings, int B,
                             Stream& stream);

struct TestReport {
  double statistic = 0.0;
  std::vector<double> null_samples;
  double p_value = 1.0;
  // Wood-likelihood chi-squared supplement; quadratic form against
  // chi^2(k). Asymptotic, labeled approximate in all outputs.
  std::optional<double> chisq_statistic;
  std::optional<double> chisq_p_value;
};

/// Monte Carlo test of theta = theta0: the statistic is the configured
/// discrepancy at theta0, the null distribution is the same statistic on B
/// datasets simulated at theta0. p = (1 + #{null >= obs}) / (B + 1).
TestReport test_point_null(const ModelSpec& model,
                           const Eigen::VectorXd& theta0,
                           const Trajectory& data, const FeatureBank& bank,
                           const ObjectiveConfig& config, int B,
                           Stream& stream);

/// Same mechanics at theta_hat with a held-out bank drawn independently of
/// the estimation bank. Conservative because estimation noise is ignored.
/// Passing the estimation bank enables the disjointness check.
TestReport goodness_of_fit(const ModelSpec& model,
                           const Eigen::VectorXd& theta_hat,
                           const Trajectory& data,
                           const FeatureBank& holdout_bank,
                           const ObjectiveConfig& config, int B,
                           Stream& stream,
                           const FeatureBank* estimation_bank = nullptr);

struct EmbeddingThresholds {
  double min_separation_ratio = 1e-3;
  double min_jacobian_sv = 1e-3;
};

struct EmbeddingDiagnostic {
  std::vector<Eigen::VectorXd> grid;
  std::vector<Eigen::VectorXd> phi_values;
  double min_separation_ratio = 0.0;
  double jacobian_min_singular_value = 0.0;
  bool pass = false;
};

/// Numerical check that theta -> Phi(theta) is injective and immersive over
/// a grid: pairwise separation ratios plus finite-difference Jacobian
/// singular values, all computed on one shared uniform block so the map is
/// smooth in theta. A fail verdict is a result, not an error.
EmbeddingDiagnostic embedding_diagnostic(const ModelSpec& model,
                                         const std::vector<Eigen::VectorXd>& grid,
                                         int n, const FeatureBank& bank,
                                         int s_big, double fd_step,
                                         const EmbeddingThresholds& thresholds,
                                         Stream& stream);

/// Uniform grid with grid_size points per dimension over the box
/// (total capped at 10^4 points).
EmbeddingDiagnostic embedding_diagnostic(const ModelSpec& model,
                                         const ParamSpace& box, int grid_size,
                                         int n, const FeatureBank& bank,
                                         int s_big, double fd_step,
                                         const EmbeddingThresholds& thresholds,
                                         Stream& stream);

}  // namespace rfmatch
