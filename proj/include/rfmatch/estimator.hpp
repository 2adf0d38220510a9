#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rfmatch/anneal.hpp"
#include "rfmatch/features.hpp"
#include "rfmatch/models.hpp"
#include "rfmatch/rng.hpp"

namespace rfmatch {

enum class ObjectiveVariant { unweighted, weighted, wood };

/// CLI spelling: distance | weighted | wood.
ObjectiveVariant objective_variant_from_string(const std::string& name);
std::string to_string(ObjectiveVariant v);

struct ObjectiveConfig {
  ObjectiveVariant variant = ObjectiveVariant::unweighted;
  int s = 10;        // simulations per parameter value
  bool crn = true;   // reuse one uniform block for the whole optimization
  std::optional<Eigen::MatrixXd> weight_matrix;  // required for `weighted`
  double ridge = 1e-8;
};

/// Feature mean and replicate covariance at one theta.
struct SimulatedFeatures {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;  // unbiased over replicates; meaningful iff s >= 2
  int s_used = 0;

  bool has_covariance() const { return s_used >= 2; }
};

/// Average the feature map over s simulated runs. `block` is s x (n*m) with
/// one replicate per row; each row is consumed as an n x m matrix
/// (column-major: column j holds draw j of every step).
SimulatedFeatures simulate_features(const ModelSpec& model,
                                    const Eigen::VectorXd& theta, int n,
                                    const FeatureBank& bank, int s,
                                    const Eigen::Ref<const Eigen::MatrixXd>& block);

/// Same, drawing a fresh block from the stream.
SimulatedFeatures simulate_features(const ModelSpec& model,
                                    const Eigen::VectorXd& theta, int n,
                                    const FeatureBank& bank, int s,
                                    Stream& stream);

/// 0.5 * ||f_obs - mean||^2.
double objective_unweighted(const Eigen::VectorXd& f_obs,
                            const SimulatedFeatures& sim);

/// 0.5 * (f_obs - mean)' w (f_obs - mean); w must be symmetric
/// positive-definite.
double objective_weighted(const Eigen::VectorXd& f_obs,
                          const SimulatedFeatures& sim,
                          const Eigen::MatrixXd& w);

/// Negative log density of f_obs under N(mean, Sigma) with
/// Sigma = covariance * (1 + 1/s) + ridge * (trace/k) * I. The inflation
/// accounts for the mean itself being a noisy s-run average. Throws
/// EstimationError if Sigma stays singular after ridging.
double objective_wood(const Eigen::VectorXd& f_obs, const SimulatedFeatures& sim,
                      double ridge);

struct Diagnostics {
  bool boundary_hit = false;
  bool covariance_regularized = false;
  bool budget_exhausted = false;
};

struct EstimateReport {
  Eigen::VectorXd theta_hat;
  double objective_value = 0.0;
  std::string objective_variant;
  std::string feature_bank_id;
  int n = 0;
  int s = 0;
  SeedSpec seed;
  Diagnostics diagnostics;
  long evals_used = 0;
  std::vector<std::pair<long, double>> trace;
};

/// The full point-estimation pipeline: evaluate the observed features once,
/// then anneal theta -> discrepancy(F_obs, simulated features at theta).
/// With crn on, one uniform block is drawn up front and the objective is a
/// deterministic function of theta for the whole run.
EstimateReport estimate(const ModelSpec& model, const Trajectory& data,
                        const FeatureBank& bank, const ObjectiveConfig& config,
                        const AnnealSettings& settings, Stream& stream);

struct TwoStepReport {
  EstimateReport stage1;
  EstimateReport stage2;
  Eigen::MatrixXd weight;  // inverse of the inflated stage-1 covariance
};

/// Unweighted pilot estimate, then a weighted pass with
/// w = [cov(theta_tilde) * (1 + 1/s) + ridge * (trace/k) * I]^{-1}.
TwoStepReport estimate_two_step(const ModelSpec& model, const Trajectory& data,
                                const FeatureBank& bank,
                                const ObjectiveConfig& config,
                                const AnnealSettings& settings, Stream& stream);

}  // namespace rfmatch
