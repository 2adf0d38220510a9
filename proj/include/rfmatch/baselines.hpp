#pragma once

#include <string>

#include <Eigen/Core>

namespace rfmatch {

struct BaselineResult {
  Eigen::VectorXd theta_hat;
  std::string method;  // closed-form-mle | numeric-mle
};

/// Sample mean; the MLE for the Gaussian location family.
BaselineResult gaussian_mle(const Eigen::Ref<const Eigen::VectorXd>& series);

/// Location MLE for X = mu + t_df by bracketed one-dimensional search
/// around the sample median; |mu| resolved to 1e-8.
BaselineResult t_location_mle(const Eigen::Ref<const Eigen::VectorXd>& series,
                              double df = 5.0);

/// True for the location families; the dynamical models have no usable MLE.
bool has_mle_baseline(const std::string& model_id);

/// Dispatch by model id; throws ConfigError if the model has no baseline.
BaselineResult run_baseline(const std::string& model_id,
                            const Eigen::Ref<const Eigen::VectorXd>& series);

}  // namespace rfmatch
