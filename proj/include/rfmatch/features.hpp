#pragma once

#include <string>

#include <Eigen/Core>
#include <json.hpp>

#include "rfmatch/errors.hpp"
#include "rfmatch/rng.hpp"

namespace rfmatch {

/// A drawn random-feature map: k averaged cosines with Gaussian frequencies
/// and uniform phases. Banks are immutable once drawn; everything needed to
/// replay an estimate is in here.
struct FeatureBank {
  int k = 0;
  int arity = 1;                 // 1 = marginal features, 2 = lag-1 pairs
  Eigen::MatrixXd frequencies;   // k x arity
  Eigen::VectorXd phases;        // k, in (-pi, pi)
};

/// Draw a bank from the stream: per feature, `arity` Normal(0, freq_scale^2)
/// frequencies followed by one Uniform(-pi, pi) phase. The per-feature order
/// means a bank of k+1 features drawn from the same stream state extends the
/// k-feature bank.
FeatureBank draw_bank(int k, int arity, double freq_scale, Stream& stream);

/// F_i = (1/n) sum_t cos(Omega_i x_t + alpha_i).
Eigen::VectorXd eval_univariate(const FeatureBank& bank,
                                const Eigen::Ref<const Eigen::VectorXd>& series);

/// F_i = (1/(n-1)) sum_t cos(Omega_i1 x_t + Omega_i2 x_{t+1} + alpha_i).
Eigen::VectorXd eval_bivariate(const FeatureBank& bank,
                               const Eigen::Ref<const Eigen::VectorXd>& series);

/// Dispatch on bank.arity.
Eigen::VectorXd eval_features(const FeatureBank& bank,
                              const Eigen::Ref<const Eigen::VectorXd>& series);

bool same_bank(const FeatureBank& a, const FeatureBank& b);

/// Short hex id derived from the bank contents, for reports and manifests.
std::string bank_fingerprint(const FeatureBank& bank);

nlohmann::json bank_to_json(const FeatureBank& bank);
FeatureBank bank_from_json(const nlohmann::json& j);

}  // namespace rfmatch
