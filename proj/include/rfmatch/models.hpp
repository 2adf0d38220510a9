#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rfmatch/errors.hpp"
#include "rfmatch/rng.hpp"

namespace rfmatch {

/// Box-shaped parameter space.
struct ParamSpace {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::vector<std::string> names;

  int dim() const { return static_cast<int>(lower.size()); }
  bool contains(const Eigen::Ref<const Eigen::VectorXd>& theta) const;
  void validate() const;  // lower < upper elementwise, d >= 1
};

/// A generative model the estimator can "run forward". simulate must be a
/// pure function of (theta, n, uniforms): identical inputs give identical
/// output, which is what makes common random numbers work. uniforms is an
/// n x draws_per_step matrix in [0,1).
struct ModelSpec {
  std::string id;
  ParamSpace box;
  int draws_per_step = 1;
  std::function<Eigen::VectorXd(const Eigen::VectorXd& theta, int n,
                                const Eigen::Ref<const Eigen::MatrixXd>& uniforms)>
      simulate;
};

/// One simulated or observed series plus how it was produced.
struct Trajectory {
  Eigen::VectorXd values;
  Eigen::VectorXd theta_used;
  SeedSpec seed;
};

// The four benchmark models. theta layouts:
//   gaussian-location: (mu), X_t = mu + z_t,  z iid N(0,1)
//   t-location:        (mu), X_t = mu + t_t,  t iid Student-t(5)
//   logistic-map:      (r),  S_{t+1} = 4 r S_t (1-S_t), S_1 ~ Unif(0,1)
//   noisy-logistic:    (r, sigma), Y_t = S_t + sigma z_t
ModelSpec make_gaussian_location();
ModelSpec make_t_location();
ModelSpec make_logistic_map(int burn_in = 0);
ModelSpec make_noisy_logistic(int burn_in = 0);

/// Registry lookup; throws ConfigError naming the id when unknown.
ModelSpec make_model(const std::string& id, int burn_in = 0);
std::vector<std::string> registered_models();

/// Simulate a dataset at theta from its own seed path.
Trajectory simulate_trajectory(const ModelSpec& model,
                               const Eigen::VectorXd& theta, int n,
                               const SeedSpec& seed);

}  // namespace rfmatch
