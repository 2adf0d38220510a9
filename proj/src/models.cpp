#include "rfmatch/models.hpp"

#include <cmath>

#include "rfmatch/stats.hpp"

namespace rfmatch {

bool ParamSpace::contains(const Eigen::Ref<const Eigen::VectorXd>& theta) const {
  if (theta.size() != lower.size()) return false;
  return (theta.array() >= lower.array()).all() &&
         (theta.array() <= upper.array()).all();
}

void ParamSpace::validate() const {
  if (lower.size() < 1) throw ConfigError("parameter space must have dimension >= 1");
  if (upper.size() != lower.size() ||
      static_cast<Eigen::Index>(names.size()) != lower.size())
    throw ConfigError("parameter space bounds and names must have equal length");
  if (!(lower.array() < upper.array()).all())
    throw ConfigError("parameter box needs lower < upper in every coordinate");
}

namespace {

ParamSpace box1(double lo, double hi, std::string name) {
  ParamSpace box;
  box.lower = Eigen::VectorXd::Constant(1, lo);
  box.upper = Eigen::VectorXd::Constant(1, hi);
  box.names = {std::move(name)};
  return box;
}

void check_uniforms(int n, int m, const Eigen::Ref<const Eigen::MatrixXd>& u) {
  if (u.rows() != n || u.cols() != m)
    throw InputError("uniform block has the wrong shape for this model");
}

double logistic_step(double r, double s) { return 4.0 * r * s * (1.0 - s); }

Eigen::VectorXd logistic_states(double r, int n, double s1, int burn_in) {
  double s = s1;
  for (int b = 0; b < burn_in; ++b) s = logistic_step(r, s);
  Eigen::VectorXd out(n);
  out(0) = s;
  for (int t = 1; t < n; ++t) out(t) = logistic_step(r, out(t - 1));
  return out;
}

}  // namespace

ModelSpec make_gaussian_location() {
  ModelSpec model;
  model.id = "gaussian-location";
  model.box = box1(-10.0, 10.0, "mu");
  model.draws_per_step = 1;
  model.simulate = [](const Eigen::VectorXd& theta, int n,
                      const Eigen::Ref<const Eigen::MatrixXd>& u) {
    check_uniforms(n, 1, u);
    const double mu = theta(0);
    Eigen::VectorXd out(n);
    for (int t = 0; t < n; ++t) out(t) = mu + normal_quantile(u(t, 0));
    return out;
  };
  return model;
}

ModelSpec make_t_location() {
  ModelSpec model;
  model.id = "t-location";
  model.box = box1(-10.0, 10.0, "mu");
  model.draws_per_step = 1;
  model.simulate = [](const Eigen::VectorXd& theta, int n,
                      const Eigen::Ref<const Eigen::MatrixXd>& u) {
    check_uniforms(n, 1, u);
    const double mu = theta(0);
    Eigen::VectorXd out(n);
    for (int t = 0; t < n; ++t) out(t) = mu + student_t_quantile(u(t, 0), 5.0);
    return out;
  };
  return model;
}

ModelSpec make_logistic_map(int burn_in) {
  ModelSpec model;
  model.id = "logistic-map";
  model.box = box1(0.0, 1.0, "r");
  model.draws_per_step = 1;
  model.simulate = [burn_in](const Eigen::VectorXd& theta, int n,
                             const Eigen::Ref<const Eigen::MatrixXd>& u) {
    check_uniforms(n, 1, u);
    const double r = theta(0);
    if (r < 0.0 || r > 1.0)
      throw ParameterError("logistic-map: r must lie in [0,1]");
    return logistic_states(r, n, u(0, 0), burn_in);
  };
  return model;
}

ModelSpec make_noisy_logistic(int burn_in) {
  ModelSpec model;
  model.id = "noisy-logistic";
  model.box.lower = Eigen::Vector2d(0.0, 0.01);
  model.box.upper = Eigen::Vector2d(1.0, 1.0);
  model.box.names = {"r", "sigma"};
  model.draws_per_step = 2;
  model.simulate = [burn_in](const Eigen::VectorXd& theta, int n,
                             const Eigen::Ref<const Eigen::MatrixXd>& u) {
    check_uniforms(n, 2, u);
    const double r = theta(0);
    const double sigma = theta(1);
    if (r < 0.0 || r > 1.0)
      throw ParameterError("noisy-logistic: r must lie in [0,1]");
    if (!(sigma > 0.0))
      throw ParameterError("noisy-logistic: sigma must be positive");
    Eigen::VectorXd states = logistic_states(r, n, u(0, 0), burn_in);
    Eigen::VectorXd out(n);
    for (int t = 0; t < n; ++t)
      out(t) = states(t) + sigma * normal_quantile(u(t, 1));
    return out;
  };
  return model;
}

ModelSpec make_model(const std::string& id, int burn_in) {
  if (id == "gaussian-location") return make_gaussian_location();
  if (id == "t-location") return make_t_location();
  if (id == "logistic-map") return make_logistic_map(burn_in);
  if (id == "noisy-logistic") return make_noisy_logistic(burn_in);
  throw ConfigError("unknown model id `" + id + "`");
}

std::vector<std::string> registered_models() {
  return {"gaussian-location", "t-location", "logistic-map", "noisy-logistic"};
}

Trajectory simulate_trajectory(const ModelSpec& model,
                               const Eigen::VectorXd& theta, int n,
                               const SeedSpec& seed) {
  if (n < 1) throw InputError("trajectory length must be >= 1");
  Stream stream = derive_stream(seed);
  const Eigen::MatrixXd block = stream.uniform_block(n, model.draws_per_step);
  Trajectory traj;
  traj.values = model.simulate(theta, n, block);
  traj.theta_used = theta;
  traj.seed = seed;
  return traj;
}

}  // namespace rfmatch
