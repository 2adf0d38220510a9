#include "rfmatch/estimator.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

namespace rfmatch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Child labels off the stream handed to estimate(); every consumer gets its
// own lane so results are pure functions of the incoming stream.
constexpr std::uint32_t kSimLane = 1;
constexpr std::uint32_t kOptLane = 2;
constexpr std::uint32_t kWeightLane = 3;
constexpr std::uint32_t kStageTwoLane = 4;

Eigen::MatrixXd ridged_covariance(const SimulatedFeatures& sim, double ridge) {
  const auto k = sim.mean.size();
  Eigen::MatrixXd sigma =
      sim.covariance * (1.0 + 1.0 / static_cast<double>(sim.s_used));
  const double bump = ridge * sigma.trace() / static_cast<double>(k);
  sigma.diagonal().array() += bump;
  return sigma;
}

void check_dims(const Eigen::VectorXd& f_obs, const SimulatedFeatures& sim) {
  if (f_obs.size() != sim.mean.size())
    throw InputError("objective: observed and simulated feature sizes differ");
}

}  // namespace

ObjectiveVariant objective_variant_from_string(const std::string& name) {
  if (name == "distance") return ObjectiveVariant::unweighted;
  if (name == "weighted") return ObjectiveVariant::weighted;
  if (name == "wood") return ObjectiveVariant::wood;
  throw ConfigError("unknown objective `" + name +
                    "` (expected distance, weighted or wood)");
}

std::string to_string(ObjectiveVariant v) {
  switch (v) {
    case ObjectiveVariant::unweighted: return "distance";
    case ObjectiveVariant::weighted: return "weighted";
    case ObjectiveVariant::wood: return "wood";
  }
  return "distance";
}

SimulatedFeatures simulate_features(const ModelSpec& model,
                                    const Eigen::VectorXd& theta, int n,
                                    const FeatureBank& bank, int s,
                                    const Eigen::Ref<const Eigen::MatrixXd>& block) {
  if (s < 1) throw InputError("simulate_features: s must be >= 1");
  if (n < 1) throw InputError("simulate_features: n must be >= 1");
  const int m = model.draws_per_step;
  if (block.rows() != s || block.cols() != static_cast<Eigen::Index>(n) * m)
    throw InputError("simulate_features: block must be s x (n*m)");

  Eigen::MatrixXd per_replicate(bank.k, s);
  Eigen::VectorXd flat(static_cast<Eigen::Index>(n) * m);
  for (int r = 0; r < s; ++r) {
    flat = block.row(r).transpose();
    Eigen::Map<const Eigen::MatrixXd> uniforms(flat.data(), n, m);
    const Eigen::VectorXd series = model.simulate(theta, n, uniforms);
    per_replicate.col(r) = eval_features(bank, series);
  }

  SimulatedFeatures sim;
  sim.s_used = s;
  // Left-to-right accumulation, fixed order for bit reproducibility.
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(bank.k);
  for (int r = 0; r < s; ++r) sum += per_replicate.col(r);
  sim.mean = sum / static_cast<double>(s);
  if (s >= 2) {
    Eigen::MatrixXd centered = per_replicate.colwise() - sim.mean;
    sim.covariance = centered * centered.transpose() / static_cast<double>(s - 1);
  } else {
    sim.covariance.resize(0, 0);
  }
  return sim;
}

SimulatedFeatures simulate_features(const ModelSpec& model,
                                    const Eigen::VectorXd& theta, int n,
                                    const FeatureBank& bank, int s,
                                    Stream& stream) {
  const Eigen::MatrixXd block =
      draw_uniform_block(stream, s, n * model.draws_per_step);
  return simulate_features(model, theta, n, bank, s, block);
}

double objective_unweighted(const Eigen::VectorXd& f_obs,
                            const SimulatedFeatures& sim) {
  check_dims(f_obs, sim);
  return 0.5 * (f_obs - sim.mean).squaredNorm();
}

double objective_weighted(const Eigen::VectorXd& f_obs,
                          const SimulatedFeatures& sim,
                          const Eigen::MatrixXd& w) {
  check_dims(f_obs, sim);
  const auto k = f_obs.size();
  if (w.rows() != k || w.cols() != k)
    throw ConfigError("weight matrix must be k x k");
  const double scale = w.cwiseAbs().maxCoeff();
  if (!w.isApprox(w.transpose(), 1e-10))
    throw ConfigError("weight matrix must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(w);
  if (scale <= 0.0 || llt.info() != Eigen::Success)
    throw ConfigError("weight matrix must be positive-definite");
  const Eigen::VectorXd diff = f_obs - sim.mean;
  return 0.5 * diff.dot(w * diff);
}

double objective_wood(const Eigen::VectorXd& f_obs, const SimulatedFeatures& sim,
                      double ridge) {
  check_dims(f_obs, sim);
  if (!sim.has_covariance())
    throw EstimationError("wood objective needs s >= 2 for a feature covariance");
  const auto k = f_obs.size();
  const Eigen::MatrixXd sigma = ridged_covariance(sim, ridge);
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw EstimationError(
        "wood objective: feature covariance is singular even after ridging");
  const Eigen::VectorXd diff = f_obs - sim.mean;
  const double quad = diff.dot(llt.solve(diff));
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < k; ++i)
    logdet += 2.0 * std::log(llt.matrixL()(i, i));
  return 0.5 * (static_cast<double>(k) * std::log(2.0 * M_PI) + logdet + quad);
}

namespace {

struct ObjectiveContext {
  const ModelSpec& model;
  const FeatureBank& bank;
  const ObjectiveConfig& config;
  Eigen::VectorXd f_obs;
  int n;
  Eigen::MatrixXd crn_block;  // empty when crn is off
  Stream fresh;               // consumed only when crn is off
  bool singular_seen = false;

  double operator()(const Eigen::VectorXd& theta) {
    SimulatedFeatures sim =
        config.crn
            ? simulate_features(model, theta, n, bank, config.s, crn_block)
            : simulate_features(model, theta, n, bank, config.s, fresh);
    switch (config.variant) {
      case ObjectiveVariant::unweighted:
        return objective_unweighted(f_obs, sim);
      case ObjectiveVariant::weighted:
        return objective_weighted(f_obs, sim, *config.weight_matrix);
      case ObjectiveVariant::wood:
        try {
          return objective_wood(f_obs, sim, config.ridge);
        } catch (const EstimationError&) {
          singular_seen = true;
          return kInf;
        }
    }
    return kInf;
  }
};

void validate_estimate_inputs(const Trajectory& data, const FeatureBank& bank,
                              const ObjectiveConfig& config) {
  if (data.values.size() < 1) throw InputError("estimate: empty data series");
  if (bank.arity == 2 && data.values.size() < 2)
    throw InputError("estimate: bivariate features need n >= 2");
  if (config.s < 1) throw ConfigError("estimate: s must be >= 1");
  if (config.variant == ObjectiveVariant::weighted && !config.weight_matrix)
    throw ConfigError("estimate: weighted objective needs a weight matrix");
  if (config.variant == ObjectiveVariant::wood && config.s < 2)
    throw ConfigError("estimate: wood objective needs s >= 2");
  if (config.ridge < 0.0) throw ConfigError("estimate: ridge must be >= 0");
}

}  // namespace

EstimateReport estimate(const ModelSpec& model, const Trajectory& data,
                        const FeatureBank& bank, const ObjectiveConfig& config,
                        const AnnealSettings& settings, Stream& stream) {
  validate_estimate_inputs(data, bank, config);
  const int n = static_cast<int>(data.values.size());

  ObjectiveContext objective{model,    bank, config, eval_features(bank, data.values),
                             n,        {},   stream.child(kSimLane),
                             false};
  if (config.crn) {
    Stream block_stream = stream.child(kSimLane);
    objective.crn_block =
        draw_uniform_block(block_stream, config.s, n * model.draws_per_step);
  }

  Stream opt_stream = stream.child(kOptLane);
  AnnealResult opt = minimize(
      [&objective](const Eigen::VectorXd& theta) { return objective(theta); },
      model.box, settings, opt_stream);

  EstimateReport report;
  report.theta_hat = opt.x_best;
  report.objective_value = opt.f_best;
  report.objective_variant = to_string(config.variant);
  report.feature_bank_id = bank_fingerprint(bank);
  report.n = n;
  report.s = config.s;
  report.seed = data.seed;
  report.evals_used = opt.evals_used;
  report.trace = std::move(opt.trace);
  report.diagnostics.budget_exhausted =
      !opt.converged && opt.evals_used >= settings.max_evals;
  report.diagnostics.covariance_regularized = objective.singular_seen;
  for (int i = 0; i < model.box.dim(); ++i) {
    const double range = model.box.upper(i) - model.box.lower(i);
    if (opt.x_best(i) - model.box.lower(i) <= 1e-9 * range ||
        model.box.upper(i) - opt.x_best(i) <= 1e-9 * range)
      report.diagnostics.boundary_hit = true;
  }

  // For the wood variant, note whether the ridge was load-bearing at the
  // solution: the unridged, inflated covariance alone failing to factor
  // means the reported objective depended on the regularizer.
  if (config.variant == ObjectiveVariant::wood) {
    SimulatedFeatures sim =
        config.crn
            ? simulate_features(model, report.theta_hat, n, bank, config.s,
                                objective.crn_block)
            : SimulatedFeatures{};
    if (config.crn && sim.has_covariance()) {
      Eigen::MatrixXd raw =
          sim.covariance * (1.0 + 1.0 / static_cast<double>(sim.s_used));
      Eigen::LLT<Eigen::MatrixXd> llt(raw);
      if (llt.info() != Eigen::Success)
        report.diagnostics.covariance_regularized = true;
    }
  }
  return report;
}

TwoStepReport estimate_two_step(const ModelSpec& model, const Trajectory& data,
                                const FeatureBank& bank,
                                const ObjectiveConfig& config,
                                const AnnealSettings& settings,
                                Stream& stream) {
  if (config.s < 2)
    throw ConfigError("two-step estimation needs s >= 2 for the weight matrix");

  ObjectiveConfig stage1_config = config;
  stage1_config.variant = ObjectiveVariant::unweighted;
  stage1_config.weight_matrix.reset();
  Stream stage1_stream = stream.child(kSimLane);
  EstimateReport stage1 =
      estimate(model, data, bank, stage1_config, settings, stage1_stream);

  // Weight from the replicate covariance at the pilot estimate, inflated for
  // simulation noise and ridged exactly like the wood objective.
  Stream weight_stream = stream.child(kWeightLane);
  const int n = static_cast<int>(data.values.size());
  SimulatedFeatures pilot = simulate_features(model, stage1.theta_hat, n, bank,
                                              config.s, weight_stream);
  const Eigen::MatrixXd sigma = ridged_covariance(pilot, config.ridge);
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw EstimationError(
        "two-step: pilot feature covariance is singular even after ridging");
  Eigen::MatrixXd w =
      llt.solve(Eigen::MatrixXd::Identity(bank.k, bank.k));
  w = ((w + w.transpose()) / 2.0).eval();

  ObjectiveConfig stage2_config = config;
  stage2_config.variant = ObjectiveVariant::weighted;
  stage2_config.weight_matrix = w;
  Stream stage2_stream = stream.child(kStageTwoLane);
  EstimateReport stage2 =
      estimate(model, data, bank, stage2_config, settings, stage2_stream);

  TwoStepReport report;
  report.stage1 = std::move(stage1);
  report.stage2 = std::move(stage2);
  report.weight = std::move(w);
  return report;
}

}  // namespace rfmatch
