#include "rfmatch/inference.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "rfmatch/stats.hpp"

namespace rfmatch {

namespace {

constexpr std::uint32_t kJacobianLane = 1;
constexpr std::uint32_t kVarianceLane = 2;
constexpr std::uint32_t kObservedLane = 3;
constexpr std::uint32_t kNullBase = 0x4e554c4cu;
constexpr std::uint32_t kBootBase = 0x424f4f54u;

Eigen::MatrixXd ridged(const Eigen::MatrixXd& cov, int s, double ridge) {
  Eigen::MatrixXd sigma = cov * (1.0 + 1.0 / static_cast<double>(s));
  sigma.diagonal().array() +=
      ridge * sigma.trace() / static_cast<double>(cov.rows());
  return sigma;
}

double discrepancy(const Eigen::VectorXd& f_obs, const SimulatedFeatures& sim,
                   const ObjectiveConfig& config) {
  switch (config.variant) {
    case ObjectiveVariant::unweighted:
      return objective_unweighted(f_obs, sim);
    case ObjectiveVariant::weighted:
      return objective_weighted(f_obs, sim, *config.weight_matrix);
    case ObjectiveVariant::wood:
      return objective_wood(f_obs, sim, config.ridge);
  }
  return 0.0;
}

// Feature mean Jacobian by central differences over a shared uniform block.
// The stencil center is pulled inside `box` when a grid point sits on the
// boundary.
Eigen::MatrixXd fd_jacobian(const ModelSpec& model, const Eigen::VectorXd& theta,
                            int n, const FeatureBank& bank,
                            const Eigen::MatrixXd& block, double fd_step,
                            const ParamSpace& box) {
  const int d = static_cast<int>(theta.size());
  const int s = static_cast<int>(block.rows());
  Eigen::MatrixXd jac(bank.k, d);
  for (int j = 0; j < d; ++j) {
    const double h = fd_step * std::max(1.0, std::abs(theta(j)));
    Eigen::VectorXd lo = theta, hi = theta;
    const double center =
        std::clamp(theta(j), box.lower(j) + h, box.upper(j) - h);
    hi(j) = center + h;
    lo(j) = center - h;
    const Eigen::VectorXd phi_hi =
        simulate_features(model, hi, n, bank, s, block).mean;
    const Eigen::VectorXd phi_lo =
        simulate_features(model, lo, n, bank, s, block).mean;
    jac.col(j) = (phi_hi - phi_lo) / (2.0 * h);
  }
  return jac;
}

}  // namespace

Eigen::MatrixXd sandwich_from_parts(const Eigen::MatrixXd& g,
                                    const Eigen::MatrixXd& v, int s) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) <= 1e-12 * std::max(1.0, sv(0)))
    throw IdentifiabilityError(
        "sandwich: feature Jacobian is rank-deficient; the parameters are not "
        "locally identified by this bank (see the embedding diagnostic)");
  const Eigen::MatrixXd gtg_inv =
      (g.transpose() * g)
          .ldlt()
          .solve(Eigen::MatrixXd::Identity(g.cols(), g.cols()));
  Eigen::MatrixXd cov = gtg_inv * g.transpose() * v * g * gtg_inv;
  cov *= 1.0 + 1.0 / static_cast<double>(s);
  return ((cov + cov.transpose()) / 2.0).eval();
}

SandwichReport sandwich_covariance(const ModelSpec& model,
                                   const Eigen::VectorXd& theta_hat, int n,
                                   const FeatureBank& bank,
                                   const ObjectiveConfig& config,
                                   const SandwichOptions& options,
                                   Stream& stream) {
  const int d = model.box.dim();
  if (theta_hat.size() != d)
    throw InputError("sandwich: theta has the wrong dimension");
  for (int j = 0; j < d; ++j) {
    const double h = options.fd_step * std::max(1.0, std::abs(theta_hat(j)));
    if (theta_hat(j) - h < model.box.lower(j) ||
        theta_hat(j) + h > model.box.upper(j))
      throw InputError(
          "sandwich: theta must be interior to the box by at least one "
          "finite-difference step in every coordinate");
  }

  Stream jac_stream = stream.child(kJacobianLane);
  const Eigen::MatrixXd jac_block =
      draw_uniform_block(jac_stream, options.s_deriv, n * model.draws_per_step);
  const Eigen::MatrixXd g = fd_jacobian(model, theta_hat, n, bank, jac_block,
                                        options.fd_step, model.box);

  Stream var_stream = stream.child(kVarianceLane);
  const SimulatedFeatures at_hat =
      simulate_features(model, theta_hat, n, bank, options.s_var, var_stream);

  SandwichReport report;
  report.jacobian = g;
  report.feature_variance = at_hat.covariance;
  report.covariance = sandwich_from_parts(g, at_hat.covariance, config.s);
  report.std_errors = report.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  return report;
}

BootstrapReport bootstrap_se(const ModelSpec& model,
                             const Eigen::VectorXd& theta_hat, int n,
                             const FeatureBank& bank,
                             const ObjectiveConfig& config,
                             const AnnealSettings& settings, int B,
                             Stream& stream) {
  if (B < 2) throw InputError("bootstrap: B must be >= 2");
  const int d = static_cast<int>(theta_hat.size());

  BootstrapReport report;
  for (int b = 0; b < B; ++b) {
    Stream rep = stream.child(kBootBase + static_cast<std::uint32_t>(b));
    try {
      Stream data_stream = rep.child(0);
      const Eigen::MatrixXd block =
          draw_uniform_block(data_stream, n, model.draws_per_step);
      Trajectory data;
      data.values = model.simulate(theta_hat, n, block);
      data.theta_used = theta_hat;
      Stream est_stream = rep.child(1);
      report.estimates.push_back(
          estimate(model, data, bank, config, settings, est_stream).theta_hat);
    } catch (const std::exception&) {
      ++report.n_failed;
    }
  }
  if (report.n_failed > B / 5)
    throw EstimationError("bootstrap: more than 20% of re-estimates failed");
  if (report.estimates.size() < 2)
    throw EstimationError("bootstrap: fewer than two usable re-estimates");

  report.std_errors.resize(d);
  report.percentile_lo.resize(d);
  report.percentile_hi.resize(d);
  for (int j = 0; j < d; ++j) {
    std::vector<double> coord;
    coord.reserve(report.estimates.size());
    for (const auto& est : report.estimates) coord.push_back(est(j));
    report.std_errors(j) = std::sqrt(sample_variance(coord));
    report.percentile_lo(j) = percentile(coord, 0.025);
    report.percentile_hi(j) = percentile(coord, 0.975);
  }
  return report;
}

namespace {

TestReport monte_carlo_test(const ModelSpec& model, const Eigen::VectorXd& theta,
                            const Trajectory& data, const FeatureBank& bank,
                            const ObjectiveConfig& config, int B,
                            Stream& stream) {
  if (B < 19) throw InputError("monte carlo test: B must be >= 19");
  const int n = static_cast<int>(data.values.size());
  const Eigen::VectorXd f_obs = eval_features(bank, data.values);

  Stream obs_stream = stream.child(kObservedLane);
  const SimulatedFeatures obs_sim =
      simulate_features(model, theta, n, bank, config.s, obs_stream);

  TestReport report;
  report.statistic = discrepancy(f_obs, obs_sim, config);

  report.null_samples.reserve(B);
  int count_ge = 0;
  for (int b = 0; b < B; ++b) {
    Stream rep = stream.child(kNullBase + static_cast<std::uint32_t>(b));
    Stream data_stream = rep.child(0);
    const Eigen::MatrixXd block =
        draw_uniform_block(data_stream, n, model.draws_per_step);
    const Eigen::VectorXd series = model.simulate(theta, n, block);
    Stream sim_stream = rep.child(1);
    const SimulatedFeatures sim =
        simulate_features(model, theta, n, bank, config.s, sim_stream);
    const double stat = discrepancy(eval_features(bank, series), sim, config);
    report.null_samples.push_back(stat);
    if (stat >= report.statistic) ++count_ge;
  }
  report.p_value = (1.0 + count_ge) / static_cast<double>(B + 1);

  // Asymptotic chi-squared supplement from the Wood approximation
  // (quadratic form only); approximate by construction.
  if (obs_sim.has_covariance()) {
    const Eigen::MatrixXd sigma =
        ridged(obs_sim.covariance, obs_sim.s_used, config.ridge);
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() == Eigen::Success) {
      const Eigen::VectorXd diff = f_obs - obs_sim.mean;
      const double quad = diff.dot(llt.solve(diff));
      report.chisq_statistic = quad;
      report.chisq_p_value = chi_squared_sf(quad, static_cast<double>(bank.k));
    }
  }
  return report;
}

}  // namespace

TestReport test_point_null(const ModelSpec& model,
                           const Eigen::VectorXd& theta0,
                           const Trajectory& data, const FeatureBank& bank,
                           const ObjectiveConfig& config, int B,
                           Stream& stream) {
  return monte_carlo_test(model, theta0, data, bank, config, B, stream);
}

TestReport goodness_of_fit(const ModelSpec& model,
                           const Eigen::VectorXd& theta_hat,
                           const Trajectory& data,
                           const FeatureBank& holdout_bank,
                           const ObjectiveConfig& config, int B, Stream& stream,
                           const FeatureBank* estimation_bank) {
  if (estimation_bank && same_bank(holdout_bank, *estimation_bank))
    throw ConfigError(
        "goodness_of_fit: held-out bank must differ from the estimation bank");
  return monte_carlo_test(model, theta_hat, data, holdout_bank, config, B,
                          stream);
}

EmbeddingDiagnostic embedding_diagnostic(const ModelSpec& model,
                                         const std::vector<Eigen::VectorXd>& grid,
                                         int n, const FeatureBank& bank,
                                         int s_big, double fd_step,
                                         const EmbeddingThresholds& thresholds,
                                         Stream& stream) {
  if (grid.size() < 2)
    throw InputError("embedding diagnostic: grid needs at least two points");
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = i + 1; j < grid.size(); ++j)
      if ((grid[i] - grid[j]).norm() == 0.0)
        throw InputError("embedding diagnostic: grid points must be distinct");

  Stream block_stream = stream.child(kJacobianLane);
  const Eigen::MatrixXd block =
      draw_uniform_block(block_stream, s_big, n * model.draws_per_step);

  EmbeddingDiagnostic diag;
  diag.grid = grid;
  diag.phi_values.reserve(grid.size());
  for (const auto& theta : grid)
    diag.phi_values.push_back(
        simulate_features(model, theta, n, bank, s_big, block).mean);

  diag.min_separation_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      const double ratio = (diag.phi_values[i] - diag.phi_values[j]).norm() /
                           (grid[i] - grid[j]).norm();
      diag.min_separation_ratio = std::min(diag.min_separation_ratio, ratio);
    }

  diag.jacobian_min_singular_value = std::numeric_limits<double>::infinity();
  for (const auto& theta : grid) {
    const Eigen::MatrixXd jac =
        fd_jacobian(model, theta, n, bank, block, fd_step, model.box);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
    diag.jacobian_min_singular_value =
        std::min(diag.jacobian_min_singular_value,
                 svd.singularValues()(svd.singularValues().size() - 1));
  }

  diag.pass = diag.min_separation_ratio >= thresholds.min_separation_ratio &&
              diag.jacobian_min_singular_value >= thresholds.min_jacobian_sv;
  return diag;
}

EmbeddingDiagnostic embedding_diagnostic(const ModelSpec& model,
                                         const ParamSpace& box, int grid_size,
                                         int n, const FeatureBank& bank,
                                         int s_big, double fd_step,
                                         const EmbeddingThresholds& thresholds,
                                         Stream& stream) {
  box.validate();
  if (grid_size < 2)
    throw InputError("embedding diagnostic: grid_size must be >= 2");
  const int d = box.dim();
  double total = 1.0;
  for (int j = 0; j < d; ++j) total *= grid_size;
  if (total > 1e4)
    throw ConfigError("embedding diagnostic: grid larger than 10^4 points");

  std::vector<Eigen::VectorXd> grid;
  std::vector<int> idx(d, 0);
  while (true) {
    Eigen::VectorXd theta(d);
    for (int j = 0; j < d; ++j)
      theta(j) = box.lower(j) + (box.upper(j) - box.lower(j)) * idx[j] /
                                    static_cast<double>(grid_size - 1);
    grid.push_back(theta);
    int j = 0;
    for (; j < d; ++j) {
      if (++idx[j] < grid_size) break;
      idx[j] = 0;
    }
    if (j == d) break;
  }
  return embedding_diagnostic(model, grid, n, bank, s_big, fd_step, thresholds,
                              stream);
}

}  // namespace rfmatch
