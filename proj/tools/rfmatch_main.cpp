// rfmatch: likelihood-free estimation by matching random Fourier features.

#include <cstdint>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rfmatch/baselines.hpp"
#include "rfmatch/harness.hpp"
#include "rfmatch/inference.hpp"
#include "rfmatch/version.hpp"

namespace {

using nlohmann::json;
using namespace rfmatch;

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

json report_to_json(const EstimateReport& report) {
  json j;
  j["theta_hat"] = vector_to_json(report.theta_hat);
  j["objective_value"] = report.objective_value;
  j["objective"] = report.objective_variant;
  j["feature_bank_id"] = report.feature_bank_id;
  j["n"] = report.n;
  j["s"] = report.s;
  j["evals_used"] = report.evals_used;
  j["diagnostics"] = {
      {"boundary_hit", report.diagnostics.boundary_hit},
      {"covariance_regularized", report.diagnostics.covariance_regularized},
      {"budget_exhausted", report.diagnostics.budget_exhausted}};
  if (!report.trace.empty()) {
    json trace = json::array();
    for (const auto& [eval, value] : report.trace)
      trace.push_back({{"eval", eval}, {"f_best", value}});
    j["trace"] = trace;
  }
  return j;
}

json test_report_to_json(const TestReport& report) {
  json j;
  j["statistic"] = report.statistic;
  j["p_value"] = report.p_value;
  j["B"] = report.null_samples.size();
  j["null_samples"] = report.null_samples;
  if (report.chisq_statistic) {
    j["chisq_statistic_approx"] = *report.chisq_statistic;
    j["chisq_p_value_approx"] = *report.chisq_p_value;
  }
  return j;
}

Eigen::VectorXd parse_theta(const std::string& text) {
  std::vector<double> values;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ','))
    values.push_back(std::stod(item));
  if (values.empty()) throw ConfigError("empty theta list");
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<Eigen::Index>(values.size()));
}

// "lo:hi:count" per coordinate, comma-separated across coordinates.
std::vector<Eigen::VectorXd> parse_grid(const std::string& text, int dim) {
  std::vector<double> lo, hi;
  std::vector<int> count;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto c1 = item.find(':');
    const auto c2 = item.rfind(':');
    if (c1 == std::string::npos || c2 == c1)
      throw ConfigError("grid spec must be lo:hi:count per coordinate");
    lo.push_back(std::stod(item.substr(0, c1)));
    hi.push_back(std::stod(item.substr(c1 + 1, c2 - c1 - 1)));
    count.push_back(std::stoi(item.substr(c2 + 1)));
    if (count.back() < 1) throw ConfigError("grid count must be >= 1");
  }
  if (static_cast<int>(lo.size()) != dim)
    throw ConfigError("grid spec needs one lo:hi:count range per coordinate");
  std::vector<Eigen::VectorXd> grid;
  std::vector<int> idx(dim, 0);
  while (true) {
    Eigen::VectorXd theta(dim);
    for (int j = 0; j < dim; ++j)
      theta(j) = count[j] == 1 ? lo[j]
                               : lo[j] + (hi[j] - lo[j]) * idx[j] /
                                             static_cast<double>(count[j] - 1);
    grid.push_back(theta);
    int j = 0;
    for (; j < dim; ++j) {
      if (++idx[j] < count[j]) break;
      idx[j] = 0;
    }
    if (j == dim) break;
  }
  return grid;
}

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty())
    std::cout << j.dump(2) << std::endl;
  else
    write_text_file(out_path, j.dump(2) + "\n");
}

// Options shared by the data-driven subcommands.
struct CommonOpts {
  std::string model;
  std::uint64_t seed = 0;
  int k = 0;  // 0 -> 2d+1
  int arity = 1;
  double freq_scale = 1.0;
  std::string objective = "distance";
  int s = 10;
  std::string crn = "on";
  double ridge = 1e-8;
  long max_evals = 10000;
  int restarts = 2;
  std::string polish = "on";
  int burn_in = 0;

  void attach(CLI::App* cmd, bool with_optimizer = true,
              bool allow_weighted = false) {
    cmd->add_option("--model", model, "model id")
        ->required()
        ->check(CLI::IsMember(registered_models()));
    cmd->add_option("--seed", seed, "master seed (u64)")->required();
    cmd->add_option("--k", k, "feature count (default 2d+1)");
    cmd->add_option("--arity", arity, "1 = univariate, 2 = bivariate")
        ->check(CLI::IsMember({1, 2}));
    cmd->add_option("--freq-scale", freq_scale, "frequency scale");
    cmd->add_option("--objective", objective,
                    allow_weighted ? "distance | weighted | wood"
                                   : "distance | wood")
        ->check(allow_weighted
                    ? CLI::IsMember({"distance", "weighted", "wood"})
                    : CLI::IsMember({"distance", "wood"}));
    cmd->add_option("--s", s, "simulations per parameter value");
    cmd->add_option("--crn", crn, "common random numbers on/off")
        ->check(CLI::IsMember({"on", "off"}));
    cmd->add_option("--ridge", ridge, "covariance ridge");
    cmd->add_option("--burn-in", burn_in, "logistic-map burn-in steps");
    if (with_optimizer) {
      cmd->add_option("--max-evals", max_evals, "objective evaluation budget");
      cmd->add_option("--restarts", restarts, "annealing restarts");
      cmd->add_option("--polish", polish, "golden-section polish on/off")
          ->check(CLI::IsMember({"on", "off"}));
    }
  }

  ModelSpec make() const { return make_model(model, burn_in); }

  int resolved_k(const ModelSpec& spec) const {
    return k > 0 ? k : 2 * spec.box.dim() + 1;
  }

  FeatureBank bank(const ModelSpec& spec) const {
    Stream stream = derive_stream(
        {seed, {purpose::bank, static_cast<std::uint32_t>(arity)}});
    return draw_bank(resolved_k(spec), arity, freq_scale, stream);
  }

  ObjectiveConfig objective_config() const {
    ObjectiveConfig config;
    config.variant = objective_variant_from_string(objective);
    config.s = s;
    config.crn = crn == "on";
    config.ridge = ridge;
    return config;
  }

  AnnealSettings anneal_settings() const {
    AnnealSettings settings;
    settings.max_evals = max_evals;
    settings.restarts = restarts;
    settings.local_polish = polish == "on";
    return settings;
  }
};

int run(int argc, char** argv) {
  CLI::App app{"simulation-based inference by matching random Fourier features"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // ---- estimate ----
  auto* est_cmd = app.add_subcommand("estimate", "fit a model to observed data");
  CommonOpts est;
  est.attach(est_cmd, /*with_optimizer=*/true, /*allow_weighted=*/true);
  std::string est_data, est_out;
  bool est_two_step = false, est_sandwich = false;
  int est_bootstrap = 0;
  est_cmd->add_option("--data", est_data, "single-column CSV of the series")
      ->required();
  est_cmd->add_flag("--two-step", est_two_step, "weighted second stage");
  est_cmd->add_flag("--sandwich", est_sandwich, "attach sandwich SEs");
  est_cmd->add_option("--bootstrap", est_bootstrap,
                      "attach bootstrap SEs from B re-estimates");
  est_cmd->add_option("--out", est_out, "write the report here");

  // ---- simulate ----
  auto* sim_cmd = app.add_subcommand("simulate", "generate data from a model");
  CommonOpts sim;
  sim.attach(sim_cmd, /*with_optimizer=*/false);
  std::string sim_theta, sim_out;
  int sim_n = 100;
  sim_cmd->add_option("--true-theta", sim_theta, "comma-separated theta")
      ->required();
  sim_cmd->add_option("--n", sim_n, "series length");
  sim_cmd->add_option("--out", sim_out, "output CSV path")->required();

  // ---- experiment ----
  auto* exp_cmd = app.add_subcommand("experiment", "run a replicated-trial plan");
  std::string exp_plan, exp_manifest;
  int exp_workers = 0;
  exp_cmd->add_option("--plan", exp_plan, "plan file (key = value lines)");
  exp_cmd->add_option("--from-manifest", exp_manifest,
                      "rerun a recorded manifest byte-identically");
  exp_cmd->add_option("--workers", exp_workers,
                      "worker threads (default: RFMATCH_WORKERS or cores)");

  // ---- density ----
  auto* den_cmd =
      app.add_subcommand("density", "comparison study for density plots");
  std::string den_plan, den_arities = "1,2", den_objectives = "distance";
  int den_workers = 0;
  den_cmd->add_option("--plan", den_plan, "plan file")->required();
  den_cmd->add_option("--arities", den_arities, "comma list of feature arities");
  den_cmd->add_option("--objectives", den_objectives,
                      "comma list of objectives");
  den_cmd->add_option("--workers", den_workers, "worker threads");

  // ---- sweep ----
  auto* sweep_cmd =
      app.add_subcommand("sweep", "simulated feature means along a theta grid");
  CommonOpts sweep;
  sweep.attach(sweep_cmd, /*with_optimizer=*/false);
  std::string sweep_grid, sweep_out;
  int sweep_n = 100;
  sweep_cmd->add_option("--grid", sweep_grid, "lo:hi:count per coordinate")
      ->required();
  sweep_cmd->add_option("--n", sweep_n, "trajectory length");
  sweep_cmd->add_option("--out", sweep_out, "output CSV path")->required();

  // ---- test ----
  auto* test_cmd = app.add_subcommand("test", "Monte Carlo test of theta = theta0");
  CommonOpts test;
  test.attach(test_cmd, /*with_optimizer=*/false);
  std::string test_data, test_theta0, test_out;
  int test_B = 99;
  test_cmd->add_option("--data", test_data, "observed series CSV")->required();
  test_cmd->add_option("--theta0", test_theta0, "null parameter value")
      ->required();
  test_cmd->add_option("--B", test_B, "null simulations");
  test_cmd->add_option("--out", test_out, "write the report here");

  // ---- gof ----
  auto* gof_cmd =
      app.add_subcommand("gof", "goodness-of-fit with held-out features");
  CommonOpts gof;
  gof.attach(gof_cmd);
  std::string gof_data, gof_theta, gof_out;
  int gof_B = 99, gof_holdout_k = 0;
  gof_cmd->add_option("--data", gof_data, "observed series CSV")->required();
  gof_cmd->add_option("--theta-hat", gof_theta,
                      "fitted theta (omit to estimate first)");
  gof_cmd->add_option("--B", gof_B, "null simulations");
  gof_cmd->add_option("--holdout-k", gof_holdout_k,
                      "held-out feature count (default: estimation k)");
  gof_cmd->add_option("--out", gof_out, "write the report here");

  // ---- diagnose ----
  auto* diag_cmd =
      app.add_subcommand("diagnose", "numerical embedding diagnostic");
  CommonOpts diag;
  diag.attach(diag_cmd, /*with_optimizer=*/false);
  int diag_grid = 50, diag_n = 100, diag_sbig = 200;
  double diag_fd = 1e-4;
  std::string diag_thresholds, diag_out, diag_box;
  diag_cmd->add_option("--grid", diag_grid, "grid points per dimension");
  diag_cmd->add_option("--n", diag_n, "trajectory length");
  diag_cmd->add_option("--s-big", diag_sbig, "simulations per grid point");
  diag_cmd->add_option("--fd-step", diag_fd, "finite-difference step");
  diag_cmd->add_option("--thresholds", diag_thresholds,
                       "separation,sv acceptance thresholds");
  diag_cmd->add_option("--box", diag_box,
                       "lo:hi per coordinate (default: the model box)");
  diag_cmd->add_option("--out", diag_out, "write the report here");

  CLI11_PARSE(app, argc, argv);

  if (est_cmd->parsed()) {
    const ModelSpec model = est.make();
    Trajectory data;
    data.values = read_series_csv(est_data);
    data.theta_used = Eigen::VectorXd::Constant(model.box.dim(),
                                                std::numeric_limits<double>::quiet_NaN());
    // `weighted` means variance-weighting, which is exactly the second stage
    // of the two-step procedure.
    if (est.objective == "weighted") {
      est.objective = "distance";
      est_two_step = true;
    }
    const FeatureBank bank = est.bank(model);
    const ObjectiveConfig config = est.objective_config();
    const AnnealSettings settings = est.anneal_settings();
    Stream stream = derive_stream({est.seed, {purpose::estimate}});

    json out;
    Eigen::VectorXd theta_hat;
    if (est_two_step) {
      const TwoStepReport two = estimate_two_step(model, data, bank, config,
                                                  settings, stream);
      out = report_to_json(two.stage2);
      out["stage1"] = report_to_json(two.stage1);
      out["weight_matrix"] = matrix_to_json(two.weight);
      theta_hat = two.stage2.theta_hat;
    } else {
      const EstimateReport report =
          estimate(model, data, bank, config, settings, stream);
      out = report_to_json(report);
      theta_hat = report.theta_hat;
    }
    out["model"] = est.model;
    out["bank"] = bank_to_json(bank);
    if (est_sandwich) {
      Stream sw = derive_stream({est.seed, {purpose::sandwich}});
      const SandwichReport report = sandwich_covariance(
          model, theta_hat, static_cast<int>(data.values.size()), bank, config,
          SandwichOptions{}, sw);
      out["sandwich"] = {{"std_errors", vector_to_json(report.std_errors)},
                         {"covariance", matrix_to_json(report.covariance)}};
    }
    if (est_bootstrap > 0) {
      Stream bs = derive_stream({est.seed, {purpose::bootstrap}});
      const BootstrapReport report =
          bootstrap_se(model, theta_hat, static_cast<int>(data.values.size()),
                       bank, config, settings, est_bootstrap, bs);
      out["bootstrap"] = {{"std_errors", vector_to_json(report.std_errors)},
                          {"percentile_2.5", vector_to_json(report.percentile_lo)},
                          {"percentile_97.5", vector_to_json(report.percentile_hi)},
                          {"failed", report.n_failed}};
    }
    emit(out, est_out);
    return 0;
  }

  if (sim_cmd->parsed()) {
    const ModelSpec model = sim.make();
    const Eigen::VectorXd theta = parse_theta(sim_theta);
    const Trajectory traj =
        simulate_trajectory(model, theta, sim_n, {sim.seed, {purpose::data}});
    std::ostringstream csv;
    csv << "value\n";
    for (Eigen::Index i = 0; i < traj.values.size(); ++i)
      csv << format_double(traj.values(i)) << '\n';
    write_text_file(sim_out, csv.str());
    return 0;
  }

  if (exp_cmd->parsed()) {
    if (exp_plan.empty() == exp_manifest.empty())
      throw ConfigError("experiment: pass exactly one of --plan / --from-manifest");
    ExperimentPlan plan =
        exp_plan.empty()
            ? plan_from_manifest(json::parse(read_text_file(exp_manifest)))
            : parse_plan(read_text_file(exp_plan));
    const ExperimentResult result = run_experiment(plan, exp_workers);
    std::cout << result.summary.dump(2) << std::endl;
    return 0;
  }

  if (den_cmd->parsed()) {
    ExperimentPlan plan = parse_plan(read_text_file(den_plan));
    DensityAxes axes;
    for (const auto& a : parse_theta(den_arities))
      axes.arities.push_back(static_cast<int>(a));
    {
      std::istringstream in(den_objectives);
      std::string item;
      while (std::getline(in, item, ','))
        axes.variants.push_back(objective_variant_from_string(item));
    }
    const ExperimentResult result = run_density_study(plan, axes, den_workers);
    std::cout << result.summary.dump(2) << std::endl;
    return 0;
  }

  if (sweep_cmd->parsed()) {
    const ModelSpec model = sweep.make();
    const FeatureBank bank = sweep.bank(model);
    const auto grid = parse_grid(sweep_grid, model.box.dim());
    Stream stream = derive_stream({sweep.seed, {purpose::data}});
    write_text_file(sweep_out,
                    run_feature_sweep(model, bank, grid, sweep.s, sweep_n, stream));
    return 0;
  }

  if (test_cmd->parsed()) {
    const ModelSpec model = test.make();
    Trajectory data;
    data.values = read_series_csv(test_data);
    const FeatureBank bank = test.bank(model);
    Stream stream = derive_stream({test.seed, {purpose::null_sim}});
    const TestReport report =
        test_point_null(model, parse_theta(test_theta0), data, bank,
                        test.objective_config(), test_B, stream);
    json out = test_report_to_json(report);
    out["model"] = test.model;
    out["theta0"] = test_theta0;
    emit(out, test_out);
    return 0;
  }

  if (gof_cmd->parsed()) {
    const ModelSpec model = gof.make();
    Trajectory data;
    data.values = read_series_csv(gof_data);
    const FeatureBank est_bank = gof.bank(model);
    const ObjectiveConfig config = gof.objective_config();

    Eigen::VectorXd theta_hat;
    json out;
    if (gof_theta.empty()) {
      Stream stream = derive_stream({gof.seed, {purpose::estimate}});
      const EstimateReport report = estimate(model, data, est_bank, config,
                                             gof.anneal_settings(), stream);
      theta_hat = report.theta_hat;
      out["estimate"] = report_to_json(report);
    } else {
      theta_hat = parse_theta(gof_theta);
    }

    const int holdout_k =
        gof_holdout_k > 0 ? gof_holdout_k : gof.resolved_k(model);
    Stream holdout_stream = derive_stream(
        {gof.seed, {purpose::holdout_bank, static_cast<std::uint32_t>(gof.arity)}});
    const FeatureBank holdout =
        draw_bank(holdout_k, gof.arity, gof.freq_scale, holdout_stream);

    Stream stream = derive_stream({gof.seed, {purpose::null_sim, 1}});
    const TestReport report = goodness_of_fit(model, theta_hat, data, holdout,
                                              config, gof_B, stream, &est_bank);
    out.update(test_report_to_json(report));
    out["model"] = gof.model;
    out["theta_hat"] = vector_to_json(theta_hat);
    out["holdout_bank"] = bank_to_json(holdout);
    emit(out, gof_out);
    return 0;
  }

  if (diag_cmd->parsed()) {
    const ModelSpec model = diag.make();
    const FeatureBank bank = diag.bank(model);
    EmbeddingThresholds thresholds;
    if (!diag_thresholds.empty()) {
      const Eigen::VectorXd t = parse_theta(diag_thresholds);
      if (t.size() != 2)
        throw ConfigError("--thresholds expects `separation,sv`");
      thresholds.min_separation_ratio = t(0);
      thresholds.min_jacobian_sv = t(1);
    }
    ParamSpace box = model.box;
    if (!diag_box.empty()) {
      std::istringstream in(diag_box);
      std::string item;
      int j = 0;
      while (std::getline(in, item, ',') && j < box.dim()) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
          throw ConfigError("--box expects lo:hi per coordinate");
        box.lower(j) = std::stod(item.substr(0, colon));
        box.upper(j) = std::stod(item.substr(colon + 1));
        ++j;
      }
      box.validate();
    }
    Stream stream = derive_stream({diag.seed, {purpose::diagnostic}});
    const EmbeddingDiagnostic result =
        embedding_diagnostic(model, box, diag_grid, diag_n, bank, diag_sbig,
                             diag_fd, thresholds, stream);
    json out;
    out["model"] = diag.model;
    out["grid_points"] = result.grid.size();
    out["min_separation_ratio"] = result.min_separation_ratio;
    out["jacobian_min_singular_value"] = result.jacobian_min_singular_value;
    out["thresholds"] = {{"min_separation_ratio", thresholds.min_separation_ratio},
                         {"min_jacobian_sv", thresholds.min_jacobian_sv}};
    out["pass"] = result.pass;
    out["verdict"] = result.pass ? "pass" : "fail";
    emit(out, diag_out);
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& err) {
    json error = {{"error",
                   {{"type", typeid(err).name()}, {"message", err.what()}}}};
    // Short, stable type names for the common cases.
    if (dynamic_cast<const ConfigError*>(&err))
      error["error"]["type"] = "config";
    else if (dynamic_cast<const InputError*>(&err))
      error["error"]["type"] = "input";
    else if (dynamic_cast<const ParameterError*>(&err))
      error["error"]["type"] = "parameter";
    else if (dynamic_cast<const EstimationError*>(&err))
      error["error"]["type"] = "estimation";
    else if (dynamic_cast<const OptimizationError*>(&err))
      error["error"]["type"] = "optimization";
    else if (dynamic_cast<const IdentifiabilityError*>(&err))
      error["error"]["type"] = "identifiability";
    else
      error["error"]["type"] = "internal";
    std::cerr << error.dump() << std::endl;
    return 1;
  }
}
