#include "rfmatch/harness.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "rfmatch/version.hpp"

namespace rfmatch {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing junk");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key `" + key + "`: cannot parse `" + value +
                      "` as a real number");
  }
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long x = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing junk");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("key `" + key + "`: cannot parse `" + value +
                      "` as an integer");
  }
}

bool parse_switch(const std::string& key, const std::string& value) {
  if (value == "on" || value == "true") return true;
  if (value == "off" || value == "false") return false;
  throw ConfigError("key `" + key + "`: expected on/off, got `" + value + "`");
}

std::string sanitize_flag_text(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  return s;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  for (int precision : {15, 16, 17}) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

void ExperimentPlan::validate() const {
  make_model(model, burn_in);  // throws ConfigError for unknown ids
  const ModelSpec spec = make_model(model, burn_in);
  if (true_theta.size() != spec.box.dim())
    throw ConfigError("key `true_theta`: expected " +
                      std::to_string(spec.box.dim()) + " value(s) for model `" +
                      model + "`");
  if (!spec.box.contains(true_theta))
    throw ConfigError("key `true_theta`: value outside the parameter box");
  if (sample_sizes.empty())
    throw ConfigError("key `sample_sizes`: list must be nonempty");
  for (int n : sample_sizes)
    if (n < 1) throw ConfigError("key `sample_sizes`: entries must be >= 1");
  if (trials < 1) throw ConfigError("key `trials`: must be >= 1");
  if (bank.k < 0) throw ConfigError("key `k`: must be >= 1 (or omitted)");
  if (bank.arity != 1 && bank.arity != 2)
    throw ConfigError("key `arity`: must be 1 or 2");
  if (bank.arity == 2)
    for (int n : sample_sizes)
      if (n < 2)
        throw ConfigError("key `arity`: bivariate features need n >= 2");
  if (!(bank.freq_scale > 0.0))
    throw ConfigError("key `freq_scale`: must be positive");
  if (objective.s < 1) throw ConfigError("key `s`: must be >= 1");
  if (objective.variant == ObjectiveVariant::wood && objective.s < 2)
    throw ConfigError("key `s`: wood objective needs s >= 2");
  if (objective.ridge < 0.0) throw ConfigError("key `ridge`: must be >= 0");
  if (optimizer.max_evals < 1) throw ConfigError("key `max_evals`: must be >= 1");
  if (optimizer.restarts < 1) throw ConfigError("key `restarts`: must be >= 1");
  if (!(optimizer.initial_temp > 0.0))
    throw ConfigError("key `initial_temp`: must be positive");
  if (!(optimizer.visiting_param > 1.0 && optimizer.visiting_param < 3.0))
    throw ConfigError("key `visiting_param`: must lie in (1,3)");
  if (burn_in < 0) throw ConfigError("key `burn_in`: must be >= 0");
}

ExperimentPlan parse_plan(const std::string& text) {
  ExperimentPlan plan;
  bool redraw = false;
  bool have_model = false, have_theta = false, have_seed = false;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("plan line " + std::to_string(line_no) +
                        ": expected `key = value`");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("plan line " + std::to_string(line_no) +
                        ": empty key or value");

    if (key == "model") {
      plan.model = value;
      have_model = true;
    } else if (key == "true_theta") {
      const auto parts = split(value, ',');
      plan.true_theta.resize(static_cast<Eigen::Index>(parts.size()));
      for (std::size_t i = 0; i < parts.size(); ++i)
        plan.true_theta(static_cast<Eigen::Index>(i)) =
            parse_double(key, parts[i]);
      have_theta = true;
    } else if (key == "seed") {
      try {
        plan.seed = std::stoull(value);
      } catch (const std::exception&) {
        throw ConfigError("key `seed`: cannot parse `" + value + "`");
      }
      have_seed = true;
    } else if (key == "sample_sizes") {
      plan.sample_sizes.clear();
      for (const auto& part : split(value, ','))
        plan.sample_sizes.push_back(static_cast<int>(parse_long(key, part)));
    } else if (key == "trials") {
      plan.trials = static_cast<int>(parse_long(key, value));
    } else if (key == "k") {
      plan.bank.k = static_cast<int>(parse_long(key, value));
      if (plan.bank.k < 1) throw ConfigError("key `k`: must be >= 1");
    } else if (key == "arity") {
      plan.bank.arity = static_cast<int>(parse_long(key, value));
    } else if (key == "freq_scale") {
      plan.bank.freq_scale = parse_double(key, value);
    } else if (key == "redraw_bank_per_trial") {
      redraw = parse_switch(key, value);
    } else if (key == "objective") {
      plan.objective.variant = objective_variant_from_string(value);
    } else if (key == "s") {
      plan.objective.s = static_cast<int>(parse_long(key, value));
      if (plan.objective.s < 1) throw ConfigError("key `s`: must be >= 1");
    } else if (key == "crn") {
      plan.objective.crn = parse_switch(key, value);
    } else if (key == "ridge") {
      plan.objective.ridge = parse_double(key, value);
    } else if (key == "max_evals") {
      plan.optimizer.max_evals = parse_long(key, value);
    } else if (key == "restarts") {
      plan.optimizer.restarts = static_cast<int>(parse_long(key, value));
    } else if (key == "polish") {
      plan.optimizer.local_polish = parse_switch(key, value);
    } else if (key == "initial_temp") {
      plan.optimizer.initial_temp = parse_double(key, value);
    } else if (key == "visiting_param") {
      plan.optimizer.visiting_param = parse_double(key, value);
    } else if (key == "acceptance_param") {
      plan.optimizer.acceptance_param = parse_double(key, value);
    } else if (key == "tolerance") {
      plan.optimizer.tolerance = parse_double(key, value);
    } else if (key == "baseline") {
      if (value == "mle") plan.baseline = true;
      else if (value == "none") plan.baseline = false;
      else throw ConfigError("key `baseline`: expected mle or none");
    } else if (key == "output") {
      plan.output_prefix = value;
    } else if (key == "burn_in") {
      plan.burn_in = static_cast<int>(parse_long(key, value));
    } else {
      throw ConfigError("unknown key `" + key + "` in plan");
    }
  }

  if (!have_model) throw ConfigError("plan is missing required key `model`");
  if (!have_theta) throw ConfigError("plan is missing required key `true_theta`");
  if (!have_seed) throw ConfigError("plan is missing required key `seed`");
  plan.bank.fixed_across_trials = !redraw;
  plan.validate();
  return plan;
}

int worker_count_from_env() {
  if (const char* env = std::getenv("RFMATCH_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return w;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

void parallel_for(int n_tasks, int workers, const std::function<void(int)>& fn) {
  if (workers <= 1 || n_tasks <= 1) {
    for (int i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_tasks) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int count = std::min(workers, n_tasks);
  pool.reserve(count);
  for (int w = 0; w < count; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct CellConfig {
  int config_index = 0;
  int arity = 1;
  ObjectiveVariant variant = ObjectiveVariant::unweighted;
  FeatureBank bank;  // fixed bank; per-trial banks drawn in the cell
};

struct CellTask {
  int flat_index;
  int config_index;
  int n_index;
  int trial;
};

std::string diagnostics_flags(const Diagnostics& d) {
  std::string flags;
  auto add = [&flags](const char* name) {
    if (!flags.empty()) flags += ';';
    flags += name;
  };
  if (d.boundary_hit) add("boundary_hit");
  if (d.covariance_regularized) add("covariance_regularized");
  if (d.budget_exhausted) add("budget_exhausted");
  return flags;
}

nlohmann::json plan_to_json(const ExperimentPlan& plan, int resolved_k) {
  nlohmann::json j;
  j["model"] = plan.model;
  nlohmann::json theta = nlohmann::json::array();
  for (Eigen::Index i = 0; i < plan.true_theta.size(); ++i)
    theta.push_back(plan.true_theta(i));
  j["true_theta"] = theta;
  j["seed"] = plan.seed;
  j["sample_sizes"] = plan.sample_sizes;
  j["trials"] = plan.trials;
  j["k"] = resolved_k;
  j["arity"] = plan.bank.arity;
  j["freq_scale"] = plan.bank.freq_scale;
  j["redraw_bank_per_trial"] = !plan.bank.fixed_across_trials;
  j["objective"] = to_string(plan.objective.variant);
  j["s"] = plan.objective.s;
  j["crn"] = plan.objective.crn;
  j["ridge"] = plan.objective.ridge;
  j["max_evals"] = plan.optimizer.max_evals;
  j["restarts"] = plan.optimizer.restarts;
  j["polish"] = plan.optimizer.local_polish;
  j["initial_temp"] = plan.optimizer.initial_temp;
  j["visiting_param"] = plan.optimizer.visiting_param;
  j["acceptance_param"] = plan.optimizer.acceptance_param;
  j["tolerance"] = plan.optimizer.tolerance;
  j["baseline"] = plan.baseline ? "mle" : "none";
  j["output"] = plan.output_prefix;
  j["burn_in"] = plan.burn_in;
  return j;
}

// Shared engine behind run_experiment and run_density_study.
ExperimentResult run_cells(const ExperimentPlan& plan,
                           const std::vector<CellConfig>& configs, int workers,
                           bool density_format) {
  const ModelSpec model = make_model(plan.model, plan.burn_in);
  const int d = model.box.dim();
  const int n_sizes = static_cast<int>(plan.sample_sizes.size());
  const int per_config = n_sizes * plan.trials;
  const int total = static_cast<int>(configs.size()) * per_config;
  const bool with_baseline = plan.baseline && has_mle_baseline(plan.model);

  std::vector<TrialRecord> records(total);
  std::vector<int> record_config(total);

  auto run_cell = [&](int flat) {
    const int cfg_i = flat / per_config;
    const int rest = flat % per_config;
    const int n_index = rest / plan.trials;
    const int trial = rest % plan.trials;
    const CellConfig& cfg = configs[cfg_i];
    const int n = plan.sample_sizes[n_index];

    TrialRecord rec;
    rec.trial_index = trial;
    rec.n = n;
    rec.theta_true = plan.true_theta;
    record_config[flat] = cfg.config_index;

    const auto started = std::chrono::steady_clock::now();
    try {
      FeatureBank bank = cfg.bank;
      if (!plan.bank.fixed_across_trials) {
        Stream bank_stream = derive_stream(
            {plan.seed,
             {purpose::bank, static_cast<std::uint32_t>(cfg.arity),
              static_cast<std::uint32_t>(n_index),
              static_cast<std::uint32_t>(trial)}});
        bank = draw_bank(bank.k, cfg.arity, plan.bank.freq_scale, bank_stream);
      }

      // Data is shared across configurations so comparisons are paired.
      const SeedSpec data_seed{plan.seed,
                               {purpose::data, 0,
                                static_cast<std::uint32_t>(n_index),
                                static_cast<std::uint32_t>(trial)}};
      const Trajectory data =
          simulate_trajectory(model, plan.true_theta, n, data_seed);

      ObjectiveConfig objective = plan.objective;
      objective.variant = cfg.variant;
      Stream est_stream = derive_stream(
          {plan.seed,
           {purpose::estimate, static_cast<std::uint32_t>(cfg.config_index),
            static_cast<std::uint32_t>(n_index),
            static_cast<std::uint32_t>(trial)}});
      const EstimateReport est =
          estimate(model, data, bank, objective, plan.optimizer, est_stream);

      rec.theta_hat = est.theta_hat;
      rec.objective_value = est.objective_value;
      rec.flags = diagnostics_flags(est.diagnostics);
      if (with_baseline)
        rec.baseline_hat = run_baseline(plan.model, data.values).theta_hat;
    } catch (const std::exception& err) {
      rec.failed = true;
      rec.flags = "error: " + sanitize_flag_text(err.what());
    }
    rec.wall_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
            .count();
    records[flat] = std::move(rec);
  };

  if (workers == 0) workers = worker_count_from_env();
  parallel_for(total, workers, run_cell);

  // CSV, in (config, n, trial) order regardless of execution order.
  std::ostringstream csv;
  if (density_format)
    csv << "arity,objective,n,trial_index,coordinate_name,theta_true,theta_hat,"
           "objective_value,flags\n";
  else
    csv << "trial_index,n,coordinate_name,theta_true,theta_hat,baseline_hat,"
           "objective_value,flags\n";
  for (int flat = 0; flat < total; ++flat) {
    const TrialRecord& rec = records[flat];
    const CellConfig& cfg = configs[record_config[flat]];
    for (int j = 0; j < d; ++j) {
      if (density_format)
        csv << cfg.arity << ',' << to_string(cfg.variant) << ',' << rec.n << ','
            << rec.trial_index << ',';
      else
        csv << rec.trial_index << ',' << rec.n << ',';
      csv << model.box.names[j] << ',' << format_double(rec.theta_true(j))
          << ',';
      if (rec.failed)
        csv << ',';
      else
        csv << format_double(rec.theta_hat(j)) << ',';
      if (!density_format) {
        if (rec.baseline_hat)
          csv << format_double((*rec.baseline_hat)(j));
        csv << ',';
      }
      if (rec.failed)
        csv << ',' << rec.flags << '\n';
      else
        csv << format_double(rec.objective_value) << ',' << rec.flags << '\n';
    }
  }

  // Summaries per (config, n, coordinate) from the same values the CSV holds.
  nlohmann::json summary = nlohmann::json::array();
  int failed_total = 0;
  for (const auto& cfg : configs) {
    for (int ni = 0; ni < n_sizes; ++ni) {
      nlohmann::json entry;
      entry["n"] = plan.sample_sizes[ni];
      if (density_format) {
        entry["arity"] = cfg.arity;
        entry["objective"] = to_string(cfg.variant);
      }
      nlohmann::json coords = nlohmann::json::array();
      int used = 0;
      for (int j = 0; j < d; ++j) {
        double se_sum = 0.0, err_sum = 0.0, base_sum = 0.0;
        std::vector<double> errors;
        int count = 0, base_count = 0;
        for (int t = 0; t < plan.trials; ++t) {
          const int flat =
              cfg.config_index * per_config + ni * plan.trials + t;
          const TrialRecord& rec = records[flat];
          if (rec.failed) continue;
          const double err = rec.theta_hat(j) - rec.theta_true(j);
          se_sum += err * err;
          err_sum += err;
          errors.push_back(std::abs(err));
          ++count;
          if (rec.baseline_hat) {
            const double be = (*rec.baseline_hat)(j)-rec.theta_true(j);
            base_sum += be * be;
            ++base_count;
          }
        }
        used = count;
        nlohmann::json c;
        c["name"] = model.box.names[j];
        if (count > 0) {
          const double mse = se_sum / count;
          const double bias = err_sum / count;
          c["mse"] = mse;
          c["bias"] = bias;
          c["variance"] = mse - bias * bias;
          c["median_abs_error"] = sample_median(errors);
        }
        if (base_count > 0) c["baseline_mse"] = base_sum / base_count;
        coords.push_back(c);
      }
      entry["trials_used"] = used;
      entry["per_coordinate"] = coords;
      summary.push_back(entry);
    }
  }
  for (const auto& rec : records) failed_total += rec.failed ? 1 : 0;

  nlohmann::json manifest;
  manifest["kind"] = density_format ? "density-study" : "experiment";
  manifest["version"] = kVersion;
  manifest["plan"] = plan_to_json(plan, configs.front().bank.k);
  {
    nlohmann::json banks = nlohmann::json::array();
    for (const auto& cfg : configs)
      if (plan.bank.fixed_across_trials) banks.push_back(bank_to_json(cfg.bank));
    manifest["banks"] = banks;
  }
  if (density_format) {
    nlohmann::json axes;
    nlohmann::json arities = nlohmann::json::array();
    nlohmann::json variants = nlohmann::json::array();
    for (const auto& cfg : configs) {
      arities.push_back(cfg.arity);
      variants.push_back(to_string(cfg.variant));
    }
    axes["arities"] = arities;
    axes["objectives"] = variants;
    manifest["axes"] = axes;
  }
  manifest["failed_trials"] = failed_total;
  {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    manifest["created_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(now).count();
  }

  ExperimentResult result;
  result.records = std::move(records);
  result.csv_text = csv.str();
  result.summary = std::move(summary);
  result.manifest = std::move(manifest);

  if (!plan.output_prefix.empty()) {
    write_text_file(plan.output_prefix + "_trials.csv", result.csv_text);
    write_text_file(plan.output_prefix + "_summary.json",
                    result.summary.dump(2) + "\n");
    write_text_file(plan.output_prefix + "_manifest.json",
                    result.manifest.dump(2) + "\n");
  }
  return result;
}

int resolved_k(const ExperimentPlan& plan, const ModelSpec& model) {
  return plan.bank.k > 0 ? plan.bank.k : 2 * model.box.dim() + 1;
}

FeatureBank fixed_bank(const ExperimentPlan& plan, int k, int arity) {
  Stream bank_stream = derive_stream(
      {plan.seed, {purpose::bank, static_cast<std::uint32_t>(arity)}});
  return draw_bank(k, arity, plan.bank.freq_scale, bank_stream);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentPlan& plan, int workers) {
  plan.validate();
  const ModelSpec model = make_model(plan.model, plan.burn_in);
  const int k = resolved_k(plan, model);

  CellConfig cfg;
  cfg.config_index = 0;
  cfg.arity = plan.bank.arity;
  cfg.variant = plan.objective.variant;
  cfg.bank = fixed_bank(plan, k, cfg.arity);
  cfg.bank.k = k;
  return run_cells(plan, {cfg}, workers, /*density_format=*/false);
}

ExperimentResult run_density_study(const ExperimentPlan& plan,
                                   const DensityAxes& axes, int workers) {
  plan.validate();
  const ModelSpec model = make_model(plan.model, plan.burn_in);
  const int k = resolved_k(plan, model);

  std::vector<int> arities =
      axes.arities.empty() ? std::vector<int>{plan.bank.arity} : axes.arities;
  std::vector<ObjectiveVariant> variants =
      axes.variants.empty() ? std::vector<ObjectiveVariant>{plan.objective.variant}
                            : axes.variants;
  for (int arity : arities) {
    if (arity != 1 && arity != 2)
      throw ConfigError("density study: arity must be 1 or 2");
    if (arity == 2)
      for (int n : plan.sample_sizes)
        if (n < 2)
          throw ConfigError("density study: bivariate features need n >= 2");
  }
  for (ObjectiveVariant v : variants)
    if (v == ObjectiveVariant::wood && plan.objective.s < 2)
      throw ConfigError("density study: wood objective needs s >= 2");

  std::vector<CellConfig> configs;
  int index = 0;
  for (int arity : arities)
    for (ObjectiveVariant variant : variants) {
      CellConfig cfg;
      cfg.config_index = index++;
      cfg.arity = arity;
      cfg.variant = variant;
      cfg.bank = fixed_bank(plan, k, arity);
      configs.push_back(std::move(cfg));
    }
  return run_cells(plan, configs, workers, /*density_format=*/true);
}

ExperimentPlan plan_from_manifest(const nlohmann::json& manifest) {
  const auto& j = manifest.at("plan");
  ExperimentPlan plan;
  plan.model = j.at("model").get<std::string>();
  const auto& theta = j.at("true_theta");
  plan.true_theta.resize(static_cast<Eigen::Index>(theta.size()));
  for (std::size_t i = 0; i < theta.size(); ++i)
    plan.true_theta(static_cast<Eigen::Index>(i)) = theta[i].get<double>();
  plan.seed = j.at("seed").get<std::uint64_t>();
  plan.sample_sizes = j.at("sample_sizes").get<std::vector<int>>();
  plan.trials = j.at("trials").get<int>();
  plan.bank.k = j.at("k").get<int>();
  plan.bank.arity = j.at("arity").get<int>();
  plan.bank.freq_scale = j.at("freq_scale").get<double>();
  plan.bank.fixed_across_trials = !j.at("redraw_bank_per_trial").get<bool>();
  plan.objective.variant =
      objective_variant_from_string(j.at("objective").get<std::string>());
  plan.objective.s = j.at("s").get<int>();
  plan.objective.crn = j.at("crn").get<bool>();
  plan.objective.ridge = j.at("ridge").get<double>();
  plan.optimizer.max_evals = j.at("max_evals").get<long>();
  plan.optimizer.restarts = j.at("restarts").get<int>();
  plan.optimizer.local_polish = j.at("polish").get<bool>();
  plan.optimizer.initial_temp = j.at("initial_temp").get<double>();
  plan.optimizer.visiting_param = j.at("visiting_param").get<double>();
  plan.optimizer.acceptance_param = j.at("acceptance_param").get<double>();
  plan.optimizer.tolerance = j.at("tolerance").get<double>();
  plan.baseline = j.at("baseline").get<std::string>() == "mle";
  plan.output_prefix = j.at("output").get<std::string>();
  plan.burn_in = j.at("burn_in").get<int>();
  plan.validate();
  return plan;
}

std::string run_feature_sweep(const ModelSpec& model, const FeatureBank& bank,
                              const std::vector<Eigen::VectorXd>& grid, int s,
                              int n, Stream& stream) {
  if (grid.empty()) throw InputError("feature sweep: empty grid");
  for (const auto& theta : grid)
    if (!model.box.contains(theta))
      throw ParameterError("feature sweep: grid point outside the box");

  Stream block_stream = stream.child(1);
  const Eigen::MatrixXd block =
      draw_uniform_block(block_stream, s, n * model.draws_per_step);

  std::ostringstream csv;
  for (const auto& name : model.box.names) csv << name << ',';
  csv << "feature_index,mean\n";
  for (const auto& theta : grid) {
    const SimulatedFeatures sim =
        simulate_features(model, theta, n, bank, s, block);
    for (int i = 0; i < bank.k; ++i) {
      for (Eigen::Index j = 0; j < theta.size(); ++j)
        csv << format_double(theta(j)) << ',';
      csv << i << ',' << format_double(sim.mean(i)) << '\n';
    }
  }
  return csv.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open `" + path + "` for writing");
  out << text;
  if (!out) throw InputError("failed writing `" + path + "`");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open `" + path + "`");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Eigen::VectorXd read_series_csv(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<double> values;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    try {
      std::size_t pos = 0;
      const double x = std::stod(line, &pos);
      if (pos != line.size()) throw std::invalid_argument("trailing junk");
      values.push_back(x);
    } catch (const std::exception&) {
      if (line_no == 1) continue;  // header row
      throw InputError("`" + path + "` line " + std::to_string(line_no) +
                       ": not a number");
    }
  }
  if (values.empty()) throw InputError("`" + path + "`: no data rows");
  return Eigen::Map<const Eigen::VectorXd>(values.data(),
                                           static_cast<Eigen::Index>(values.size()));
}

}  // namespace rfmatch
