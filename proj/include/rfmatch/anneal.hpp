#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "rfmatch/models.hpp"
#include "rfmatch/rng.hpp"

namespace rfmatch {

/// Generalized simulated annealing with a heavy-tailed visiting distribution
/// (the usual q_v/q_a parameterization) plus an optional golden-section
/// polish. The budget is counted in objective evaluations, never seconds, so
/// results are machine-independent.
struct AnnealSettings {
  long max_evals = 10000;        // total annealing budget, split over restarts
  double initial_temp = 5230.0;
  double visiting_param = 2.62;  // q_v in (1,3)
  double acceptance_param = -5.0;
  int restarts = 2;
  bool local_polish = true;      // coordinate golden-section at the end
  double tolerance = 1e-10;      // improvement below this counts as stalled
  bool record_trace = false;
};

struct AnnealResult {
  Eigen::VectorXd x_best;
  double f_best = 0.0;
  long evals_used = 0;
  bool converged = false;
  std::vector<std::pair<long, double>> trace;  // (eval index, best so far)
};

/// Minimize f over the box. Non-finite values are treated as +inf and never
/// accepted; if every probe is non-finite, throws OptimizationError.
/// Deterministic given the stream. Proposals leaving the box are reflected
/// back inside.
AnnealResult minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                      const ParamSpace& box, const AnnealSettings& settings,
                      Stream& stream);

}  // namespace rfmatch
