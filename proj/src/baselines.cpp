#include "rfmatch/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "rfmatch/errors.hpp"
#include "rfmatch/stats.hpp"

namespace rfmatch {

BaselineResult gaussian_mle(const Eigen::Ref<const Eigen::VectorXd>& series) {
  if (series.size() < 1) throw InputError("gaussian_mle: empty series");
  BaselineResult result;
  result.theta_hat = Eigen::VectorXd::Constant(1, series.mean());
  result.method = "closed-form-mle";
  return result;
}

BaselineResult t_location_mle(const Eigen::Ref<const Eigen::VectorXd>& series,
                              double df) {
  if (series.size() < 2) throw InputError("t_location_mle: need n >= 2");

  // Negative log-likelihood up to constants.
  auto nll = [&](double mu) {
    double s = 0.0;
    for (Eigen::Index t = 0; t < series.size(); ++t) {
      const double z = series(t) - mu;
      s += std::log1p(z * z / df);
    }
    return (df + 1.0) / 2.0 * s;
  };

  std::vector<double> values(series.data(), series.data() + series.size());
  const double med = sample_median(values);
  const double lo_data = *std::min_element(values.begin(), values.end());
  const double hi_data = *std::max_element(values.begin(), values.end());
  // The location likelihood can have minor modes under heavy tails; scan a
  // bracket around the median first, then refine the best cell.
  const double lo = std::max(lo_data - 1.0, med - 50.0);
  const double hi = std::min(hi_data + 1.0, med + 50.0);
  const int cells = 128;
  const double step = (hi - lo) / cells;
  double best_x = med, best_f = nll(med);
  for (int i = 0; i <= cells; ++i) {
    const double x = lo + i * step;
    const double fx = nll(x);
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
    }
  }

  constexpr double kGold = 0.6180339887498949;
  double a = std::max(lo, best_x - step);
  double b = std::min(hi, best_x + step);
  double c = b - kGold * (b - a);
  double d = a + kGold * (b - a);
  double fc = nll(c);
  double fd = nll(d);
  while (b - a > 1e-9) {  // final midpoint is then within 1e-8 of the optimum
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kGold * (b - a);
      fc = nll(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kGold * (b - a);
      fd = nll(d);
    }
  }

  BaselineResult result;
  result.theta_hat = Eigen::VectorXd::Constant(1, (a + b) / 2.0);
  result.method = "numeric-mle";
  return result;
}

bool has_mle_baseline(const std::string& model_id) {
  return model_id == "gaussian-location" || model_id == "t-location";
}

BaselineResult run_baseline(const std::string& model_id,
                            const Eigen::Ref<const Eigen::VectorXd>& series) {
  if (model_id == "gaussian-location") return gaussian_mle(series);
  if (model_id == "t-location") return t_location_mle(series);
  throw ConfigError("model `" + model_id + "` has no MLE baseline");
}

}  // namespace rfmatch
