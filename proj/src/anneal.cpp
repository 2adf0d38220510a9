#include "rfmatch/anneal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rfmatch {

namespace {

constexpr double kTailLimit = 1e8;
constexpr double kInf = std::numeric_limits<double>::infinity();

double reflect_into(double x, double lo, double hi) {
  const double range = hi - lo;
  double y = std::fmod(x - lo, 2.0 * range);
  if (y < 0.0) y += 2.0 * range;
  return lo + (y <= range ? y : 2.0 * range - y);
}

// Heavy-tailed visiting distribution of generalized simulated annealing
// (Tsallis form, same parameterization as the usual GSA implementations).
class Visitor {
 public:
  Visitor(double qv, double temperature) : qv_(qv) {
    const double factor2 = std::exp((4.0 - qv) * std::log(qv - 1.0));
    const double factor3 = std::exp((2.0 - qv) * std::log(2.0) / (qv - 1.0));
    const double factor4p = std::sqrt(M_PI) * factor2 / (factor3 * (3.0 - qv));
    const double factor5 = 1.0 / (qv - 1.0) - 0.5;
    const double d1 = 2.0 - factor5;
    const double factor6 = M_PI * (1.0 - factor5) /
                           std::sin(M_PI * (1.0 - factor5)) /
                           std::exp(std::lgamma(d1));
    const double factor1 = std::exp(std::log(temperature) / (qv - 1.0));
    const double factor4 = factor4p * factor1;
    sigmax_ = std::exp(-(qv - 1.0) * std::log(factor6 / factor4) / (3.0 - qv));
  }

  double draw(Stream& stream) const {
    const double gx = sigmax_ * stream.next_normal();
    const double gy = stream.next_normal();
    const double den =
        std::exp((qv_ - 1.0) * std::log(std::abs(gy)) / (3.0 - qv_));
    return gx / den;
  }

 private:
  double qv_;
  double sigmax_ = 1.0;
};

struct Tracker {
  Eigen::VectorXd x_best;
  double f_best = kInf;
  long evals = 0;
  bool record_trace = false;
  std::vector<std::pair<long, double>> trace;

  // Strict improvement only, so on exact ties the earlier probe wins.
  void consider(const Eigen::VectorXd& x, double f) {
    if (f < f_best) {
      f_best = f;
      x_best = x;
      if (record_trace) trace.emplace_back(evals, f_best);
    }
  }
};

}  // namespace

AnnealResult minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                      const ParamSpace& box, const AnnealSettings& settings,
                      Stream& stream) {
  box.validate();
  if (settings.max_evals < 1) throw ConfigError("anneal: max_evals must be >= 1");
  if (!(settings.initial_temp > 0.0))
    throw ConfigError("anneal: initial_temp must be positive");
  if (!(settings.visiting_param > 1.0 && settings.visiting_param < 3.0))
    throw ConfigError("anneal: visiting_param must lie in (1,3)");
  if (settings.restarts < 1) throw ConfigError("anneal: restarts must be >= 1");

  const int dim = box.dim();
  const double qv = settings.visiting_param;
  const double qa = settings.acceptance_param;
  const double t1 = std::exp((qv - 1.0) * std::log(2.0)) - 1.0;

  Tracker best;
  best.record_trace = settings.record_trace;

  Stream rng = stream.child(0x414e4e45u);  // annealer's private stream

  auto evaluate = [&](const Eigen::VectorXd& x) {
    ++best.evals;
    double v = f(x);
    if (!std::isfinite(v)) v = kInf;
    best.consider(x, v);
    return v;
  };

  const long budget = settings.max_evals;
  const long per_restart = std::max<long>(1, budget / settings.restarts);
  // A sweep with no improvement beyond tolerance counts as a stall; after
  // enough stalled sweeps the restart is done.
  const int stall_limit = 50;
  bool all_restarts_stalled = true;

  for (int restart = 0; restart < settings.restarts; ++restart) {
    const long restart_budget =
        (restart == settings.restarts - 1) ? budget - best.evals : per_restart;
    if (restart_budget < 1) break;
    long used = 0;

    Eigen::VectorXd x(dim);
    double fx = kInf;
    // Random starts until the objective is finite (capped).
    for (int attempt = 0; attempt < 100 && used < restart_budget; ++attempt) {
      for (int i = 0; i < dim; ++i)
        x(i) = box.lower(i) + (box.upper(i) - box.lower(i)) * rng.next_double();
      fx = evaluate(x);
      ++used;
      if (std::isfinite(fx)) break;
    }
    if (!std::isfinite(fx)) {
      all_restarts_stalled = false;
      continue;
    }

    int stalled_sweeps = 0;
    bool stalled_out = false;
    for (long step = 0; used < restart_budget; ++step) {
      const double t2 = std::exp((qv - 1.0) * std::log(step + 2.0)) - 1.0;
      const double temperature = settings.initial_temp * t1 / t2;
      const double temperature_step = temperature / (step + 1.0);
      const Visitor visitor(qv, temperature);
      const double f_best_before = best.f_best;

      for (int j = 0; j < 2 * dim && used < restart_budget; ++j) {
        Eigen::VectorXd proposal = x;
        if (j < dim) {
          const double upper_sample = rng.next_double();
          const double lower_sample = rng.next_double();
          for (int i = 0; i < dim; ++i) {
            double visit = visitor.draw(rng);
            if (visit > kTailLimit) visit = kTailLimit * upper_sample;
            else if (visit < -kTailLimit) visit = -kTailLimit * lower_sample;
            proposal(i) =
                reflect_into(x(i) + visit, box.lower(i), box.upper(i));
          }
        } else {
          double visit = visitor.draw(rng);
          if (visit > kTailLimit) visit = kTailLimit * rng.next_double();
          else if (visit < -kTailLimit) visit = -kTailLimit * rng.next_double();
          const int i = j - dim;
          proposal(i) = reflect_into(x(i) + visit, box.lower(i), box.upper(i));
        }

        const double fp = evaluate(proposal);
        ++used;
        if (fp < fx) {
          x = proposal;
          fx = fp;
        } else {
          const double r = rng.next_double();
          const double pqv_temp =
              1.0 - (1.0 - qa) * (fp - fx) / temperature_step;
          if (pqv_temp > 0.0) {
            const double pqv = std::exp(std::log(pqv_temp) / (1.0 - qa));
            if (r <= pqv) {
              x = proposal;
              fx = fp;
            }
          }
        }
      }

      if (f_best_before - best.f_best > settings.tolerance) {
        stalled_sweeps = 0;
      } else if (++stalled_sweeps >= stall_limit) {
        stalled_out = true;
        break;
      }
    }
    if (!stalled_out) all_restarts_stalled = false;
  }

  if (!std::isfinite(best.f_best))
    throw OptimizationError("anneal: objective was non-finite at every probe");

  if (settings.local_polish) {
    // Coordinate golden-section around the incumbent; allowance of 100
    // evaluations per coordinate on top of max_evals. The tracker keeps
    // every probe, so a fruitless polish can never lose the incumbent.
    constexpr double kGold = 0.6180339887498949;
    Eigen::VectorXd x = best.x_best;
    double f_work = best.f_best;
    for (int i = 0; i < dim; ++i) {
      long coord_evals = 0;
      double coord_best_x = x(i);
      double coord_best_f = f_work;
      const double range = box.upper(i) - box.lower(i);
      double a = std::max(box.lower(i), x(i) - 0.02 * range);
      double b = std::min(box.upper(i), x(i) + 0.02 * range);
      auto probe = [&](double xi) {
        Eigen::VectorXd p = x;
        p(i) = xi;
        ++coord_evals;
        const double v = evaluate(p);
        if (v < coord_best_f) {
          coord_best_f = v;
          coord_best_x = xi;
        }
        return v;
      };
      double c = b - kGold * (b - a);
      double d = a + kGold * (b - a);
      double fc = probe(c);
      double fd = probe(d);
      while (b - a > 1e-12 * range && coord_evals < 100) {
        if (fc < fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - kGold * (b - a);
          fc = probe(c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + kGold * (b - a);
          fd = probe(d);
        }
      }
      x(i) = coord_best_x;
      f_work = coord_best_f;
    }
  }

  AnnealResult result;
  result.x_best = best.x_best;
  result.f_best = best.f_best;
  result.evals_used = best.evals;
  result.converged = all_restarts_stalled;
  result.trace = std::move(best.trace);
  return result;
}

}  // namespace rfmatch
