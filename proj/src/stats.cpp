#include "rfmatch/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "rfmatch/errors.hpp"

namespace rfmatch {

namespace {

// Uniform draws live in [0,1); pull the endpoints into the open interval so
// quantile transforms stay finite.
double clamp_open_unit(double p) {
  constexpr double lo = 0x1.0p-54;
  constexpr double hi = 1.0 - 0x1.0p-53;
  return std::min(std::max(p, lo), hi);
}

}  // namespace

// Wichura's algorithm AS 241 (PPND16).
double normal_quantile(double p) {
  p = clamp_open_unit(p);
  const double q = p - 0.5;
  double r, val;
  if (std::abs(q) <= 0.425) {
    r = 0.180625 - q * q;
    val = q *
          (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
              1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
            1.3314166789178437745e+2) * r + 3.3871328727963666080e+0) /
          (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
              5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
            4.2313330701600911252e+1) * r + 1.0);
    return val;
  }
  r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
              3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
            4.63033784615654529590e+0) * r + 1.42343711074968357734e+0) /
          (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
              6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
            2.05319162663775882187e+0) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
              2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
            5.46378491116411436990e+0) * r + 6.65790464350110377720e+0) /
          (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
              1.48753612908506148525e-2) * r + 5.99832206555887937690e-1) * r +
            1.0));
  }
  return q < 0.0 ? -val : val;
}

double student_t_quantile(double p, double df) {
  p = clamp_open_unit(p);
  const boost::math::students_t_distribution<double> dist(df);
  return boost::math::quantile(dist, p);
}

double student_t_logpdf(double x, double df) {
  return std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) -
         0.5 * std::log(df * M_PI) -
         (df + 1.0) / 2.0 * std::log1p(x * x / df);
}

double chi_squared_sf(double x, double k) {
  if (x <= 0.0) return 1.0;
  const boost::math::chi_squared_distribution<double> dist(k);
  return boost::math::cdf(boost::math::complement(dist, x));
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw InputError("percentile of empty sample");
  if (q < 0.0 || q > 1.0) throw InputError("percentile level must be in [0,1]");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = static_cast<std::size_t>(std::ceil(h));
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double regression_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw InputError("regression needs matched samples of size >= 2");
  const double mx = sample_mean(x);
  const double my = sample_mean(y);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw InputError("regression on constant x");
  return sxy / sxx;
}

double sample_mean(const std::vector<double>& v) {
  if (v.empty()) throw InputError("mean of empty sample");
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_variance(const std::vector<double>& v) {
  if (v.size() < 2) throw InputError("variance needs at least two values");
  const double m = sample_mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double sample_median(std::vector<double> v) { return percentile(std::move(v), 0.5); }

}  // namespace rfmatch
