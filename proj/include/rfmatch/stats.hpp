#pragma once

#include <vector>

namespace rfmatch {

/// Standard normal quantile (Wichura's AS 241, |error| < 1e-15 on the
/// representable range). Arguments outside (0,1) are clamped to the nearest
/// representable interior point so that transforming uniforms from [0,1)
/// never produces infinities.
double normal_quantile(double p);

/// Quantile of Student's t with `df` degrees of freedom. Same clamping rule.
double student_t_quantile(double p, double df);

/// log density of Student's t with `df` degrees of freedom at x.
double student_t_logpdf(double x, double df);

/// Upper tail probability P(X > x) for X ~ chi-squared with k dof.
double chi_squared_sf(double x, double k);

/// Empirical quantile with linear interpolation between order statistics
/// (the usual "type 7" rule). q in [0,1]; sorts a copy.
double percentile(std::vector<double> values, double q);

/// Slope of the least-squares line through (x_i, y_i).
double regression_slope(const std::vector<double>& x, const std::vector<double>& y);

double sample_mean(const std::vector<double>& v);
double sample_variance(const std::vector<double>& v);  // unbiased
double sample_median(std::vector<double> v);

}  // namespace rfmatch
