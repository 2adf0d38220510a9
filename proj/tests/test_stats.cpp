#include <doctest.h>

#include <cmath>
#include <vector>

#include "rfmatch/stats.hpp"

using namespace rfmatch;

namespace {

struct QuantileCase {
  double p;
  double expected;
};

// Reference values computed independently to 20 significant digits
// (bisection against a hypergeometric-series CDF).
const std::vector<QuantileCase> kNormalCases = {
    {1e-12, -7.0344838253011319298},  {1e-9, -5.9978070150076868716},
    {1e-6, -4.7534243088228989482},   {1e-3, -3.0902323061678135415},
    {0.01, -2.3263478740408411009},   {0.1, -1.281551565544600467},
    {0.25, -0.6744897501960817432},   {0.5, 0.0},
    {0.6, 0.2533471031357997988},     {0.75, 0.6744897501960817432},
    {0.9, 1.281551565544600467},      {0.99, 2.3263478740408411009},
    {0.999, 3.0902323061678135415},   {0.999999, 4.7534243088228989482},
    {0.999999999, 5.9978070150076868716},
    {0.999999999999, 7.0344838253011319298},
};

const std::vector<QuantileCase> kT5Cases = {
    {1e-12, -393.95695957760376867},  {1e-9, -98.93722464836995679},
    {1e-6, -24.771029720515944171},   {1e-3, -5.8934295313560101276},
    {0.01, -3.3649299989072185928},   {0.1, -1.4758840488244810785},
    {0.25, -0.72668684380042265302},  {0.5, 0.0},
    {0.6, 0.26718086570414512673},    {0.75, 0.72668684380042265302},
    {0.9, 1.4758840488244810785},     {0.99, 3.3649299989072185928},
    {0.999, 5.8934295313560101276},   {0.999999, 24.771029720515944171},
    {0.999999999, 98.93722464836995679},
    {0.999999999999, 393.95695957760376867},
};

}  // namespace

TEST_CASE("normal quantile matches the high-precision reference") {
  for (const auto& c : kNormalCases)
    CHECK(std::abs(normal_quantile(c.p) - c.expected) < 1e-9);
}

TEST_CASE("t(5) quantile matches the high-precision reference") {
  // Relative comparison in the far tails where the magnitudes blow up;
  // absolute accuracy is far below 1e-9 everywhere in (1e-12, 1-1e-12)
  // relative to scale.
  for (const auto& c : kT5Cases) {
    const double got = student_t_quantile(c.p, 5.0);
    const double tol = 1e-9 * std::max(1.0, std::abs(c.expected));
    CHECK(std::abs(got - c.expected) < tol);
  }
}

TEST_CASE("quantile transforms stay finite at the uniform endpoints") {
  CHECK(std::isfinite(normal_quantile(0.0)));
  CHECK(std::isfinite(normal_quantile(1.0)));
  CHECK(std::isfinite(student_t_quantile(0.0, 5.0)));
  CHECK(normal_quantile(0.0) < -8.0);
}

TEST_CASE("quantiles are monotone and symmetric") {
  double prev = -1e18;
  for (double p = 0.001; p < 1.0; p += 0.001) {
    const double q = normal_quantile(p);
    CHECK(q > prev);
    prev = q;
    CHECK(normal_quantile(1.0 - p) == doctest::Approx(-q).epsilon(1e-12));
  }
}

TEST_CASE("t logpdf matches the density shape") {
  // t(5) density at 0: Gamma(3)/(Gamma(2.5) sqrt(5 pi)).
  const double at0 = std::exp(student_t_logpdf(0.0, 5.0));
  CHECK(at0 == doctest::Approx(0.3796066898224944).epsilon(1e-12));
  CHECK(student_t_logpdf(1.0, 5.0) ==
        doctest::Approx(student_t_logpdf(-1.0, 5.0)).epsilon(1e-14));
}

TEST_CASE("chi squared upper tail") {
  CHECK(chi_squared_sf(0.0, 3.0) == doctest::Approx(1.0));
  // P(chi2_1 > 3.841458820694124) = 0.05
  CHECK(chi_squared_sf(3.841458820694124, 1.0) == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("percentile interpolates order statistics") {
  std::vector<double> v = {4.0, 1.0, 3.0, 2.0};
  CHECK(percentile(v, 0.0) == 1.0);
  CHECK(percentile(v, 1.0) == 4.0);
  CHECK(percentile(v, 0.5) == doctest::Approx(2.5));
  CHECK(sample_median({1.0, 2.0, 9.0}) == 2.0);
}

TEST_CASE("regression slope recovers a line") {
  std::vector<double> x = {1, 2, 3, 4};
  std::vector<double> y = {2.0, 4.0, 6.0, 8.0};
  CHECK(regression_slope(x, y) == doctest::Approx(2.0));
}

TEST_CASE("sample moments") {
  CHECK(sample_mean({1.0, 2.0, 3.0}) == doctest::Approx(2.0));
  CHECK(sample_variance({1.0, 2.0, 3.0}) == doctest::Approx(1.0));
  CHECK(sample_variance({5.0, 5.0}) == 0.0);
}
