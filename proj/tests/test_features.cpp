#include <doctest.h>

#include <cmath>
#include <vector>

#include "rfmatch/features.hpp"
#include "rfmatch/models.hpp"
#include "rfmatch/stats.hpp"

using namespace rfmatch;

namespace {

Eigen::VectorXd iid_normal_series(int n, std::uint32_t label) {
  Stream stream = derive_stream({314, {label}});
  Eigen::VectorXd x(n);
  for (int t = 0; t < n; ++t) x(t) = normal_quantile(stream.next_double());
  return x;
}

// E cos(w Z + a) for Z ~ N(0,1).
double gaussian_feature_mean(double w, double a) {
  return std::exp(-w * w / 2.0) * std::cos(a);
}

}  // namespace

TEST_CASE("draw_bank shapes and ranges") {
  Stream stream = derive_stream({1, {purpose::bank}});
  const FeatureBank uni = draw_bank(3, 1, 1.0, stream);
  CHECK(uni.k == 3);
  CHECK(uni.frequencies.rows() == 3);
  CHECK(uni.frequencies.cols() == 1);
  CHECK((uni.phases.array() > -M_PI).all());
  CHECK((uni.phases.array() < M_PI).all());

  const FeatureBank bi = draw_bank(5, 2, 1.0, stream);
  CHECK(bi.frequencies.rows() == 5);
  CHECK(bi.frequencies.cols() == 2);

  CHECK_THROWS_AS(draw_bank(3, 3, 1.0, stream), ConfigError);
  CHECK_THROWS_AS(draw_bank(0, 1, 1.0, stream), ConfigError);
  CHECK_THROWS_AS(draw_bank(3, 1, 0.0, stream), ConfigError);
}

TEST_CASE("draw_bank is deterministic given the stream state") {
  Stream a = derive_stream({7, {purpose::bank}});
  Stream b = derive_stream({7, {purpose::bank}});
  const FeatureBank ba = draw_bank(4, 2, 1.0, a);
  const FeatureBank bb = draw_bank(4, 2, 1.0, b);
  CHECK(same_bank(ba, bb));
  CHECK(bank_fingerprint(ba) == bank_fingerprint(bb));
}

TEST_CASE("longer banks extend shorter ones drawn from the same state") {
  Stream a = derive_stream({7, {purpose::bank}});
  Stream b = derive_stream({7, {purpose::bank}});
  const FeatureBank small = draw_bank(3, 1, 1.0, a);
  const FeatureBank large = draw_bank(5, 1, 1.0, b);
  CHECK(small.frequencies == large.frequencies.topRows(3));
  CHECK(small.phases == large.phases.head(3));
}

TEST_CASE("gaussian frequency draws follow the requested scale") {
  Stream stream = derive_stream({11, {purpose::bank}});
  const FeatureBank bank = draw_bank(2000, 1, 2.0, stream);
  const double var = bank.frequencies.col(0).squaredNorm() / 2000.0;
  CHECK(var == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("univariate features of a constant series are exact cosines") {
  Stream stream = derive_stream({3, {purpose::bank}});
  const FeatureBank bank = draw_bank(3, 1, 1.0, stream);
  const Eigen::VectorXd series = Eigen::VectorXd::Constant(50, 1.7);
  const Eigen::VectorXd f = eval_univariate(bank, series);
  for (int i = 0; i < 3; ++i)
    CHECK(f(i) == doctest::Approx(std::cos(bank.frequencies(i, 0) * 1.7 +
                                           bank.phases(i)))
                      .epsilon(1e-12));
}

TEST_CASE("single-point series with zero frequency argument gives one") {
  FeatureBank bank;
  bank.k = 1;
  bank.arity = 1;
  bank.frequencies = Eigen::MatrixXd::Constant(1, 1, 0.8);
  bank.phases = Eigen::VectorXd::Zero(1);
  const Eigen::VectorXd f = eval_univariate(bank, Eigen::VectorXd::Zero(1));
  CHECK(f(0) == 1.0);
}

TEST_CASE("univariate features match the Gaussian characteristic function") {
  Stream stream = derive_stream({5, {purpose::bank}});
  const FeatureBank bank = draw_bank(6, 1, 1.0, stream);
  const Eigen::VectorXd series = iid_normal_series(10000, 1);
  const Eigen::VectorXd f = eval_univariate(bank, series);
  for (int i = 0; i < bank.k; ++i)
    CHECK(std::abs(f(i) - gaussian_feature_mean(bank.frequencies(i, 0),
                                                bank.phases(i))) < 0.03);
}

TEST_CASE("closed form itself agrees with brute-force Monte Carlo") {
  // One-off validation of the oracle: 10^6 draws against e^{-w^2/2} cos(a).
  const double w = 1.3, a = 0.4;
  Stream stream = derive_stream({777, {1}});
  double sum = 0.0;
  const int n = 1000000;
  for (int i = 0; i < n; ++i)
    sum += std::cos(w * normal_quantile(stream.next_double()) + a);
  CHECK(std::abs(sum / n - gaussian_feature_mean(w, a)) < 0.005);
}

TEST_CASE("bivariate features: constant series and two-point series") {
  Stream stream = derive_stream({6, {purpose::bank}});
  const FeatureBank bank = draw_bank(4, 2, 1.0, stream);

  const Eigen::VectorXd constant = Eigen::VectorXd::Constant(30, 0.6);
  const Eigen::VectorXd fc = eval_bivariate(bank, constant);
  for (int i = 0; i < 4; ++i)
    CHECK(fc(i) ==
          doctest::Approx(std::cos((bank.frequencies(i, 0) +
                                    bank.frequencies(i, 1)) * 0.6 +
                                   bank.phases(i)))
              .epsilon(1e-12));

  Eigen::VectorXd pair(2);
  pair << 0.3, -1.2;
  const Eigen::VectorXd fp = eval_bivariate(bank, pair);
  for (int i = 0; i < 4; ++i)
    CHECK(fp(i) == doctest::Approx(std::cos(bank.frequencies(i, 0) * 0.3 +
                                            bank.frequencies(i, 1) * -1.2 +
                                            bank.phases(i)))
                       .epsilon(1e-12));
}

TEST_CASE("bivariate features match the iid product characteristic function") {
  Stream stream = derive_stream({8, {purpose::bank}});
  const FeatureBank bank = draw_bank(5, 2, 1.0, stream);
  const Eigen::VectorXd series = iid_normal_series(10000, 2);
  const Eigen::VectorXd f = eval_bivariate(bank, series);
  for (int i = 0; i < bank.k; ++i) {
    const double w1 = bank.frequencies(i, 0);
    const double w2 = bank.frequencies(i, 1);
    const double expected =
        std::exp(-(w1 * w1 + w2 * w2) / 2.0) * std::cos(bank.phases(i));
    CHECK(std::abs(f(i) - expected) < 0.03);
  }
}

TEST_CASE("input errors") {
  Stream stream = derive_stream({9, {purpose::bank}});
  const FeatureBank uni = draw_bank(2, 1, 1.0, stream);
  const FeatureBank bi = draw_bank(2, 2, 1.0, stream);
  CHECK_THROWS_AS(eval_univariate(uni, Eigen::VectorXd()), InputError);
  CHECK_THROWS_AS(eval_bivariate(bi, Eigen::VectorXd::Zero(1)), InputError);
  CHECK_THROWS_AS(eval_univariate(bi, Eigen::VectorXd::Zero(5)), ConfigError);
}

TEST_CASE("boundedness over random banks and series") {
  Stream stream = derive_stream({10, {purpose::bank}});
  for (int rep = 0; rep < 20; ++rep) {
    const int arity = rep % 2 == 0 ? 1 : 2;
    const FeatureBank bank = draw_bank(8, arity, 2.0, stream);
    Eigen::VectorXd series(64);
    for (int t = 0; t < 64; ++t)
      series(t) = 10.0 * (stream.next_double() - 0.5);
    const Eigen::VectorXd f = eval_features(bank, series);
    CHECK(f.cwiseAbs().maxCoeff() <= 1.0);
  }
}

TEST_CASE("phase shift by two pi leaves evaluations unchanged") {
  Stream stream = derive_stream({12, {purpose::bank}});
  const FeatureBank bank = draw_bank(5, 1, 1.0, stream);
  FeatureBank shifted = bank;
  shifted.phases.array() += 2.0 * M_PI;
  const Eigen::VectorXd series = iid_normal_series(200, 3);
  const Eigen::VectorXd a = eval_univariate(bank, series);
  const Eigen::VectorXd b = eval_univariate(shifted, series);
  CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("univariate features ignore order; bivariate features do not") {
  Stream bank_stream = derive_stream({13, {purpose::bank}});
  const FeatureBank uni = draw_bank(3, 1, 1.0, bank_stream);
  const FeatureBank bi = draw_bank(3, 2, 1.0, bank_stream);

  // A chaotic trajectory, where reversing the arrow of time matters.
  const ModelSpec logistic = make_logistic_map();
  const Trajectory traj = simulate_trajectory(
      logistic, Eigen::VectorXd::Constant(1, 0.9), 300, {21, {purpose::data}});
  const Eigen::VectorXd reversed = traj.values.reverse();

  const Eigen::VectorXd u1 = eval_univariate(uni, traj.values);
  const Eigen::VectorXd u2 = eval_univariate(uni, reversed);
  CHECK((u1 - u2).cwiseAbs().maxCoeff() < 1e-12);

  const Eigen::VectorXd b1 = eval_bivariate(bi, traj.values);
  const Eigen::VectorXd b2 = eval_bivariate(bi, reversed);
  CHECK((b1 - b2).cwiseAbs().maxCoeff() > 1e-6);
}

TEST_CASE("feature variance decays like one over n") {
  Stream bank_stream = derive_stream({14, {purpose::bank}});
  const FeatureBank bank = draw_bank(1, 1, 1.0, bank_stream);
  std::vector<double> log_n, log_var;
  std::uint32_t label = 100;
  for (int n : {100, 400, 1600, 6400}) {
    std::vector<double> values;
    for (int rep = 0; rep < 200; ++rep)
      values.push_back(eval_univariate(bank, iid_normal_series(n, label++))(0));
    log_n.push_back(std::log(static_cast<double>(n)));
    log_var.push_back(std::log(sample_variance(values)));
  }
  const double slope = regression_slope(log_n, log_var);
  CHECK(slope > -1.3);
  CHECK(slope < -0.7);
}

TEST_CASE("bank json round-trips exactly") {
  Stream stream = derive_stream({15, {purpose::bank}});
  const FeatureBank bank = draw_bank(4, 2, 1.5, stream);
  const FeatureBank back = bank_from_json(bank_to_json(bank));
  CHECK(same_bank(bank, back));
}
