#include <doctest.h>

#include <cmath>

#include "rfmatch/models.hpp"
#include "rfmatch/stats.hpp"

using namespace rfmatch;

namespace {

Eigen::VectorXd theta1(double x) { return Eigen::VectorXd::Constant(1, x); }

}  // namespace

TEST_CASE("registry knows the four models and rejects strangers") {
  for (const auto& id : registered_models()) CHECK(make_model(id).id == id);
  CHECK_THROWS_AS(make_model("brownian"), ConfigError);
}

TEST_CASE("gaussian location transforms uniforms by quantile shift") {
  const ModelSpec model = make_gaussian_location();

  Stream stream = derive_stream({1, {purpose::data}});
  const Eigen::MatrixXd u = stream.uniform_block(100, 1);

  const Eigen::VectorXd at0 = model.simulate(theta1(0.0), 100, u);
  CHECK(std::abs(at0.mean()) < 0.3);  // 3 / sqrt(100)

  const Eigen::VectorXd at5 = model.simulate(theta1(5.0), 100, u);
  CHECK((at5 - at0).cwiseAbs().minCoeff() > 5.0 - 1e-12);
  CHECK(((at5 - at0).array() - 5.0).abs().maxCoeff() < 1e-12);

  const Eigen::MatrixXd half = Eigen::MatrixXd::Constant(4, 1, 0.5);
  const Eigen::VectorXd fixed = model.simulate(theta1(2.0), 4, half);
  CHECK((fixed.array() == 2.0).all());
}

TEST_CASE("t location family") {
  const ModelSpec model = make_t_location();

  const Eigen::MatrixXd half = Eigen::MatrixXd::Constant(3, 1, 0.5);
  const Eigen::VectorXd at_median = model.simulate(theta1(1.5), 3, half);
  for (int t = 0; t < 3; ++t)
    CHECK(at_median(t) == doctest::Approx(1.5).epsilon(1e-12));

  Stream stream = derive_stream({2, {purpose::data}});
  const Eigen::MatrixXd u = stream.uniform_block(100000, 1);
  const Eigen::VectorXd series = model.simulate(theta1(0.0), 100000, u);
  const double var =
      (series.array() - series.mean()).square().sum() / (series.size() - 1);
  CHECK(var == doctest::Approx(5.0 / 3.0).epsilon(0.10));

  const Eigen::MatrixXd u2 = stream.uniform_block(50, 1);
  const Eigen::VectorXd a = model.simulate(theta1(0.0), 50, u2);
  const Eigen::VectorXd b = model.simulate(theta1(1.0), 50, u2);
  CHECK(((b - a).array() - 1.0).abs().maxCoeff() < 1e-12);
}

TEST_CASE("logistic map follows the recursion exactly") {
  const ModelSpec model = make_logistic_map();

  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(3, 1);
  u(0, 0) = 0.5;
  const Eigen::VectorXd traj = model.simulate(theta1(0.9), 3, u);
  CHECK(traj(0) == 0.5);
  CHECK(traj(1) == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(traj(2) == doctest::Approx(0.324).epsilon(1e-12));

  // r = 0 collapses to the fixed point at zero after one step.
  Eigen::MatrixXd u2 = Eigen::MatrixXd::Zero(5, 1);
  u2(0, 0) = 0.77;
  const Eigen::VectorXd dead = model.simulate(theta1(0.0), 5, u2);
  CHECK(dead(0) == 0.77);
  for (int t = 1; t < 5; ++t) CHECK(dead(t) == 0.0);

  CHECK_THROWS_AS(model.simulate(theta1(1.5), 3, u), ParameterError);
}

TEST_CASE("logistic map ergodic average at r = 0.9") {
  const ModelSpec model = make_logistic_map();
  const Trajectory traj = simulate_trajectory(model, theta1(0.9), 10000,
                                              {3, {purpose::data}});
  const double avg = traj.values.mean();
  CHECK(avg > 0.55);
  CHECK(avg < 0.70);

  // Long-pilot oracle for the same window.
  const Trajectory pilot = simulate_trajectory(model, theta1(0.9), 1000000,
                                               {4, {purpose::data}});
  const double pilot_avg = pilot.values.mean();
  CHECK(pilot_avg > 0.55);
  CHECK(pilot_avg < 0.70);
  CHECK(std::abs(avg - pilot_avg) < 0.02);
}

TEST_CASE("logistic map stays inside the unit interval") {
  const ModelSpec model = make_logistic_map();
  Stream stream = derive_stream({5, {purpose::data}});
  for (double r : {0.0, 0.3, 0.7, 0.9, 1.0}) {
    const Eigen::MatrixXd u = stream.uniform_block(2000, 1);
    const Eigen::VectorXd traj = model.simulate(theta1(r), 2000, u);
    CHECK(traj.minCoeff() >= 0.0);
    CHECK(traj.maxCoeff() <= 1.0);
  }
}

TEST_CASE("burn-in shifts the recorded window") {
  const ModelSpec plain = make_logistic_map(0);
  const ModelSpec burned = make_logistic_map(2);
  Eigen::MatrixXd u = Eigen::MatrixXd::Zero(4, 1);
  u(0, 0) = 0.5;
  const Eigen::VectorXd a = plain.simulate(theta1(0.9), 4, u);
  const Eigen::VectorXd b = burned.simulate(theta1(0.9), 4, u);
  CHECK(b(0) == a(2));
  CHECK(b(1) == a(3));
}

TEST_CASE("noisy logistic map") {
  const ModelSpec model = make_noisy_logistic();
  const ModelSpec hidden = make_logistic_map();

  Stream stream = derive_stream({6, {purpose::data}});
  const Eigen::MatrixXd u = stream.uniform_block(200, 2);

  Eigen::Vector2d theta(0.9, 1e-12);
  const Eigen::VectorXd nearly_clean = model.simulate(theta, 200, u);
  const Eigen::VectorXd states = hidden.simulate(theta1(0.9), 200, u.col(0));
  CHECK((nearly_clean - states).cwiseAbs().maxCoeff() < 1e-10);

  // Noise scales exactly with sigma on a fixed block.
  const Eigen::VectorXd lo = model.simulate(Eigen::Vector2d(0.9, 0.1), 200, u);
  const Eigen::VectorXd hi = model.simulate(Eigen::Vector2d(0.9, 0.2), 200, u);
  const Eigen::VectorXd lo_noise = lo - states;
  const Eigen::VectorXd hi_noise = hi - states;
  CHECK((hi_noise - 2.0 * lo_noise).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(model.simulate(Eigen::Vector2d(0.9, -0.1), 200, u),
                  ParameterError);
  CHECK_THROWS_AS(model.simulate(Eigen::Vector2d(2.0, 0.1), 200, u),
                  ParameterError);
}

TEST_CASE("common random numbers give bit-identical re-simulation") {
  for (const auto& id : registered_models()) {
    const ModelSpec model = make_model(id);
    Stream stream = derive_stream({7, {purpose::data}});
    const Eigen::MatrixXd u = stream.uniform_block(64, model.draws_per_step);
    Eigen::VectorXd theta = 0.5 * (model.box.lower + model.box.upper);
    const Eigen::VectorXd a = model.simulate(theta, 64, u);
    const Eigen::VectorXd b = model.simulate(theta, 64, u);
    CHECK(a == b);
  }
}

TEST_CASE("trajectory carries its provenance") {
  const ModelSpec model = make_gaussian_location();
  const SeedSpec seed{11, {purpose::data, 3}};
  const Trajectory traj = simulate_trajectory(model, theta1(1.0), 32, seed);
  CHECK(traj.values.size() == 32);
  CHECK(traj.theta_used(0) == 1.0);
  CHECK(traj.seed.master_seed == 11);
  CHECK(traj.seed.path == seed.path);
}

TEST_CASE("param space validation") {
  ParamSpace box;
  box.lower = Eigen::Vector2d(0.0, 1.0);
  box.upper = Eigen::Vector2d(1.0, 1.0);
  box.names = {"a", "b"};
  CHECK_THROWS_AS(box.validate(), ConfigError);
  box.upper(1) = 2.0;
  box.validate();
  CHECK(box.contains(Eigen::Vector2d(0.5, 1.5)));
  CHECK(!box.contains(Eigen::Vector2d(1.5, 1.5)));
}
