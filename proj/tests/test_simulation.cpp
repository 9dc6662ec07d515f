#include <numbers>

#include <doctest.h>

#include "iekf/errors.hpp"
#include "iekf/simulation.hpp"

using namespace iekf;
using namespace iekf::sim;
using Eigen::Matrix3d;
using Eigen::Vector3d;

namespace {

ScenarioConfig noisy_scenario(std::uint64_t seed) {
  ScenarioConfig cfg;
  cfg.duration = 5.0;
  cfg.dt = 0.01;
  cfg.omega.kind = OmegaProfile::Kind::kSinusoidal;
  cfg.omega.offset = Vector3d(0.1, -0.2, 0.3);
  cfg.omega.amplitude = Vector3d(0.5, 0.4, 0.3);
  cfg.omega.frequency_hz = Vector3d(0.2, 0.3, 0.1);
  cfg.gyro_noise_std = 0.02;
  cfg.measurement_noise_std = 0.05;
  cfg.initial_attitude_error_std = 0.1;
  cfg.seed = seed;
  return cfg;
}

bool same_runs(const ScenarioRun& a, const ScenarioRun& b) {
  if (a.timestamps != b.timestamps || a.initial_estimate != b.initial_estimate) return false;
  for (std::size_t k = 0; k < a.timestamps.size(); ++k) {
    if (a.ground_truth[k] != b.ground_truth[k] || a.inputs[k] != b.inputs[k] ||
        a.measurements[k] != b.measurements[k]) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("simulation") {

TEST_CASE("config validation names the field") {
  ScenarioConfig cfg;
  cfg.dt = 0.0;
  try {
    cfg.validate();
    FAIL("expected a contract violation");
  } catch (const ContractViolation& e) {
    CHECK(std::string(e.what()).find("dt") != std::string::npos);
  }
  cfg = ScenarioConfig{};
  cfg.reference_directions = {Vector3d(1, 1, 0)};
  CHECK_THROWS_AS(cfg.validate(), ContractViolation);
  cfg = ScenarioConfig{};
  cfg.duration = 0.001;
  CHECK_THROWS_AS(cfg.validate(), ContractViolation);
}

TEST_CASE("a full revolution returns to the start") {
  ScenarioConfig cfg;
  cfg.omega.offset = Vector3d(0, 0, 0.5);
  cfg.duration = 2.0 * std::numbers::pi / 0.5;
  cfg.dt = cfg.duration / 1000.0;
  const auto run = generate(cfg);
  CHECK(run.ground_truth.size() == 1001);
  CHECK((run.ground_truth.back() - run.ground_truth.front()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("generated sequences") {
  ScenarioConfig cfg = noisy_scenario(3);
  cfg.gyro_noise_std = 0.0;
  cfg.measurement_noise_std = 0.0;
  const auto run = generate(cfg);
  const auto n = run.timestamps.size();
  CHECK(n == static_cast<std::size_t>(cfg.steps() + 1));
  CHECK(run.ground_truth.size() == n);
  CHECK(run.inputs.size() == n);
  CHECK(run.measurements.size() == n);
  const auto mm = direction_measurement_model(cfg);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    CHECK(run.inputs[k] == cfg.omega.at(run.timestamps[k]));
    CHECK((run.ground_truth[k + 1] - run.ground_truth[k] * so3::exp(run.inputs[k] * cfg.dt)).norm() == 0.0);
    CHECK(run.measurements[k] == mm.h(ManifoldPoint::from_rotation(run.ground_truth[k])));
  }
}

TEST_CASE("generation is deterministic in the seed") {
  CHECK(same_runs(generate(noisy_scenario(7)), generate(noisy_scenario(7))));
  CHECK_FALSE(same_runs(generate(noisy_scenario(7)), generate(noisy_scenario(8))));
}

TEST_CASE("noiseless runs are tracked exactly") {
  for (auto conv : {So3Convention::kRightPerturbation, So3Convention::kLeftPerturbation}) {
    ScenarioConfig cfg = noisy_scenario(1);
    cfg.gyro_noise_std = cfg.measurement_noise_std = cfg.initial_attitude_error_std = 0.0;
    cfg.convention = conv;
    const auto m = run_filter(generate(cfg), cfg, IekfConfig{});
    CHECK(m.attitude_rmse < 1e-9);
    CHECK(m.steps.size() == static_cast<std::size_t>(cfg.steps()));
  }
}

TEST_CASE("iterating helps with a large initial error") {
  double ekf_sq = 0.0, iekf_sq = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ScenarioConfig cfg = noisy_scenario(seed);
    cfg.initial_attitude_error_std = 0.5;
    cfg.measurement_noise_std = 0.01;
    const auto run = generate(cfg);
    IekfConfig ekf;
    ekf.max_iterations = 1;
    const auto e = run_filter(run, cfg, ekf);
    const auto i = run_filter(run, cfg, IekfConfig{});
    ekf_sq += e.attitude_rmse * e.attitude_rmse;
    iekf_sq += i.attitude_rmse * i.attitude_rmse;
    CHECK(i.steps.front().err_rad < 0.1);
  }
  CHECK(std::sqrt(iekf_sq / 5) <= std::sqrt(ekf_sq / 5) + 1e-6);
}

TEST_CASE("conventions reach the same final error") {
  ScenarioConfig cfg = noisy_scenario(11);
  const auto run = generate(cfg);
  const auto right = run_filter(run, cfg, IekfConfig{});
  cfg.convention = So3Convention::kLeftPerturbation;
  const auto left = run_filter(run, cfg, IekfConfig{});
  CHECK(std::abs(right.final_error - left.final_error) <= 0.1 * std::max(right.final_error, left.final_error));
}

TEST_CASE("mild scenario converges in few iterations") {
  ScenarioConfig cfg = noisy_scenario(12);
  cfg.initial_attitude_error_std = 0.05;
  cfg.gyro_noise_std = 0.005;
  cfg.measurement_noise_std = 0.01;
  const auto m = run_filter(generate(cfg), cfg, IekfConfig{});
  CHECK(m.mean_iterations <= 3.0);
  CHECK(m.attitude_rmse < 0.05);
}

TEST_CASE("monte carlo") {
  ScenarioConfig cfg = noisy_scenario(100);
  cfg.duration = 1.0;
  SUBCASE("one trial equals a single run") {
    const auto mc = monte_carlo(cfg, IekfConfig{}, 1);
    const auto single = run_filter(generate(cfg), cfg, IekfConfig{});
    CHECK(mc.attitude_rmse == single.attitude_rmse);
    CHECK(mc.mean_nees == single.mean_nees);
    CHECK(mc.nees_sequence == single.nees_sequence);
    CHECK(mc.within_3sigma_fraction == single.within_3sigma_fraction);
  }
  SUBCASE("thread count does not change the result") {
    const auto a = monte_carlo(cfg, IekfConfig{}, 8, 1);
    const auto b = monte_carlo(cfg, IekfConfig{}, 8, 4);
    CHECK(a.attitude_rmse == b.attitude_rmse);
    CHECK(a.nees_sequence == b.nees_sequence);
    CHECK(a.trials == 8);
  }
  SUBCASE("invalid trial count") { CHECK_THROWS_AS(monte_carlo(cfg, IekfConfig{}, 0), ContractViolation); }
}

TEST_CASE("filter failures carry the step index") {
  ScenarioConfig cfg = noisy_scenario(5);
  cfg.gyro_noise_std = 0.0;
  cfg.initial_attitude_error_std = 0.0;
  IekfConfig fc;
  fc.update_variant = UpdateVariant::kInformationForm;
  try {
    run_filter(generate(cfg), cfg, fc);
    FAIL("expected a step failure");
  } catch (const StepFailure& e) {
    CHECK(e.step() == 1);
  }
}

}  // TEST_SUITE
