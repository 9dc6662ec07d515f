#include "iekf/simulation.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <random>
#include <thread>

#include <Eigen/QR>

#include "iekf/errors.hpp"

namespace iekf::sim {

Vector3 OmegaProfile::at(double t) const {
  if (kind == Kind::kConstant) return offset;
  const Vector3 phase = 2.0 * std::numbers::pi * t * frequency_hz;
  return offset + amplitude.cwiseProduct(phase.array().sin().matrix());
}

void ScenarioConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw ContractViolation("scenario." + field + ": " + why);
  };
  if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt", "must be > 0");
  if (!(duration >= dt) || !std::isfinite(duration)) fail("duration", "must be >= dt");
  if (!(gyro_noise_std >= 0.0)) fail("gyro_noise_std", "must be >= 0");
  if (!(measurement_noise_std >= 0.0)) fail("measurement_noise_std", "must be >= 0");
  if (!(initial_attitude_error_std >= 0.0)) fail("initial_attitude_error_std", "must be >= 0");
  if (reference_directions.empty()) fail("reference_directions", "needs at least one direction");
  for (const auto& d : reference_directions) {
    if (!d.allFinite() || std::abs(d.norm() - 1.0) > 1e-12) {
      fail("reference_directions", "directions must be unit vectors");
    }
  }
  if (!omega.offset.allFinite() || !omega.amplitude.allFinite() || !omega.frequency_hz.allFinite()) {
    fail("omega", "parameters must be finite");
  }
}

int ScenarioConfig::steps() const { return static_cast<int>(std::llround(duration / dt)); }

namespace {

Eigen::VectorXd observe(const Matrix3& rotation, const std::vector<Vector3>& directions) {
  Eigen::VectorXd z(3 * static_cast<Eigen::Index>(directions.size()));
  for (std::size_t i = 0; i < directions.size(); ++i) {
    z.segment<3>(3 * static_cast<Eigen::Index>(i)) = rotation.transpose() * directions[i];
  }
  return z;
}

Vector3 draw(std::mt19937_64& rng, double stddev) {
  std::normal_distribution<double> n(0.0, 1.0);
  Vector3 v;
  for (int i = 0; i < 3; ++i) v[i] = stddev * n(rng);
  return v;
}

}  // namespace

ScenarioRun generate(const ScenarioConfig& cfg) {
  cfg.validate();
  const int n = cfg.steps();
  std::mt19937_64 rng(cfg.seed);

  ScenarioRun run;
  run.timestamps.reserve(n + 1);
  run.ground_truth.reserve(n + 1);
  run.inputs.reserve(n + 1);
  run.measurements.reserve(n + 1);

  Matrix3 truth = Matrix3::Identity();
  const Vector3 initial_error = draw(rng, cfg.initial_attitude_error_std);
  // truth = estimate ⊞ e0 in either convention.
  run.initial_estimate = so3_boxplus(truth, -initial_error, cfg.convention);

  const auto m = 3 * static_cast<Eigen::Index>(cfg.reference_directions.size());
  std::normal_distribution<double> unit(0.0, 1.0);
  for (int k = 0; k <= n; ++k) {
    const double t = k * cfg.dt;
    const Vector3 omega = cfg.omega.at(t);
    run.timestamps.push_back(t);
    run.ground_truth.push_back(truth);
    run.inputs.push_back(omega + draw(rng, cfg.gyro_noise_std));
    Eigen::VectorXd z = observe(truth, cfg.reference_directions);
    for (Eigen::Index i = 0; i < m; ++i) z[i] += cfg.measurement_noise_std * unit(rng);
    run.measurements.push_back(std::move(z));
    truth = truth * so3::exp(omega * cfg.dt);
  }
  return run;
}

ProcessModel gyro_process_model(const ScenarioConfig& cfg) {
  const double dt = cfg.dt;
  const So3Convention conv = cfg.convention;
  ProcessModel model;
  model.f = [dt](const ManifoldPoint& x, const Eigen::VectorXd& u, const Eigen::VectorXd& w) {
    return ManifoldPoint::from_rotation(x.rotation() * so3::exp((u + w) * dt));
  };
  model.jacobian_F = [dt, conv](const ManifoldPoint&, const Eigen::VectorXd& u) {
    return Eigen::MatrixXd(so3_propagation_jacobian_F(u * dt, conv));
  };
  model.Q = cfg.gyro_noise_std * cfg.gyro_noise_std * Eigen::MatrixXd::Identity(3, 3);
  return model;
}

MeasurementModel direction_measurement_model(const ScenarioConfig& cfg) {
  const auto directions = cfg.reference_directions;
  const So3Convention conv = cfg.convention;
  const auto m = 3 * static_cast<Eigen::Index>(directions.size());
  MeasurementModel model;
  model.h = [directions](const ManifoldPoint& x) { return observe(x.rotation(), directions); };
  model.jacobian_H = [directions, conv, m](const ManifoldPoint& x) {
    const Matrix3& r = x.rotation();
    Eigen::MatrixXd h(m, 3);
    for (std::size_t i = 0; i < directions.size(); ++i) {
      const auto row = 3 * static_cast<Eigen::Index>(i);
      if (conv == So3Convention::kRightPerturbation) {
        h.block<3, 3>(row, 0) = so3::hat(r.transpose() * directions[i]);
      } else {
        h.block<3, 3>(row, 0) = r.transpose() * so3::hat(directions[i]);
      }
    }
    return h;
  };
  const double sigma = std::max(cfg.measurement_noise_std, kMinFilterMeasurementStd);
  model.R = sigma * sigma * Eigen::MatrixXd::Identity(m, m);
  return model;
}

StepFailure::StepFailure(int step, const std::string& what)
    : NumericalFailure("step " + std::to_string(step) + ": " + what), step_(step) {}

RunMetrics run_filter(const ScenarioRun& run, const ScenarioConfig& cfg, const IekfConfig& fcfg) {
  cfg.validate();
  const std::size_t n = run.ground_truth.size();
  if (n < 2 || run.inputs.size() != n || run.measurements.size() != n || run.timestamps.size() != n) {
    throw ContractViolation("run_filter: scenario run sequences are inconsistent");
  }

  const IteratedEkf filter(Manifold::so3(cfg.convention), fcfg);
  const ProcessModel process = gyro_process_model(cfg);
  const MeasurementModel measurement = direction_measurement_model(cfg);
  if (run.measurements.front().size() != measurement.R.rows()) {
    throw ContractViolation("run_filter: measurement size does not match reference directions");
  }

  const double var0 = cfg.initial_attitude_error_std * cfg.initial_attitude_error_std;
  GaussianState state{ManifoldPoint::from_rotation(run.initial_estimate),
                      var0 * Eigen::MatrixXd::Identity(3, 3)};

  RunMetrics metrics;
  metrics.steps.reserve(n - 1);
  metrics.nees_sequence.reserve(n - 1);
  double sq_sum = 0.0;
  double nees_sum = 0.0;
  double iter_sum = 0.0;
  int inside = 0;

  for (std::size_t k = 1; k < n; ++k) {
    FilterResult result;
    try {
      result = filter.step(state, process, run.inputs[k - 1], measurement, run.measurements[k]);
    } catch (const std::exception& e) {
      throw StepFailure(static_cast<int>(k), e.what());
    }
    state = std::move(result.state);

    const Vector3 err = so3_boxminus(run.ground_truth[k], state.mean.rotation(), cfg.convention);
    const Eigen::Matrix3d p = state.covariance;
    const double nees = err.dot(p.completeOrthogonalDecomposition().solve(err));
    for (int a = 0; a < 3; ++a) {
      if (std::abs(err[a]) <= 3.0 * std::sqrt(std::max(p(a, a), 0.0))) ++inside;
    }

    StepRecord rec;
    rec.t = run.timestamps[k];
    rec.err_rad = err.norm();
    rec.nees = nees;
    rec.iterations = result.report.iterations_used;
    rec.delta_norm_final = result.report.delta_norms.back();
    rec.trace_P = p.trace();
    metrics.steps.push_back(rec);
    metrics.nees_sequence.push_back(nees);

    sq_sum += err.squaredNorm();
    nees_sum += nees;
    iter_sum += rec.iterations;
  }

  const double count = static_cast<double>(n - 1);
  metrics.attitude_rmse = std::sqrt(sq_sum / count);
  metrics.final_error = metrics.steps.back().err_rad;
  metrics.mean_nees = nees_sum / count;
  metrics.mean_iterations = iter_sum / count;
  metrics.within_3sigma_fraction = inside / (3.0 * count);
  return metrics;
}

RunMetrics monte_carlo(const ScenarioConfig& cfg, const IekfConfig& fcfg, int trials,
                       unsigned threads) {
  if (trials < 1) throw ContractViolation("monte_carlo: trials must be >= 1");
  cfg.validate();

  std::vector<RunMetrics> results(static_cast<std::size_t>(trials));
  std::vector<std::exception_ptr> errors(results.size());
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < trials; i = next++) {
      try {
        ScenarioConfig trial = cfg;
        trial.seed = cfg.seed + static_cast<std::uint64_t>(i);
        results[i] = run_filter(generate(trial), trial, fcfg);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(trials));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  // Reduction in trial order, independent of completion order.
  const std::size_t steps = results.front().steps.size();
  const double count = trials;
  RunMetrics agg;
  agg.trials = trials;
  agg.steps.resize(steps);
  agg.nees_sequence.assign(steps, 0.0);
  double rmse_sq = 0.0;
  for (const auto& r : results) {
    rmse_sq += r.attitude_rmse * r.attitude_rmse;
    agg.final_error += r.final_error;
    agg.mean_nees += r.mean_nees;
    agg.mean_iterations += r.mean_iterations;
    agg.within_3sigma_fraction += r.within_3sigma_fraction;
    for (std::size_t k = 0; k < steps; ++k) {
      const StepRecord& s = r.steps[k];
      StepRecord& a = agg.steps[k];
      a.t = s.t;
      a.err_rad += s.err_rad * s.err_rad;
      a.nees += s.nees;
      a.iterations += s.iterations;
      a.delta_norm_final += s.delta_norm_final;
      a.trace_P += s.trace_P;
    }
  }
  agg.attitude_rmse = std::sqrt(rmse_sq / count);
  agg.final_error /= count;
  agg.mean_nees /= count;
  agg.mean_iterations /= count;
  agg.within_3sigma_fraction /= count;
  for (std::size_t k = 0; k < steps; ++k) {
    StepRecord& a = agg.steps[k];
    a.err_rad = std::sqrt(a.err_rad / count);  // RMS across trials
    a.nees /= count;
    a.iterations /= count;
    a.delta_norm_final /= count;
    a.trace_P /= count;
    agg.nees_sequence[k] = a.nees;
  }
  return agg;
}

}  // namespace iekf::sim
