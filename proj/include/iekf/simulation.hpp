#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "iekf/errors.hpp"
#include "iekf/filter.hpp"
#include "iekf/so3.hpp"
#include "iekf/so3_manifold.hpp"

// Synthetic attitude scenario: a rigid body rotates with a known body-rate
// profile, a gyro reports the rate with white noise, and a sensor observes a
// set of known world-frame directions expressed in the body frame.
namespace iekf::sim {

using so3::Matrix3;
using so3::Vector3;

struct OmegaProfile {
  enum class Kind { kConstant, kSinusoidal };
  Kind kind = Kind::kConstant;
  /// Constant part of the body rate (rad/s).
  Vector3 offset = Vector3::Zero();
  /// Sinusoidal part: amplitude ⊙ sin(2π·frequency_hz ⊙ t). Ignored for kConstant.
  Vector3 amplitude = Vector3::Zero();
  Vector3 frequency_hz = Vector3::Zero();

  Vector3 at(double t) const;
};

struct ScenarioConfig {
  double duration = 10.0;
  double dt = 0.01;
  OmegaProfile omega;
  /// Standard deviation of the per-step gyro noise (rad/s).
  double gyro_noise_std = 0.0;
  std::vector<Vector3> reference_directions = {Vector3::UnitX(), Vector3::UnitZ()};
  double measurement_noise_std = 0.0;
  double initial_attitude_error_std = 0.0;
  So3Convention convention = So3Convention::kRightPerturbation;
  std::uint64_t seed = 0;

  /// Throws ContractViolation naming the offending field.
  void validate() const;
  int steps() const;
};

struct ScenarioRun {
  std::vector<double> timestamps;
  std::vector<Matrix3> ground_truth;
  /// inputs[k] is the gyro sample held over [t_k, t_{k+1}]; the last one is unused.
  std::vector<Vector3> inputs;
  /// measurements[k] = h(ground_truth[k]) + noise. measurements[0] is unused by the filter.
  std::vector<Eigen::VectorXd> measurements;
  /// Starting estimate: truth = initial_estimate ⊞ e0, e0 ~ N(0, σ0² I), in the
  /// convention of the generating config.
  Matrix3 initial_estimate = Matrix3::Identity();
};

struct StepRecord {
  double t = 0.0;
  double err_rad = 0.0;
  double nees = 0.0;
  double iterations = 0.0;  // mean over trials for Monte Carlo records
  double delta_norm_final = 0.0;
  double trace_P = 0.0;
};

struct RunMetrics {
  double attitude_rmse = 0.0;
  double final_error = 0.0;
  std::vector<double> nees_sequence;
  double mean_nees = 0.0;
  double mean_iterations = 0.0;
  /// Fraction of (step, axis) pairs whose error lies inside ±3σ.
  double within_3sigma_fraction = 0.0;
  int trials = 1;
  std::vector<StepRecord> steps;
};

/// Deterministic given cfg.seed.
ScenarioRun generate(const ScenarioConfig& cfg);

/// Attitude-only process model: f(R, u, w) = R·Exp((u + w)·dt), Q = σ_g² I.
/// F uses the closed form, G is left to finite differences.
ProcessModel gyro_process_model(const ScenarioConfig& cfg);

/// Smallest measurement standard deviation handed to the filter, so that R
/// stays positive definite on noiseless scenarios.
inline constexpr double kMinFilterMeasurementStd = 1e-6;

/// h(R) = [Rᵀd₁; Rᵀd₂; ...] with the analytic H for the configured convention
/// and R = max(σ_m, kMinFilterMeasurementStd)² I.
MeasurementModel direction_measurement_model(const ScenarioConfig& cfg);

/// Runs the IEKF across the whole run. Errors at step k are R_true ⊟ R_est in
/// cfg.convention. Filter exceptions are rethrown as StepFailure.
RunMetrics run_filter(const ScenarioRun& run, const ScenarioConfig& cfg, const IekfConfig& fcfg);

/// Independent trials with seeds cfg.seed + i, run on up to `threads` worker
/// threads (0 = hardware concurrency). The reduction is order independent.
RunMetrics monte_carlo(const ScenarioConfig& cfg, const IekfConfig& fcfg, int trials,
                       unsigned threads = 0);

/// Filter failure annotated with the step at which it happened.
class StepFailure : public NumericalFailure {
 public:
  StepFailure(int step, const std::string& what);
  int step() const { return step_; }

 private:
  int step_;
};

}  // namespace iekf::sim
