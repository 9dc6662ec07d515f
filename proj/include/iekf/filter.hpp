#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "iekf/manifold.hpp"
#include "iekf/update_variants.hpp"

namespace iekf {

/// Mean on the manifold plus covariance in the tangent space at the mean.
/// The estimate relates to the true state by x = mean ⊞ δ, δ ~ N(0, covariance).
struct GaussianState {
  ManifoldPoint mean;
  MatrixXd covariance;
};

/// x_k = f(x_{k-1}, u_{k-1}, w_{k-1}), w ~ N(0, Q).
///
/// jacobian_F and jacobian_G are optional. When empty they are evaluated by
/// central finite differences through ⊞/⊟ at (x, u, w = 0).
struct ProcessModel {
  using Dynamics =
      std::function<ManifoldPoint(const ManifoldPoint& x, const VectorXd& u, const VectorXd& w)>;
  using Jacobian = std::function<MatrixXd(const ManifoldPoint& x, const VectorXd& u)>;

  Dynamics f;
  Jacobian jacobian_F;  // d x d
  Jacobian jacobian_G;  // d x q
  MatrixXd Q;           // q x q
};

/// z_k = h(x_k) + n_k, n ~ N(0, R). jacobian_H is optional (finite
/// differences through ⊞ when empty).
struct MeasurementModel {
  std::function<VectorXd(const ManifoldPoint& x)> h;
  std::function<MatrixXd(const ManifoldPoint& x)> jacobian_H;  // m x d
  MatrixXd R;                                                  // m x m
};

enum class UpdateVariant { kStandard, kQrCompressed, kInformationForm };

std::string to_string(UpdateVariant variant);

struct IekfConfig {
  int max_iterations = 10;
  double termination_threshold = 1e-8;
  /// Use the closed-form J (and L = J⁻¹). When false J ≈ I.
  bool exact_J = true;
  UpdateVariant update_variant = UpdateVariant::kStandard;

  /// Throws ContractViolation on n < 1 or ε <= 0.
  void validate() const;
};

struct UpdateReport {
  int iterations_used = 0;
  std::vector<double> delta_norms;
  bool converged = false;
  /// z - h(x⁺) at the returned mean.
  VectorXd innovation_final;
  /// Rows of the measurement actually used in the last iteration (< m after
  /// QR compression).
  int measurement_rows = 0;
};

struct FilterResult {
  GaussianState state;
  UpdateReport report;
};

/// Iterated EKF over an arbitrary Manifold. Holds no state between calls.
class IteratedEkf {
 public:
  explicit IteratedEkf(Manifold manifold, IekfConfig config = {});

  const Manifold& manifold() const { return manifold_; }
  const IekfConfig& config() const { return config_; }

  /// mean ← f(mean, u, 0), P ← F P Fᵀ + G Q Gᵀ (symmetrized).
  GaussianState propagate(const GaussianState& state, const ProcessModel& model,
                          const VectorXd& u) const;

  /// Gauss-Newton iterations starting at the prior mean. Each iteration
  /// linearizes h at the current iterate x_j and applies
  ///   δ = K[H L (x_j ⊟ x⁻) + z - h(x_j)] - L (x_j ⊟ x⁻),  x_{j+1} = x_j ⊞ δ
  /// until ‖δ‖ < ε or max_iterations. The covariance is updated once,
  /// P⁺ = (I - K H) L P⁻ Lᵀ, with the last iteration's K, H, L.
  FilterResult iterated_update(const GaussianState& prior, const MeasurementModel& model,
                               const VectorXd& z) const;

  /// Update Jacobian J at x_iter relative to x_prior (identity if !exact_J).
  MatrixXd compute_J(const ManifoldPoint& x_iter, const ManifoldPoint& x_prior) const;

  FilterResult step(const GaussianState& state, const ProcessModel& process, const VectorXd& u,
                    const MeasurementModel& measurement, const VectorXd& z) const;

 private:
  void check_state(const GaussianState& state, const char* who) const;

  Manifold manifold_;
  IekfConfig config_;
};

inline constexpr double kFiniteDifferenceStep = 1e-6;

/// ∂[f(x ⊞ ε, u, 0) ⊟ f(x, u, 0)]/∂ε by central differences.
MatrixXd numeric_propagation_jacobian(const Manifold& manifold, const ProcessModel& model,
                                      const ManifoldPoint& x, const VectorXd& u,
                                      double step = kFiniteDifferenceStep);

/// ∂[f(x, u, w) ⊟ f(x, u, 0)]/∂w at w = 0, noise dimension taken from Q.
MatrixXd numeric_noise_jacobian(const Manifold& manifold, const ProcessModel& model,
                                const ManifoldPoint& x, const VectorXd& u,
                                double step = kFiniteDifferenceStep);

/// ∂h(x ⊞ ε)/∂ε by central differences.
MatrixXd numeric_measurement_jacobian(const Manifold& manifold, const MeasurementModel& model,
                                      const ManifoldPoint& x,
                                      double step = kFiniteDifferenceStep);

/// ∂[(x_iter ⊞ ε) ⊟ x_prior]/∂ε by central differences.
MatrixXd numeric_update_jacobian(const Manifold& manifold, const ManifoldPoint& x_iter,
                                 const ManifoldPoint& x_prior,
                                 double step = kFiniteDifferenceStep);

}  // namespace iekf
