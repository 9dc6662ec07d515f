#pragma once

#include <Eigen/Core>

// SO3 kernel: hat/vee, exponential and logarithm maps, and the right/left
// Jacobians with their inverses. All functions are pure.
namespace iekf::so3 {

using Matrix3 = Eigen::Matrix3d;
using Vector3 = Eigen::Vector3d;

/// Below this rotation angle the closed forms are replaced by Taylor series.
inline constexpr double kSmallAngle = 1e-4;

/// jr_inv / jl_inv are only defined for angles below pi minus this margin.
inline constexpr double kInverseJacobianMargin = 1e-3;

/// Tolerance used when checking RᵀR = I and det R = 1.
inline constexpr double kRotationTolerance = 1e-9;

Matrix3 hat(const Vector3& phi);
Vector3 vee(const Matrix3& skew);

Matrix3 exp(const Vector3& phi);

/// Principal logarithm, ‖φ‖ ≤ π. At exactly π the axis whose first nonzero
/// component is positive is returned. Throws ContractViolation if R is not a
/// rotation.
Vector3 log(const Matrix3& rotation);

Matrix3 jr(const Vector3& phi);
Matrix3 jl(const Vector3& phi);
/// Throws DomainError for ‖φ‖ ≥ π - kInverseJacobianMargin.
Matrix3 jr_inv(const Vector3& phi);
/// Throws DomainError for ‖φ‖ ≥ π - kInverseJacobianMargin.
Matrix3 jl_inv(const Vector3& phi);

bool is_rotation(const Matrix3& rotation, double tolerance = kRotationTolerance);

/// Nearest rotation in the Frobenius sense (SVD projection). Only meant for
/// matrices coming from outside the library.
Matrix3 project_to_rotation(const Matrix3& m);

}  // namespace iekf::so3
