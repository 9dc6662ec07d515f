#include "iekf/so3.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "iekf/errors.hpp"

namespace iekf::so3 {

Matrix3 hat(const Vector3& phi) {
  Matrix3 w;
  w << 0.0, -phi.z(), phi.y(),
       phi.z(), 0.0, -phi.x(),
       -phi.y(), phi.x(), 0.0;
  return w;
}

Vector3 vee(const Matrix3& skew) { return {skew(2, 1), skew(0, 2), skew(1, 0)}; }

Matrix3 exp(const Vector3& phi) {
  const double theta2 = phi.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Matrix3 w = hat(phi);
  double a;  // sin(θ)/θ
  double b;  // (1 - cos θ)/θ²
  if (theta < kSmallAngle) {
    a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
    b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
  } else {
    const double half_sin = std::sin(0.5 * theta);
    a = std::sin(theta) / theta;
    b = 2.0 * half_sin * half_sin / theta2;
  }
  return Matrix3::Identity() + a * w + b * w * w;
}

Vector3 log(const Matrix3& rotation) {
  if (!is_rotation(rotation)) {
    throw ContractViolation("so3::log: matrix is not a rotation");
  }
  const double cos_theta = std::clamp(0.5 * (rotation.trace() - 1.0), -1.0, 1.0);
  // (R - Rᵀ)/2 = sin(θ) [n]x
  const Vector3 w = 0.5 * vee(rotation - rotation.transpose());
  const double sin_theta = w.norm();
  const double theta = std::atan2(sin_theta, cos_theta);

  if (theta < kSmallAngle) {
    const double theta2 = theta * theta;
    return (1.0 + theta2 / 6.0 + 7.0 * theta2 * theta2 / 360.0) * w;
  }
  if (cos_theta > -0.999) {
    return (theta / sin_theta) * w;
  }

  // Near π the antisymmetric part vanishes. Recover the axis from the
  // symmetric part, (R + Rᵀ)/2 - cos(θ) I = (1 - cos θ) n nᵀ, using the
  // column with the largest diagonal entry.
  const Matrix3 outer =
      0.5 * (rotation + rotation.transpose()) - cos_theta * Matrix3::Identity();
  Eigen::Index k = 0;
  outer.diagonal().maxCoeff(&k);
  Vector3 axis = outer.col(k).normalized();

  const double alignment = axis.dot(w);
  if (std::abs(alignment) > 1e-12) {
    if (alignment < 0.0) axis = -axis;
  } else {
    // Exactly π: both branches are valid, pick the one whose first nonzero
    // component is positive.
    for (int i = 0; i < 3; ++i) {
      if (std::abs(axis[i]) > 1e-12) {
        if (axis[i] < 0.0) axis = -axis;
        break;
      }
    }
  }
  return theta * axis;
}

Matrix3 jr(const Vector3& phi) {
  const double theta2 = phi.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Matrix3 w = hat(phi);
  double a;  // (1 - cos θ)/θ²
  double b;  // (θ - sin θ)/θ³
  if (theta < kSmallAngle) {
    a = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
    b = 1.0 / 6.0 - theta2 / 120.0 + theta2 * theta2 / 5040.0;
  } else {
    const double half_sin = std::sin(0.5 * theta);
    a = 2.0 * half_sin * half_sin / theta2;
    b = (theta - std::sin(theta)) / (theta2 * theta);
  }
  return Matrix3::Identity() - a * w + b * w * w;
}

Matrix3 jl(const Vector3& phi) {
  const double theta2 = phi.squaredNorm();
  const double theta = std::sqrt(theta2);
  const Matrix3 w = hat(phi);
  double a;
  double b;
  if (theta < kSmallAngle) {
    a = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
    b = 1.0 / 6.0 - theta2 / 120.0 + theta2 * theta2 / 5040.0;
  } else {
    const double half_sin = std::sin(0.5 * theta);
    a = 2.0 * half_sin * half_sin / theta2;
    b = (theta - std::sin(theta)) / (theta2 * theta);
  }
  return Matrix3::Identity() + a * w + b * w * w;
}

namespace {

// 1/θ² - (1 + cos θ)/(2θ sin θ)
double inverse_jacobian_coefficient(const Vector3& phi, const char* who) {
  const double theta2 = phi.squaredNorm();
  const double theta = std::sqrt(theta2);
  if (!(theta < std::numbers::pi - kInverseJacobianMargin)) {
    throw DomainError(std::string(who) + ": rotation angle too close to pi");
  }
  if (theta < kSmallAngle) {
    return 1.0 / 12.0 + theta2 / 720.0 + theta2 * theta2 / 30240.0;
  }
  return 1.0 / theta2 - (1.0 + std::cos(theta)) / (2.0 * theta * std::sin(theta));
}

}  // namespace

Matrix3 jr_inv(const Vector3& phi) {
  const double c = inverse_jacobian_coefficient(phi, "so3::jr_inv");
  const Matrix3 w = hat(phi);
  return Matrix3::Identity() + 0.5 * w + c * w * w;
}

Matrix3 jl_inv(const Vector3& phi) {
  const double c = inverse_jacobian_coefficient(phi, "so3::jl_inv");
  const Matrix3 w = hat(phi);
  return Matrix3::Identity() - 0.5 * w + c * w * w;
}

bool is_rotation(const Matrix3& rotation, double tolerance) {
  if (!rotation.allFinite()) return false;
  const double orthonormality =
      (rotation.transpose() * rotation - Matrix3::Identity()).cwiseAbs().maxCoeff();
  return orthonormality <= tolerance && std::abs(rotation.determinant() - 1.0) <= tolerance;
}

Matrix3 project_to_rotation(const Matrix3& m) {
  Eigen::JacobiSVD<Matrix3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Matrix3 u = svd.matrixU();
  const Matrix3 v = svd.matrixV();
  if ((u * v.transpose()).determinant() < 0.0) u.col(2) = -u.col(2);
  return u * v.transpose();
}

}  // namespace iekf::so3
