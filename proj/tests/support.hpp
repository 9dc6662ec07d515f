#pragma once

// Test-only oracles. Nothing here calls into the filter or the manifold
// classes; they are written from the defining formulas so they can check
// those implementations independently.

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Core>
#include <Eigen/LU>

namespace testing {

using Eigen::Matrix3d;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

inline Matrix3d skew(const Vector3d& v) {
  Matrix3d m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

/// Σ_{k=0}^{terms-1} W^k / k!
inline Matrix3d series_exp(const Vector3d& phi, int terms = 30) {
  const Matrix3d w = skew(phi);
  Matrix3d sum = Matrix3d::Identity();
  Matrix3d term = Matrix3d::Identity();
  for (int k = 1; k < terms; ++k) {
    term = term * w / k;
    sum += term;
  }
  return sum;
}

/// Right Jacobian as Σ (-W)^k / (k+1)!; sign = +1 gives the left Jacobian.
inline Matrix3d series_jacobian(const Vector3d& phi, double sign, int terms = 40) {
  const Matrix3d w = sign * skew(phi);
  Matrix3d sum = Matrix3d::Identity();
  Matrix3d term = Matrix3d::Identity();
  for (int k = 1; k < terms; ++k) {
    term = term * w / (k + 1);
    sum += term;
  }
  return sum;
}
inline Matrix3d series_jr(const Vector3d& phi) { return series_jacobian(phi, -1.0); }
inline Matrix3d series_jl(const Vector3d& phi) { return series_jacobian(phi, +1.0); }

class Random {
 public:
  explicit Random(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  VectorXd vector(int n, double scale = 1.0) {
    VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = scale * normal();
    return v;
  }
  MatrixXd matrix(int r, int c, double scale = 1.0) {
    MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = scale * normal();
    return m;
  }
  Vector3d unit() {
    Vector3d v(normal(), normal(), normal());
    return v.normalized();
  }
  /// Axis-angle vector with norm uniform in [lo, hi).
  Vector3d axis_angle(double lo, double hi) { return unit() * uniform(lo, hi); }
  Matrix3d rotation() { return series_exp(axis_angle(0.0, std::numbers::pi)); }
  /// Well-conditioned SPD matrix: A Aᵀ + floor·I.
  MatrixXd spd(int n, double scale = 1.0, double floor = 0.1) {
    const MatrixXd a = matrix(n, n);
    return scale * (a * a.transpose() / n + floor * MatrixXd::Identity(n, n));
  }

 private:
  std::mt19937_64 rng_;
};

struct KalmanResult {
  VectorXd mean;
  MatrixXd cov;
};

/// Textbook linear KF: predict with x' = A x + B u, P' = A P Aᵀ + G Q Gᵀ,
/// then update with explicit inverses.
inline KalmanResult kalman_step(const VectorXd& x, const MatrixXd& p, const MatrixXd& a,
                                const MatrixXd& b, const VectorXd& u, const MatrixXd& g,
                                const MatrixXd& q, const MatrixXd& h, const MatrixXd& r,
                                const VectorXd& z) {
  const VectorXd xp = a * x + b * u;
  const MatrixXd pp = a * p * a.transpose() + g * q * g.transpose();
  const MatrixXd s = h * pp * h.transpose() + r;
  const MatrixXd k = pp * h.transpose() * s.inverse();
  const VectorXd xu = xp + k * (z - h * xp);
  const MatrixXd i = MatrixXd::Identity(x.size(), x.size());
  return {xu, (i - k * h) * pp};
}

}  // namespace testing
