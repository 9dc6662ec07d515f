#pragma once

#include <Eigen/Core>

namespace iekf {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Condition number above which S or L P Lᵀ is treated as singular.
inline constexpr double kMaxConditionNumber = 1e12;

/// Measurement reduced to at most d rows by a QR factorization of H.
struct CompressedMeasurement {
  MatrixXd T_H;    // r x d, upper triangular
  VectorXd r_q;    // Q1ᵀ·residual
  MatrixXd R_q;    // Q1ᵀ·R·Q1
  bool whitened = false;  // true if H and the residual were pre-multiplied by R^{-1/2}
};

/// H = [Q1 Q2]·[T_H; 0]. When R is not isotropic the measurement is whitened
/// first (R = Lr·Lrᵀ, H ← Lr⁻¹H, residual ← Lr⁻¹residual, R ← I) so that the
/// compressed update stays exact. Rows of T_H whose diagonal magnitude is at
/// most 1e-10·‖H‖ are dropped.
/// Throws ContractViolation if H has fewer rows than columns or R is not
/// positive definite.
CompressedMeasurement qr_compress(const MatrixXd& H, const VectorXd& residual, const MatrixXd& R);

/// K = L P Lᵀ Hᵀ S⁻¹ with S = H L P Lᵀ Hᵀ + R, solved through a Cholesky
/// factorization of S. Throws SingularInnovation if cond(S) > 1e12.
MatrixXd standard_gain(const MatrixXd& H, const MatrixXd& L, const MatrixXd& P_minus,
                       const MatrixXd& R);

/// K = [Hᵀ R⁻¹ H + (L P Lᵀ)⁻¹]⁻¹ Hᵀ R⁻¹. Inverts a d x d matrix instead of
/// the m x m innovation covariance. Throws SingularPrior if cond(L P Lᵀ) > 1e12.
MatrixXd information_form_gain(const MatrixXd& H, const MatrixXd& L, const MatrixXd& P_minus,
                               const MatrixXd& R);

}  // namespace iekf
