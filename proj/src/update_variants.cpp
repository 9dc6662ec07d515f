#include "iekf/update_variants.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "iekf/errors.hpp"

namespace iekf {

namespace {

// Largest over smallest eigenvalue of a symmetric matrix; infinity if not
// positive definite.
double spd_condition(const MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

Eigen::LLT<MatrixXd> factor_noise(const MatrixXd& R, const char* who) {
  Eigen::LLT<MatrixXd> llt(R);
  if (llt.info() != Eigen::Success) {
    throw ContractViolation(std::string(who) + ": measurement covariance is not positive definite");
  }
  return llt;
}

}  // namespace

CompressedMeasurement qr_compress(const MatrixXd& H, const VectorXd& residual, const MatrixXd& R) {
  const auto m = H.rows();
  const auto d = H.cols();
  if (m < d) {
    throw ContractViolation("qr_compress: H has " + std::to_string(m) + " rows but " +
                            std::to_string(d) + " columns");
  }
  if (residual.size() != m || R.rows() != m || R.cols() != m) {
    throw ContractViolation("qr_compress: dimension mismatch");
  }
  const auto llt = factor_noise(R, "qr_compress");

  const double sigma2 = R.trace() / static_cast<double>(m);
  const bool isotropic = (R - sigma2 * MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() <=
                         1e-12 * std::max(1.0, std::abs(sigma2));

  MatrixXd h = H;
  VectorXd r = residual;
  if (!isotropic) {
    h = llt.matrixL().solve(H);
    r = llt.matrixL().solve(residual);
  }

  Eigen::HouseholderQR<MatrixXd> qr(h);
  const MatrixXd upper = qr.matrixQR().topRows(d).triangularView<Eigen::Upper>();
  const VectorXd rotated = qr.householderQ().adjoint() * r;

  const double threshold = 1e-10 * h.norm();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < d; ++i) {
    if (std::abs(upper(i, i)) > threshold) keep.push_back(i);
  }

  CompressedMeasurement out;
  const auto rows = static_cast<Eigen::Index>(keep.size());
  out.T_H.resize(rows, d);
  out.r_q.resize(rows);
  for (Eigen::Index k = 0; k < rows; ++k) {
    out.T_H.row(k) = upper.row(keep[k]);
    out.r_q(k) = rotated(keep[k]);
  }
  out.whitened = !isotropic;
  out.R_q = (isotropic ? sigma2 : 1.0) * MatrixXd::Identity(rows, rows);
  return out;
}

MatrixXd standard_gain(const MatrixXd& H, const MatrixXd& L, const MatrixXd& P_minus,
                       const MatrixXd& R) {
  const MatrixXd p_l = L * P_minus * L.transpose();
  if (H.rows() == 0) return MatrixXd::Zero(H.cols(), 0);
  const MatrixXd hp = H * p_l;
  MatrixXd s = hp * H.transpose() + R;
  s = 0.5 * (s + s.transpose());
  const double cond = spd_condition(s);
  if (!(cond <= kMaxConditionNumber)) {
    throw SingularInnovation("innovation covariance is singular (condition number " +
                             std::to_string(cond) + ")");
  }
  // K = P_L Hᵀ S⁻¹  <=>  Kᵀ = S⁻¹ H P_L
  return s.llt().solve(hp).transpose();
}

MatrixXd information_form_gain(const MatrixXd& H, const MatrixXd& L, const MatrixXd& P_minus,
                               const MatrixXd& R) {
  MatrixXd p_l = L * P_minus * L.transpose();
  p_l = 0.5 * (p_l + p_l.transpose());
  const double cond = spd_condition(p_l);
  if (!(cond <= kMaxConditionNumber)) {
    throw SingularPrior("prior covariance is singular (condition number " +
                        std::to_string(cond) + ")");
  }
  const auto d = H.cols();
  if (H.rows() == 0) return MatrixXd::Zero(d, 0);
  const auto r_llt = factor_noise(R, "information_form_gain");
  const MatrixXd r_inv_h = r_llt.solve(H);
  const MatrixXd p_l_inv = p_l.llt().solve(MatrixXd::Identity(d, d));
  MatrixXd information = H.transpose() * r_inv_h + p_l_inv;
  information = 0.5 * (information + information.transpose());
  return information.llt().solve(r_inv_h.transpose());
}

}  // namespace iekf
