#include "iekf/filter.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "iekf/errors.hpp"

namespace iekf {

namespace {

bool finite_point(const ManifoldPoint& x) {
  for (const auto& c : x.components()) {
    const bool ok = std::visit([](const auto& v) { return v.allFinite(); }, c);
    if (!ok) return false;
  }
  return true;
}

MatrixXd symmetrized(const MatrixXd& p) { return 0.5 * (p + p.transpose()); }

}  // namespace

std::string to_string(UpdateVariant variant) {
  switch (variant) {
    case UpdateVariant::kStandard: return "standard";
    case UpdateVariant::kQrCompressed: return "qr";
    case UpdateVariant::kInformationForm: return "information";
  }
  return "unknown";
}

void IekfConfig::validate() const {
  if (max_iterations < 1) throw ContractViolation("IekfConfig: max_iterations must be >= 1");
  if (!(termination_threshold > 0.0)) {
    throw ContractViolation("IekfConfig: termination_threshold must be > 0");
  }
}

IteratedEkf::IteratedEkf(Manifold manifold, IekfConfig config)
    : manifold_(std::move(manifold)), config_(config) {
  config_.validate();
}

void IteratedEkf::check_state(const GaussianState& state, const char* who) const {
  manifold_.validate(state.mean);
  const int d = manifold_.tangent_dim();
  const MatrixXd& p = state.covariance;
  if (p.rows() != d || p.cols() != d) {
    throw ContractViolation(std::string(who) + ": covariance must be " + std::to_string(d) +
                            "x" + std::to_string(d));
  }
  if (!p.allFinite()) throw ContractViolation(std::string(who) + ": covariance is not finite");
  const double scale = std::max(1.0, p.cwiseAbs().maxCoeff());
  if ((p - p.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw ContractViolation(std::string(who) + ": covariance is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(p, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9 * scale) {
    throw ContractViolation(std::string(who) + ": covariance is not positive semidefinite");
  }
}

GaussianState IteratedEkf::propagate(const GaussianState& state, const ProcessModel& model,
                                     const VectorXd& u) const {
  check_state(state, "propagate");
  const auto q = model.Q.rows();
  if (model.Q.cols() != q) throw ContractViolation("propagate: Q must be square");

  ManifoldPoint mean = model.f(state.mean, u, VectorXd::Zero(q));
  if (!finite_point(mean)) throw NumericalFailure("propagate: dynamics returned non-finite state");

  const MatrixXd f = model.jacobian_F ? model.jacobian_F(state.mean, u)
                                      : numeric_propagation_jacobian(manifold_, model, state.mean, u);
  const int d = manifold_.tangent_dim();
  if (f.rows() != d || f.cols() != d) throw ContractViolation("propagate: F must be d x d");

  MatrixXd p = f * state.covariance * f.transpose();
  if (q > 0) {
    const MatrixXd g = model.jacobian_G ? model.jacobian_G(state.mean, u)
                                        : numeric_noise_jacobian(manifold_, model, state.mean, u);
    if (g.rows() != d || g.cols() != q) throw ContractViolation("propagate: G must be d x q");
    p += g * model.Q * g.transpose();
  }
  if (!p.allFinite()) throw NumericalFailure("propagate: covariance is not finite");
  return {std::move(mean), symmetrized(p)};
}

MatrixXd IteratedEkf::compute_J(const ManifoldPoint& x_iter, const ManifoldPoint& x_prior) const {
  const int d = manifold_.tangent_dim();
  if (!config_.exact_J) return MatrixXd::Identity(d, d);
  return manifold_.update_jacobian(x_iter, x_prior);
}

FilterResult IteratedEkf::iterated_update(const GaussianState& prior, const MeasurementModel& model,
                                          const VectorXd& z) const {
  check_state(prior, "iterated_update");
  const int d = manifold_.tangent_dim();
  const auto m = z.size();
  if (model.R.rows() != m || model.R.cols() != m) {
    throw ContractViolation("iterated_update: R must be m x m with m = " + std::to_string(m));
  }

  const MatrixXd identity = MatrixXd::Identity(d, d);
  const MatrixXd& p_prior = prior.covariance;

  UpdateReport report;
  ManifoldPoint x = prior.mean;
  MatrixXd gain;
  MatrixXd h_used;
  MatrixXd l = identity;

  for (int j = 0; j < config_.max_iterations; ++j) {
    const TangentVector dx = manifold_.boxminus(x, prior.mean);
    l = config_.exact_J ? MatrixXd(compute_J(x, prior.mean).inverse()) : identity;

    MatrixXd h = model.jacobian_H ? model.jacobian_H(x) : numeric_measurement_jacobian(manifold_, model, x);
    if (h.rows() != m || h.cols() != d) throw ContractViolation("iterated_update: H must be m x d");
    VectorXd residual = z - model.h(x);
    MatrixXd noise = model.R;

    switch (config_.update_variant) {
      case UpdateVariant::kStandard:
        gain = standard_gain(h, l, p_prior, noise);
        break;
      case UpdateVariant::kQrCompressed: {
        CompressedMeasurement c = qr_compress(h, residual, noise);
        h = std::move(c.T_H);
        residual = std::move(c.r_q);
        noise = std::move(c.R_q);
        gain = standard_gain(h, l, p_prior, noise);
        break;
      }
      case UpdateVariant::kInformationForm:
        gain = information_form_gain(h, l, p_prior, noise);
        break;
    }

    const VectorXd l_dx = l * dx;
    const VectorXd delta = gain * (h * l_dx + residual) - l_dx;
    if (!delta.allFinite()) {
      throw NumericalFailure("iterated_update: non-finite increment at iteration " +
                             std::to_string(j + 1));
    }
    x = manifold_.boxplus(x, delta);
    h_used = std::move(h);
    report.measurement_rows = static_cast<int>(h_used.rows());

    const double norm = delta.norm();
    report.delta_norms.push_back(norm);
    report.iterations_used = j + 1;
    if (norm < config_.termination_threshold) {
      report.converged = true;
      break;
    }
  }

  MatrixXd p = (identity - gain * h_used) * l * p_prior * l.transpose();
  p = symmetrized(p);
  if (!p.allFinite()) throw NumericalFailure("iterated_update: covariance is not finite");
  report.innovation_final = z - model.h(x);
  return {{std::move(x), std::move(p)}, std::move(report)};
}

FilterResult IteratedEkf::step(const GaussianState& state, const ProcessModel& process,
                               const VectorXd& u, const MeasurementModel& measurement,
                               const VectorXd& z) const {
  return iterated_update(propagate(state, process, u), measurement, z);
}

MatrixXd numeric_propagation_jacobian(const Manifold& manifold, const ProcessModel& model,
                                      const ManifoldPoint& x, const VectorXd& u, double step) {
  const int d = manifold.tangent_dim();
  const VectorXd w0 = VectorXd::Zero(model.Q.rows());
  const ManifoldPoint f0 = model.f(x, u, w0);
  MatrixXd out(d, d);
  for (int i = 0; i < d; ++i) {
    const TangentVector e = TangentVector::Unit(d, i) * step;
    const TangentVector plus = manifold.boxminus(model.f(manifold.boxplus(x, e), u, w0), f0);
    const TangentVector minus = manifold.boxminus(model.f(manifold.boxplus(x, -e), u, w0), f0);
    out.col(i) = (plus - minus) / (2.0 * step);
  }
  return out;
}

MatrixXd numeric_noise_jacobian(const Manifold& manifold, const ProcessModel& model,
                                const ManifoldPoint& x, const VectorXd& u, double step) {
  const int d = manifold.tangent_dim();
  const auto q = model.Q.rows();
  const ManifoldPoint f0 = model.f(x, u, VectorXd::Zero(q));
  MatrixXd out(d, q);
  for (Eigen::Index i = 0; i < q; ++i) {
    const VectorXd e = VectorXd::Unit(q, i) * step;
    const TangentVector plus = manifold.boxminus(model.f(x, u, e), f0);
    const TangentVector minus = manifold.boxminus(model.f(x, u, -e), f0);
    out.col(i) = (plus - minus) / (2.0 * step);
  }
  return out;
}

MatrixXd numeric_measurement_jacobian(const Manifold& manifold, const MeasurementModel& model,
                                      const ManifoldPoint& x, double step) {
  const int d = manifold.tangent_dim();
  const VectorXd h0 = model.h(x);
  MatrixXd out(h0.size(), d);
  for (int i = 0; i < d; ++i) {
    const TangentVector e = TangentVector::Unit(d, i) * step;
    out.col(i) = (model.h(manifold.boxplus(x, e)) - model.h(manifold.boxplus(x, -e))) / (2.0 * step);
  }
  return out;
}

MatrixXd numeric_update_jacobian(const Manifold& manifold, const ManifoldPoint& x_iter,
                                 const ManifoldPoint& x_prior, double step) {
  const int d = manifold.tangent_dim();
  MatrixXd out(d, d);
  for (int i = 0; i < d; ++i) {
    const TangentVector e = TangentVector::Unit(d, i) * step;
    out.col(i) = (manifold.boxminus(manifold.boxplus(x_iter, e), x_prior) -
                  manifold.boxminus(manifold.boxplus(x_iter, -e), x_prior)) /
                 (2.0 * step);
  }
  return out;
}

}  // namespace iekf
