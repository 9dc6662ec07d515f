#include "iekf/so3_manifold.hpp"

namespace iekf {

std::string to_string(So3Convention convention) {
  return convention == So3Convention::kRightPerturbation ? "right" : "left";
}

so3::Matrix3 so3_boxplus(const so3::Matrix3& r, const so3::Vector3& delta, So3Convention conv) {
  if (conv == So3Convention::kRightPerturbation) return r * so3::exp(delta);
  return so3::exp(delta) * r;
}

so3::Vector3 so3_boxminus(const so3::Matrix3& ra, const so3::Matrix3& rb, So3Convention conv) {
  if (conv == So3Convention::kRightPerturbation) return so3::log(rb.transpose() * ra);
  return so3::log(ra * rb.transpose());
}

so3::Matrix3 so3_propagation_jacobian_F(const so3::Vector3& omega_integral, So3Convention conv) {
  if (conv == So3Convention::kRightPerturbation) return so3::exp(-omega_integral);
  return so3::Matrix3::Identity();
}

so3::Matrix3 so3_update_jacobian_J(const so3::Vector3& delta_phi, So3Convention conv) {
  if (conv == So3Convention::kRightPerturbation) return so3::jr_inv(delta_phi);
  return so3::jl_inv(delta_phi);
}

so3::Matrix3 so3_boxplus_jacobian(const so3::Vector3& phi, So3Convention conv) {
  if (conv == So3Convention::kRightPerturbation) return so3::jr(phi);
  return so3::jl(phi);
}

}  // namespace iekf
