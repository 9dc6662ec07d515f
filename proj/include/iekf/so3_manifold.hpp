#pragma once

#include <string>

#include "iekf/so3.hpp"

namespace iekf {

/// Which side the perturbation multiplies the estimate on.
///   right: x ⊞ δ = x·Exp(δ),  y ⊟ x = Log(xᵀ y)
///   left:  x ⊞ δ = Exp(δ)·x,  y ⊟ x = Log(y xᵀ)
enum class So3Convention { kRightPerturbation, kLeftPerturbation };

std::string to_string(So3Convention convention);

so3::Matrix3 so3_boxplus(const so3::Matrix3& r, const so3::Vector3& delta, So3Convention conv);

/// ra ⊟ rb
so3::Vector3 so3_boxminus(const so3::Matrix3& ra, const so3::Matrix3& rb, So3Convention conv);

/// Closed-form F for the rotation dynamics R_k = R_{k-1}·Exp(Δ), where Δ is
/// the integrated body rate over the step: Exp(-Δ) for the right convention,
/// identity for the left one.
so3::Matrix3 so3_propagation_jacobian_F(const so3::Vector3& omega_integral, So3Convention conv);

/// Closed-form J of (x ⊞ ε) ⊟ x_prior at ε = 0, given δφ = x ⊟ x_prior:
/// Jr⁻¹(δφ) for the right convention, Jl⁻¹(δφ) for the left one.
so3::Matrix3 so3_update_jacobian_J(const so3::Vector3& delta_phi, So3Convention conv);

/// L(φ) for one SO3 factor: Jr(φ) (right) or Jl(φ) (left).
so3::Matrix3 so3_boxplus_jacobian(const so3::Vector3& phi, So3Convention conv);

}  // namespace iekf
