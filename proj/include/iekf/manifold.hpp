#pragma once

#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "iekf/so3_manifold.hpp"

namespace iekf {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Tangent-space vector; its length equals the manifold's tangent dimension.
using TangentVector = Eigen::VectorXd;

/// R^dim with ordinary + and -.
struct EuclideanSpace {
  int dim = 0;
  bool operator==(const EuclideanSpace&) const = default;
};

/// Rotation matrices with one of the two perturbation conventions.
struct So3Space {
  So3Convention convention = So3Convention::kRightPerturbation;
  bool operator==(const So3Space&) const = default;
};

using ManifoldComponent = std::variant<EuclideanSpace, So3Space>;

/// Value of one component: a vector for EuclideanSpace, a 3x3 matrix for So3Space.
using ComponentValue = std::variant<Eigen::VectorXd, Eigen::Matrix3d>;

/// Element of a (product) manifold, stored as an ordered list of components.
class ManifoldPoint {
 public:
  ManifoldPoint() = default;
  explicit ManifoldPoint(std::vector<ComponentValue> components)
      : components_(std::move(components)) {}

  static ManifoldPoint from_vector(Eigen::VectorXd v);
  static ManifoldPoint from_rotation(const Eigen::Matrix3d& r);

  std::size_t size() const { return components_.size(); }
  const ComponentValue& component(std::size_t i) const { return components_.at(i); }
  const std::vector<ComponentValue>& components() const { return components_; }

  /// Throws ContractViolation if component i is not of the requested kind.
  const Eigen::VectorXd& vector(std::size_t i = 0) const;
  const Eigen::Matrix3d& rotation(std::size_t i = 0) const;

  bool operator==(const ManifoldPoint&) const = default;

 private:
  std::vector<ComponentValue> components_;
};

/// Describes a finite product of Euclidean and SO3 factors and implements
/// ⊞, ⊟ and their Jacobians on it. A single space is a product of one
/// factor. Tangent coordinates are laid out in declaration order.
class Manifold {
 public:
  static Manifold euclidean(int dim);
  static Manifold so3(So3Convention convention);
  /// Nested products are flattened.
  static Manifold product(const std::vector<Manifold>& factors);

  int tangent_dim() const { return tangent_dim_; }
  const std::vector<ManifoldComponent>& components() const { return components_; }
  /// Offset of component i inside a tangent vector.
  int tangent_offset(std::size_t i) const { return offsets_.at(i); }
  int component_dim(std::size_t i) const;

  bool operator==(const Manifold& other) const { return components_ == other.components_; }

  ManifoldPoint boxplus(const ManifoldPoint& x, const TangentVector& delta) const;
  TangentVector boxminus(const ManifoldPoint& y, const ManifoldPoint& x) const;

  /// Exp per factor: identity map on Euclidean factors, matrix exponential on SO3.
  ManifoldPoint exp(const TangentVector& phi) const;
  /// Identity element (zero vector / identity rotation).
  ManifoldPoint identity() const;

  /// L(φ) = lim (Exp(φ+ε) ⊟ Exp(φ))/ε. Block diagonal: I on Euclidean factors,
  /// Jr(φ) (right) or Jl(φ) (left) on SO3 factors.
  MatrixXd boxplus_jacobian(const TangentVector& phi) const;

  /// Closed-form J = ∂[(x_iter ⊞ ε) ⊟ x_prior]/∂ε at ε = 0. Block diagonal:
  /// I on Euclidean factors, Jr⁻¹(δφ) (right) or Jl⁻¹(δφ) (left) on SO3
  /// factors with δφ = x_iter ⊟ x_prior. Throws DomainError when δφ is too
  /// close to π.
  MatrixXd update_jacobian(const ManifoldPoint& x_iter, const ManifoldPoint& x_prior) const;

  /// True if every component has the right kind, size and (for SO3)
  /// RᵀR = I, det R = 1 within 1e-9.
  bool contains(const ManifoldPoint& x) const;
  /// Throws ContractViolation with a description if !contains(x).
  void validate(const ManifoldPoint& x) const;

  /// Builds a point from external data, projecting SO3 components onto the
  /// nearest rotation.
  ManifoldPoint make_point(std::vector<ComponentValue> components) const;

  std::string describe() const;

 private:
  explicit Manifold(std::vector<ManifoldComponent> components);

  void check_structure(const ManifoldPoint& x, const char* who) const;
  void check_tangent(const TangentVector& v, const char* who) const;

  std::vector<ManifoldComponent> components_;
  std::vector<int> offsets_;
  int tangent_dim_ = 0;
};

}  // namespace iekf
