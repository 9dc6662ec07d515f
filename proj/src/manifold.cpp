#include "iekf/manifold.hpp"

#include <sstream>

#include "iekf/errors.hpp"
#include "iekf/so3.hpp"

namespace iekf {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

int dim_of(const ManifoldComponent& c) {
  return std::visit(Overloaded{[](const EuclideanSpace& e) { return e.dim; },
                               [](const So3Space&) { return 3; }},
                    c);
}

}  // namespace

ManifoldPoint ManifoldPoint::from_vector(Eigen::VectorXd v) {
  return ManifoldPoint({ComponentValue(std::move(v))});
}

ManifoldPoint ManifoldPoint::from_rotation(const Eigen::Matrix3d& r) {
  return ManifoldPoint({ComponentValue(r)});
}

const Eigen::VectorXd& ManifoldPoint::vector(std::size_t i) const {
  const auto* v = std::get_if<Eigen::VectorXd>(&component(i));
  if (v == nullptr) throw ContractViolation("ManifoldPoint: component is not a vector");
  return *v;
}

const Eigen::Matrix3d& ManifoldPoint::rotation(std::size_t i) const {
  const auto* r = std::get_if<Eigen::Matrix3d>(&component(i));
  if (r == nullptr) throw ContractViolation("ManifoldPoint: component is not a rotation");
  return *r;
}

Manifold::Manifold(std::vector<ManifoldComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw ContractViolation("Manifold: needs at least one factor");
  for (const auto& c : components_) {
    const int d = dim_of(c);
    if (d <= 0) throw ContractViolation("Manifold: Euclidean dimension must be positive");
    offsets_.push_back(tangent_dim_);
    tangent_dim_ += d;
  }
}

Manifold Manifold::euclidean(int dim) { return Manifold({EuclideanSpace{dim}}); }

Manifold Manifold::so3(So3Convention convention) { return Manifold({So3Space{convention}}); }

Manifold Manifold::product(const std::vector<Manifold>& factors) {
  std::vector<ManifoldComponent> flat;
  for (const auto& f : factors) flat.insert(flat.end(), f.components_.begin(), f.components_.end());
  return Manifold(std::move(flat));
}

int Manifold::component_dim(std::size_t i) const { return dim_of(components_.at(i)); }

void Manifold::check_structure(const ManifoldPoint& x, const char* who) const {
  if (x.size() != components_.size()) {
    throw ContractViolation(std::string(who) + ": point has " + std::to_string(x.size()) +
                            " components, manifold " + describe() + " has " +
                            std::to_string(components_.size()));
  }
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const bool ok = std::visit(
        Overloaded{[&](const EuclideanSpace& e) {
                     const auto* v = std::get_if<Eigen::VectorXd>(&x.component(i));
                     return v != nullptr && v->size() == e.dim;
                   },
                   [&](const So3Space&) {
                     return std::holds_alternative<Eigen::Matrix3d>(x.component(i));
                   }},
        components_[i]);
    if (!ok) {
      throw ContractViolation(std::string(who) + ": component " + std::to_string(i) +
                              " does not belong to " + describe());
    }
  }
}

void Manifold::check_tangent(const TangentVector& v, const char* who) const {
  if (v.size() != tangent_dim_) {
    throw ContractViolation(std::string(who) + ": tangent vector has dimension " +
                            std::to_string(v.size()) + ", expected " +
                            std::to_string(tangent_dim_));
  }
  if (!v.allFinite()) throw ContractViolation(std::string(who) + ": tangent vector is not finite");
}

ManifoldPoint Manifold::boxplus(const ManifoldPoint& x, const TangentVector& delta) const {
  check_structure(x, "boxplus");
  check_tangent(delta, "boxplus");
  std::vector<ComponentValue> out;
  out.reserve(components_.size());
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const int off = offsets_[i];
    std::visit(Overloaded{[&](const EuclideanSpace& e) {
                            out.emplace_back(Eigen::VectorXd(x.vector(i) + delta.segment(off, e.dim)));
                          },
                          [&](const So3Space& s) {
                            out.emplace_back(so3_boxplus(x.rotation(i),
                                                         delta.segment<3>(off), s.convention));
                          }},
               components_[i]);
  }
  return ManifoldPoint(std::move(out));
}

TangentVector Manifold::boxminus(const ManifoldPoint& y, const ManifoldPoint& x) const {
  check_structure(y, "boxminus");
  check_structure(x, "boxminus");
  TangentVector out(tangent_dim_);
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const int off = offsets_[i];
    std::visit(Overloaded{[&](const EuclideanSpace& e) {
                            out.segment(off, e.dim) = y.vector(i) - x.vector(i);
                          },
                          [&](const So3Space& s) {
                            out.segment<3>(off) =
                                so3_boxminus(y.rotation(i), x.rotation(i), s.convention);
                          }},
               components_[i]);
  }
  return out;
}

ManifoldPoint Manifold::exp(const TangentVector& phi) const {
  check_tangent(phi, "exp");
  std::vector<ComponentValue> out;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const int off = offsets_[i];
    std::visit(Overloaded{[&](const EuclideanSpace& e) {
                            out.emplace_back(Eigen::VectorXd(phi.segment(off, e.dim)));
                          },
                          [&](const So3Space&) { out.emplace_back(so3::exp(phi.segment<3>(off))); }},
               components_[i]);
  }
  return ManifoldPoint(std::move(out));
}

ManifoldPoint Manifold::identity() const { return exp(TangentVector::Zero(tangent_dim_)); }

MatrixXd Manifold::boxplus_jacobian(const TangentVector& phi) const {
  check_tangent(phi, "boxplus_jacobian");
  MatrixXd l = MatrixXd::Identity(tangent_dim_, tangent_dim_);
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (const auto* s = std::get_if<So3Space>(&components_[i])) {
      const int off = offsets_[i];
      l.block<3, 3>(off, off) = so3_boxplus_jacobian(phi.segment<3>(off), s->convention);
    }
  }
  return l;
}

MatrixXd Manifold::update_jacobian(const ManifoldPoint& x_iter, const ManifoldPoint& x_prior) const {
  check_structure(x_iter, "update_jacobian");
  check_structure(x_prior, "update_jacobian");
  MatrixXd j = MatrixXd::Identity(tangent_dim_, tangent_dim_);
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (const auto* s = std::get_if<So3Space>(&components_[i])) {
      const int off = offsets_[i];
      const so3::Vector3 delta_phi =
          so3_boxminus(x_iter.rotation(i), x_prior.rotation(i), s->convention);
      j.block<3, 3>(off, off) = so3_update_jacobian_J(delta_phi, s->convention);
    }
  }
  return j;
}

bool Manifold::contains(const ManifoldPoint& x) const {
  try {
    validate(x);
  } catch (const ContractViolation&) {
    return false;
  }
  return true;
}

void Manifold::validate(const ManifoldPoint& x) const {
  check_structure(x, "validate");
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (std::holds_alternative<So3Space>(components_[i])) {
      if (!so3::is_rotation(x.rotation(i))) {
        throw ContractViolation("validate: component " + std::to_string(i) +
                                " is not a rotation matrix");
      }
    } else if (!x.vector(i).allFinite()) {
      throw ContractViolation("validate: component " + std::to_string(i) + " is not finite");
    }
  }
}

ManifoldPoint Manifold::make_point(std::vector<ComponentValue> components) const {
  ManifoldPoint raw(std::move(components));
  check_structure(raw, "make_point");
  std::vector<ComponentValue> out = raw.components();
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (std::holds_alternative<So3Space>(components_[i])) {
      out[i] = so3::project_to_rotation(raw.rotation(i));
    }
  }
  ManifoldPoint p(std::move(out));
  validate(p);
  return p;
}

std::string Manifold::describe() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < components_.size(); ++i) {
    if (i > 0) os << " x ";
    std::visit(Overloaded{[&](const EuclideanSpace& e) { os << "R^" << e.dim; },
                          [&](const So3Space& s) { os << "SO3(" << to_string(s.convention) << ")"; }},
               components_[i]);
  }
  return os.str();
}

}  // namespace iekf
