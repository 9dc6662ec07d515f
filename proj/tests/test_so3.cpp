#include <numbers>

#include <doctest.h>
#include <Eigen/Geometry>
#include <Eigen/LU>

#include "iekf/errors.hpp"
#include "iekf/so3.hpp"
#include "support.hpp"

using namespace iekf;
using Eigen::Matrix3d;
using Eigen::Vector3d;
using std::numbers::pi;

namespace {
double max_abs(const Matrix3d& m) { return m.cwiseAbs().maxCoeff(); }
}  // namespace

TEST_SUITE("so3") {

TEST_CASE("hat builds the cross-product matrix") {
  CHECK(so3::hat(Vector3d::Zero()) == Matrix3d::Zero());
  Matrix3d expected;
  expected << 0, 0, 0, 0, 0, -1, 0, 1, 0;
  CHECK(so3::hat(Vector3d::UnitX()) == expected);

  testing::Random rnd(1);
  for (int i = 0; i < 100; ++i) {
    const Vector3d a = rnd.vector(3), b = rnd.vector(3);
    CHECK((so3::hat(a) * b - a.cross(b)).norm() < 1e-14);
    CHECK(so3::vee(so3::hat(a)) == a);
  }
}

TEST_CASE("exp matches closed examples and the power series") {
  CHECK(so3::exp(Vector3d::Zero()) == Matrix3d::Identity());
  Matrix3d quarter;
  quarter << 1, 0, 0, 0, 0, -1, 0, 1, 0;
  CHECK(max_abs(so3::exp(Vector3d(pi / 2, 0, 0)) - quarter) < 1e-15);

  testing::Random rnd(2);
  for (int i = 0; i < 500; ++i) {
    const Vector3d phi = rnd.axis_angle(0.0, 3.0);
    CHECK(max_abs(so3::exp(phi) - testing::series_exp(phi)) < 1e-12);
  }
  // Either side of the small-angle switch.
  for (double theta : {1e-12, 1e-8, 0.99e-4, 1.01e-4, 1e-3}) {
    const Vector3d phi = rnd.unit() * theta;
    CHECK(max_abs(so3::exp(phi) - testing::series_exp(phi)) < 1e-15);
  }
}

TEST_CASE("log inverts exp") {
  CHECK(so3::log(Matrix3d::Identity()) == Vector3d::Zero());
  testing::Random rnd(3);
  for (int i = 0; i < 1000; ++i) {
    const Vector3d phi = rnd.axis_angle(0.0, pi - 1e-6);
    CHECK((so3::log(so3::exp(phi)) - phi).norm() < 1e-10);
  }
  for (double theta : {1e-12, 1e-8, 1e-4, 1e-3}) {
    const Vector3d phi = rnd.unit() * theta;
    CHECK((so3::log(so3::exp(phi)) - phi).norm() < 1e-15);
  }
}

TEST_CASE("log near pi") {
  testing::Random rnd(4);
  for (int i = 0; i < 200; ++i) {
    const Vector3d phi = rnd.unit() * (pi - std::pow(10.0, rnd.uniform(-9, -2)));
    const Matrix3d r = so3::exp(phi);
    CHECK(max_abs(so3::exp(so3::log(r)) - r) < 1e-8);
    CHECK(so3::log(r).norm() <= pi);
  }
}

TEST_CASE("log at exactly pi picks the branch with a positive first component") {
  Matrix3d flip_x = Matrix3d::Identity();
  flip_x(1, 1) = flip_x(2, 2) = -1;
  CHECK((so3::log(flip_x) - Vector3d(pi, 0, 0)).norm() < 1e-12);

  const Vector3d axis = Vector3d(-1, 2, -2).normalized();
  const Matrix3d r = 2.0 * axis * axis.transpose() - Matrix3d::Identity();
  const Vector3d phi = so3::log(r);
  CHECK((phi - pi * (-axis)).norm() < 1e-9);

  Matrix3d flip_z = Matrix3d::Identity();
  flip_z(0, 0) = flip_z(1, 1) = -1;
  CHECK((so3::log(flip_z) - Vector3d(0, 0, pi)).norm() < 1e-12);
}

TEST_CASE("log rejects non-rotations") {
  Matrix3d scaled = 1.01 * Matrix3d::Identity();
  CHECK_THROWS_AS(so3::log(scaled), ContractViolation);
  Matrix3d reflection = Matrix3d::Identity();
  reflection(2, 2) = -1;
  CHECK_THROWS_AS(so3::log(reflection), ContractViolation);
}

TEST_CASE("jacobians at zero are the identity") {
  const Vector3d zero = Vector3d::Zero();
  CHECK(so3::jr(zero) == Matrix3d::Identity());
  CHECK(so3::jl(zero) == Matrix3d::Identity());
  CHECK(so3::jr_inv(zero) == Matrix3d::Identity());
  CHECK(so3::jl_inv(zero) == Matrix3d::Identity());
}

TEST_CASE("jacobians agree with their series definitions") {
  testing::Random rnd(5);
  for (int i = 0; i < 500; ++i) {
    const Vector3d phi = rnd.axis_angle(0.0, 3.0);
    CHECK(max_abs(so3::jr(phi) - testing::series_jr(phi)) < 1e-12);
    CHECK(max_abs(so3::jl(phi) - testing::series_jl(phi)) < 1e-12);
    CHECK(max_abs(so3::jr(phi) * so3::jr_inv(phi) - Matrix3d::Identity()) < 1e-10);
    CHECK(max_abs(so3::jl(phi) * so3::jl_inv(phi) - Matrix3d::Identity()) < 1e-10);
    CHECK(max_abs(so3::jr_inv(phi) - so3::jr(phi).inverse()) < 1e-9);
  }
}

TEST_CASE("transpose and negation identities") {
  testing::Random rnd(6);
  for (int i = 0; i < 1000; ++i) {
    const double magnitude = i < 30 ? std::pow(10.0, -4.0 * (i % 3) - 4.0) : rnd.uniform(0.0, 3.0);
    const Vector3d phi = rnd.unit() * magnitude;
    CHECK(max_abs(so3::jl(phi) - so3::jr(phi).transpose()) < 1e-12);
    CHECK(max_abs(so3::jl(phi) - so3::jr(-phi)) < 1e-10);
    CHECK(max_abs(so3::jl_inv(phi) - so3::jr_inv(phi).transpose()) < 1e-10);
    CHECK(max_abs(so3::jl_inv(phi) - so3::jr_inv(-phi)) < 1e-10);
  }
}

TEST_CASE("first-order expansions of Exp(phi + dphi)") {
  testing::Random rnd(7);
  for (int i = 0; i < 300; ++i) {
    const Vector3d phi = rnd.axis_angle(0.0, 3.0);
    const Vector3d d = rnd.unit() * 1e-5;
    const Matrix3d exact = so3::exp(phi + d);
    CHECK((exact - so3::exp(phi) * so3::exp(so3::jr(phi) * d)).norm() < 1e-8);
    CHECK((exact - so3::exp(so3::jl(phi) * d) * so3::exp(phi)).norm() < 1e-8);
  }
}

TEST_CASE("inverse jacobians refuse angles near pi") {
  const Vector3d near_pi = Vector3d::UnitY() * (pi - 5e-4);
  CHECK_THROWS_AS(so3::jr_inv(near_pi), DomainError);
  CHECK_THROWS_AS(so3::jl_inv(near_pi), DomainError);
  CHECK_NOTHROW(so3::jr_inv(Vector3d::UnitY() * (pi - 2e-3)));
  CHECK_NOTHROW(so3::jr(near_pi));
}

TEST_CASE("projection to the nearest rotation") {
  testing::Random rnd(8);
  const Matrix3d r = rnd.rotation();
  CHECK(max_abs(so3::project_to_rotation(r) - r) < 1e-14);
  const Matrix3d noisy = r + 1e-4 * rnd.matrix(3, 3);
  const Matrix3d fixed = so3::project_to_rotation(noisy);
  CHECK(so3::is_rotation(fixed, 1e-12));
  CHECK(max_abs(fixed - r) < 1e-3);
}

}  // TEST_SUITE
