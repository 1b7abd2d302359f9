#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "reachcert/errors.hpp"
#include "reachcert/so3.hpp"
#include "reachcert/spd.hpp"

#include "support/lemmas.hpp"
#include "support/oracles.hpp"

using namespace reachcert;

TEST_CASE("hat produces the cross-product matrix") {
  const Vec3 v(1.0, 2.0, 3.0);
  Mat3 expect;
  expect << 0, -3, 2, 3, 0, -1, -2, 1, 0;
  CHECK((hat(v) - expect).norm() == 0.0);
}

TEST_CASE("vee inverts hat exactly") {
  const Vec3 v(-0.3, 1.7, 4.2);
  CHECK((vee(hat(v)) - v).norm() == 0.0);
}

TEST_CASE("vee rejects a matrix that is not skew") {
  Mat3 m = Mat3::Identity();
  CHECK_THROWS_AS(vee(m), DomainError);
  m = hat(Vec3(1, 2, 3));
  m(0, 1) += 1e-6;
  CHECK_THROWS_AS(vee(m), DomainError);
}

TEST_CASE("exp of zero is the identity") {
  CHECK((exp_so3(Vec3::Zero()) - Mat3::Identity()).norm() == 0.0);
}

TEST_CASE("exp about the z axis is a plane rotation") {
  const double th = 0.7;
  const Mat3 r = exp_so3(th * Vec3::UnitZ());
  CHECK(r(0, 0) == doctest::Approx(std::cos(th)).epsilon(1e-15));
  CHECK(r(1, 0) == doctest::Approx(std::sin(th)).epsilon(1e-15));
  CHECK(r(0, 1) == doctest::Approx(-std::sin(th)).epsilon(1e-15));
  CHECK(r(2, 2) == 1.0);
  CHECK(is_rotation(r));
}

TEST_CASE("exp matches the power series across the angle range") {
  const auto r = testutil::exp_map_suite(2000, 101);
  CHECK(r.failures == 0);
  CHECK(r.worst <= 0.0);
}

TEST_CASE("exp stays a rotation at tiny angles") {
  const Mat3 r = exp_so3(Vec3(1e-10, -2e-10, 5e-11));
  CHECK(is_rotation(r, 1e-15));
  CHECK((r - testutil::exp_series(Vec3(1e-10, -2e-10, 5e-11))).norm() < 1e-15);
}

TEST_CASE("is_rotation rejects scalings and reflections") {
  CHECK(is_rotation(Mat3::Identity()));
  CHECK_FALSE(is_rotation(2.0 * Mat3::Identity()));
  Mat3 reflect = Mat3::Identity();
  reflect(2, 2) = -1.0;
  CHECK_FALSE(is_rotation(reflect));
}

TEST_CASE("project_rotation recovers the orthogonal factor") {
  testutil::SplitMix64 rng(7);
  for (int i = 0; i < 50; ++i) {
    const Mat3 r = testutil::random_rotation(rng);
    CHECK((project_rotation(3.0 * r) - r).norm() < 1e-12);

    Mat3 drift = r;
    for (int p = 0; p < 3; ++p) {
      for (int q = 0; q < 3; ++q) {
        drift(p, q) += 1e-4 * rng.normal();
      }
    }
    const Mat3 fixed = project_rotation(drift);
    CHECK(is_rotation(fixed, 1e-11));
    CHECK((fixed - r).norm() < 1e-3);
  }
}

TEST_CASE("project_rotation rejects a rank-deficient input") {
  Mat3 m = Mat3::Zero();
  m(0, 0) = 1.0;
  CHECK_THROWS_AS(project_rotation(m), DomainError);
}

TEST_CASE("sym_eig_bounds on a diagonal matrix") {
  Mat3 d = Vec3(3.0, 1.0, 2.0).asDiagonal();
  const auto [lo, hi] = sym_eig_bounds(d);
  CHECK(lo == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(hi == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("spd_sqrt squares back to the input") {
  testutil::SplitMix64 rng(11);
  for (int i = 0; i < 50; ++i) {
    const Eigen::MatrixXd m = testutil::random_spd(rng, 6, 1e6);
    const Eigen::MatrixXd s = spd_sqrt(m);
    CHECK((s * s - m).norm() <= 1e-10 * m.norm());
    const Eigen::MatrixXd is = spd_inv_sqrt(m);
    CHECK((s * is - Eigen::MatrixXd::Identity(6, 6)).norm() < 1e-8);
  }
}

TEST_CASE("spd routines reject an indefinite matrix") {
  Mat3 m = Vec3(1.0, 1.0, -0.5).asDiagonal();
  CHECK_THROWS_AS(spd_sqrt(m), NotSpdError);
  try {
    spd_inv_sqrt(m);
    FAIL("expected NotSpdError");
  } catch (const NotSpdError& e) {
    CHECK(e.min_eigenvalue() == doctest::Approx(-0.5).epsilon(1e-12));
  }
}

TEST_CASE("induced_norm2 on known matrices") {
  Mat3 d = Vec3(2.0, -5.0, 1.0).asDiagonal();
  CHECK(induced_norm2(d) == doctest::Approx(5.0).epsilon(1e-14));
  Eigen::Matrix<double, 3, 6> wide;
  wide.setZero();
  wide(0, 0) = 3.0;
  wide(2, 5) = -4.0;
  CHECK(induced_norm2(wide) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("quadratic form bounds hold on random matrices") {
  const auto r = testutil::quadratic_form_suite(2000, 13);
  CHECK(r.cases == 2000);
  CHECK(r.failures == 0);
}

TEST_CASE("hat-map identities hold on random inputs") {
  const auto r = testutil::hat_identity_suite(5000, 17);
  CHECK(r.cases == 5000);
  CHECK(r.failures == 0);
}
