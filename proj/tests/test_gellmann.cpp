#include "doctest.h"
#include "ruchan/gellmann.hpp"

#include <cmath>

using namespace ruchan;

namespace {

Mat random_hermitian(int n, Rng& rng) {
  Mat g = rng.gaussian(n, n);
  return (g + g.adjoint()) / 2.0;
}

}  // namespace

TEST_CASE("qubit basis is the three Pauli matrices") {
  const auto basis = gellmann_basis(2);
  REQUIRE(basis.size() == 3);
  const cplx i1(0.0, 1.0);

  Mat sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sy << 0, -i1, i1, 0;
  sz << 1, 0, 0, -1;

  CHECK((basis[0].matrix - sx).norm() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK((basis[1].matrix - sy).norm() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK((basis[2].matrix - sz).norm() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(basis[0].kind == TauKind::x);
  CHECK(basis[1].kind == TauKind::y);
  CHECK(basis[2].kind == TauKind::z);
}

TEST_CASE("qutrit z-type elements match the closed forms") {
  const auto basis = gellmann_basis(3);
  REQUIRE(basis.size() == 8);
  // Canonical order: three x, three y, two z.
  for (int i = 0; i < 3; ++i) CHECK(basis[i].kind == TauKind::x);
  for (int i = 3; i < 6; ++i) CHECK(basis[i].kind == TauKind::y);
  for (int i = 6; i < 8; ++i) CHECK(basis[i].kind == TauKind::z);
  // x block is lexicographic in (k, l).
  CHECK(basis[0].k == 0);
  CHECK(basis[0].l == 1);
  CHECK(basis[1].k == 0);
  CHECK(basis[1].l == 2);
  CHECK(basis[2].k == 1);
  CHECK(basis[2].l == 2);

  Mat z1 = Mat::Zero(3, 3), z2 = Mat::Zero(3, 3);
  z1(0, 0) = 1;
  z1(1, 1) = -1;
  z2(0, 0) = 1.0 / std::sqrt(3.0);
  z2(1, 1) = 1.0 / std::sqrt(3.0);
  z2(2, 2) = -2.0 / std::sqrt(3.0);
  CHECK((basis[6].matrix - z1).norm() < 1e-15);
  CHECK((basis[7].matrix - z2).norm() < 1e-15);
}

TEST_CASE("basis elements are traceless, Hermitian, and orthonormal") {
  for (int d = 2; d <= 6; ++d) {
    const auto basis = gellmann_basis(d);
    REQUIRE(static_cast<int>(basis.size()) == d * d - 1);
    const Mat tau0 = gellmann_tau0(d);
    CHECK(std::abs((tau0 * tau0).trace().real() - 2.0) < 1e-12);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      CHECK(static_cast<int>(basis[i].index) == static_cast<int>(i) + 1);
      CHECK(std::abs(basis[i].matrix.trace()) < 1e-12);
      CHECK((basis[i].matrix - basis[i].matrix.adjoint()).norm() < 1e-12);
      CHECK(std::abs((tau0 * basis[i].matrix).trace()) < 1e-12);
      for (std::size_t j = 0; j < basis.size(); ++j) {
        const double expect = (i == j) ? 2.0 : 0.0;
        CHECK(std::abs((basis[i].matrix * basis[j].matrix).trace().real() -
                       expect) < 1e-12);
        CHECK(std::abs((basis[i].matrix * basis[j].matrix).trace().imag()) <
              1e-12);
      }
    }
  }
}

TEST_CASE("basis rejects dimensions below 2") {
  CHECK_THROWS_AS(gellmann_basis(1), domain_error);
  CHECK_THROWS_AS(gellmann_tau0(0), domain_error);
}

TEST_CASE("bloch vector of simple qubit states") {
  const Mat mixed = Mat::Identity(2, 2) / 2.0;
  CHECK(bloch_vector(mixed).entries.norm() < 1e-15);

  Mat zero_proj = Mat::Zero(2, 2);
  zero_proj(0, 0) = 1;
  const BlochVector bv = bloch_vector(zero_proj);
  CHECK(std::abs(bv.entries(0)) < 1e-15);
  CHECK(std::abs(bv.entries(1)) < 1e-15);
  CHECK(bv.entries(2) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("pure states have maximal bloch length") {
  Rng rng(31);
  for (int d = 2; d <= 4; ++d) {
    const double expect = std::sqrt((d - 1.0) / (2.0 * d));
    for (int trial = 0; trial < 5; ++trial) {
      Vec psi = rng.gaussian(d, 1).col(0);
      psi /= psi.norm();
      const Mat rho = psi * psi.adjoint();
      CHECK(std::abs(bloch_vector(rho).entries.norm() - expect) < 1e-12);
    }
  }
}

TEST_CASE("inner-product identity for unit-trace inputs") {
  Rng rng(32);
  for (int d : {2, 3}) {
    for (int trial = 0; trial < 20; ++trial) {
      Mat a = random_hermitian(d, rng);
      Mat b = random_hermitian(d, rng);
      a /= a.trace().real();
      b /= b.trace().real();
      const RVec va = bloch_vector(a).entries;
      const RVec vb = bloch_vector(b).entries;
      const double lhs = (a * b).trace().real();
      const double rhs = 2.0 * va.dot(vb) + 1.0 / d;
      CHECK(std::abs(lhs - rhs) < 1e-12);
    }
  }
}

TEST_CASE("bloch expansion reconstructs any Hermitian matrix") {
  Rng rng(33);
  for (int d : {2, 3, 5}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Mat h = random_hermitian(d, rng);
      const BlochVector bv = bloch_vector(h);
      const Mat back = bloch_reconstruct(bv, h.trace().real());
      CHECK((back - h).norm() < 1e-12);
    }
  }
}

TEST_CASE("bloch vector rejects bad inputs") {
  CHECK_THROWS_AS(bloch_vector(Mat::Zero(2, 3)), shape_error);
  Mat skew(2, 2);
  skew << 0, 1, 2, 0;  // far from Hermitian
  CHECK_THROWS_AS(bloch_vector(skew), precondition_error);
}

TEST_CASE("conjugation by the identity rotates nothing") {
  for (int d : {2, 3}) {
    const RMat o = conjugation_rotation(Mat::Identity(d, d));
    CHECK((o - RMat::Identity(d * d - 1, d * d - 1)).norm() < 1e-12);
  }
}

TEST_CASE("z-axis rotation acts as a planar rotation on the Bloch ball") {
  const double theta = 0.7;
  Mat u = Mat::Zero(2, 2);
  u(0, 0) = std::exp(cplx(0.0, -theta / 2.0));
  u(1, 1) = std::exp(cplx(0.0, theta / 2.0));
  const RMat o = conjugation_rotation(u);
  RMat expect(3, 3);
  expect << std::cos(theta), -std::sin(theta), 0,
            std::sin(theta),  std::cos(theta), 0,
            0, 0, 1;
  CHECK((o - expect).norm() < 1e-12);
}

TEST_CASE("conjugation rotations are orthogonal and act on bloch vectors") {
  Rng rng(34);
  for (int d : {2, 3}) {
    for (int trial = 0; trial < 8; ++trial) {
      // Haar-like unitary from the polar factor of a Ginibre sample.
      const Mat g = rng.gaussian(d, d);
      Eigen::JacobiSVD<Mat> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const Mat u = svd.matrixU() * svd.matrixV().adjoint();

      const RMat o = conjugation_rotation(u);
      const int n = d * d - 1;
      CHECK((o * o.transpose() - RMat::Identity(n, n)).cwiseAbs().maxCoeff() <
            1e-10);

      Mat rho = random_hermitian(d, rng);
      rho /= rho.trace().real();
      const RVec direct = bloch_vector((u * rho * u.adjoint()).eval()).entries;
      const RVec rotated = o * bloch_vector(rho).entries;
      CHECK((direct - rotated).norm() < 1e-10);
    }
  }
}

TEST_CASE("conjugation rotation is a homomorphism") {
  Rng rng(35);
  for (int trial = 0; trial < 5; ++trial) {
    const auto haar = [&](int d) {
      const Mat g = rng.gaussian(d, d);
      Eigen::JacobiSVD<Mat> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
      return Mat(svd.matrixU() * svd.matrixV().adjoint());
    };
    const Mat u = haar(2), v = haar(2);
    const RMat lhs = conjugation_rotation((u * v).eval());
    const RMat rhs = conjugation_rotation(u) * conjugation_rotation(v);
    CHECK((lhs - rhs).norm() < 1e-9);
  }
}

TEST_CASE("conjugation rotation rejects non-unitary input") {
  Mat bad(2, 2);
  bad << 1, 0, 0, 2;
  CHECK_THROWS_AS(conjugation_rotation(bad), feasibility_error);
}
