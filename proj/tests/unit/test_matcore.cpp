#include "golazo/error.hpp"
#include "golazo/matcore.hpp"

#include "../support/instances.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace golazo;
using Eigen::MatrixXd;
using testing_support::random_symmetric;

TEST_SUITE("matcore") {

TEST_CASE("SymMatrix symmetrizes and rejects bad input") {
  MatrixXd m(2, 2);
  m << 1, 2, 4, 3;
  const SymMatrix s(m);
  CHECK(s(0, 1) == 3.0);
  CHECK(s(1, 0) == 3.0);
  CHECK_THROWS_AS(SymMatrix(MatrixXd::Zero(2, 3)), Error);
  MatrixXd bad = MatrixXd::Identity(2, 2);
  bad(0, 0) = NAN;
  CHECK_THROWS_AS(SymMatrix{bad}, Error);
}

TEST_CASE("sym_eig on identity and diagonal") {
  const EigenPair id = sym_eig(SymMatrix::identity(3));
  CHECK(id.values.isApprox(Eigen::Vector3d::Ones()));
  CHECK((id.vectors.transpose() * id.vectors).isApprox(MatrixXd::Identity(3, 3)));

  const EigenPair dg = sym_eig(SymMatrix::diagonal(Eigen::Vector2d(2, -1)));
  CHECK(dg.values(0) == doctest::Approx(-1.0));
  CHECK(dg.values(1) == doctest::Approx(2.0));
  CHECK(std::abs(dg.vectors(1, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(dg.vectors(0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("sym_eig reconstructs random matrices") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    const SymMatrix s(random_symmetric(6, rng));
    const EigenPair e = sym_eig(s);
    const MatrixXd back = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
    CHECK((back - s.matrix()).cwiseAbs().maxCoeff() < 1e-10);
    for (Index i = 1; i < 6; ++i) CHECK(e.values(i - 1) <= e.values(i));
  }
}

TEST_CASE("psd_project examples") {
  const SymMatrix clamp = psd_project(SymMatrix::diagonal(Eigen::Vector2d(1, -1)));
  CHECK((clamp.matrix() - Eigen::Vector2d(1, 0).asDiagonal().toDenseMatrix()).norm() < 1e-14);

  std::mt19937_64 rng(3);
  const MatrixXd g = random_symmetric(4, rng);
  const SymMatrix psd(g * g);
  CHECK((psd_project(psd).matrix() - psd.matrix()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("psd_project is the Frobenius-nearest PSD matrix") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    const SymMatrix s(random_symmetric(5, rng));
    const SymMatrix p = psd_project(s);
    // Independent oracle: clamp via a fresh eigen solver.
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(s.matrix());
    const MatrixXd oracle =
        es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() * es.eigenvectors().transpose();
    CHECK((p.matrix() - oracle).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(sym_eig(p).values.minCoeff() > -1e-12);
    // No random PSD perturbation gets closer.
    const double best = (p.matrix() - s.matrix()).norm();
    for (int k = 0; k < 20; ++k) {
      const MatrixXd q = random_symmetric(5, rng, 0.1);
      const MatrixXd cand = psd_project(SymMatrix(p.matrix() + q)).matrix();
      CHECK((cand - s.matrix()).norm() >= best - 1e-12);
    }
    CHECK((psd_project(p).matrix() - p.matrix()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("ones_complement_basis") {
  const ProjectionBasis p2 = ones_complement_basis(2);
  REQUIRE(p2.matrix.cols() == 1);
  CHECK(std::abs(p2.matrix(0, 0)) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(p2.matrix(0, 0) == doctest::Approx(-p2.matrix(1, 0)));

  for (BasisFlavor flavor : {BasisFlavor::helmert, BasisFlavor::householder}) {
    for (Index d : {2, 5, 9}) {
      const ProjectionBasis p = ones_complement_basis(d, flavor);
      CHECK(p.matrix.rows() == d);
      CHECK(p.matrix.cols() == d - 1);
      CHECK((p.matrix.transpose() * p.matrix - MatrixXd::Identity(d - 1, d - 1)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((p.matrix.transpose() * Eigen::VectorXd::Ones(d)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  CHECK_THROWS_AS(ones_complement_basis(1), Error);
}

TEST_CASE("pseudo_det examples") {
  MatrixXd t2(2, 2);
  t2 << 0.5, -0.5, -0.5, 0.5;
  CHECK(pseudo_det(SymMatrix(t2)) == doctest::Approx(1.0).epsilon(1e-12));

  MatrixXd path(3, 3);
  path << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  const SymMatrix p(path);
  CHECK(pseudo_det(p) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(pseudo_det(2.5 * p) == doctest::Approx(2.5 * 2.5 * 3.0).epsilon(1e-12));
  CHECK(std::abs(pseudo_det(p, BasisFlavor::helmert) - pseudo_det(p, BasisFlavor::householder)) < 1e-10);
}

TEST_CASE("pseudo_det is basis invariant and matches the product of nonzero eigenvalues") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    const SymMatrix theta(testing_support::random_laplacian(6, rng));
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(theta.matrix());
    const double oracle = es.eigenvalues().tail(5).prod();
    const double h = pseudo_det(theta, BasisFlavor::helmert);
    const double q = pseudo_det(theta, BasisFlavor::householder);
    CHECK(std::abs(h - q) / oracle < 1e-10);
    CHECK(std::abs(h - oracle) / oracle < 1e-10);
  }
}

TEST_CASE("pseudo_det rejects non-Laplacians") {
  CHECK_THROWS_AS(pseudo_det(SymMatrix::identity(3)), Error);
  try {
    pseudo_det(SymMatrix::zero(3));
    FAIL("expected singular");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::singular);
  }
}

TEST_CASE("schur_complement examples") {
  MatrixXd blk = MatrixXd::Zero(3, 3);
  blk << 2, 0.5, 0, 0.5, 3, 0, 0, 0, 7;
  const std::vector<Index> o01{0, 1}, h2{2};
  CHECK((schur_complement(SymMatrix(blk), o01, h2).matrix() - blk.topLeftCorner(2, 2)).norm() < 1e-14);

  MatrixXd m2(2, 2);
  m2 << 3, 1.5, 1.5, 2;
  const std::vector<Index> o0{0}, h1{1};
  CHECK(schur_complement(SymMatrix(m2), o0, h1)(0, 0) == doctest::Approx(3 - 1.5 * 1.5 / 2));

  // Star graph: four observed leaves around one hidden hub.
  MatrixXd k = MatrixXd::Zero(5, 5);
  for (int i = 0; i < 4; ++i) {
    k(i, i) = 2.0;
    k(i, 4) = k(4, i) = 1.0;
  }
  k(4, 4) = 4.0;
  const std::vector<Index> obs{0, 1, 2, 3}, hid{4};
  const SymMatrix sc = schur_complement(SymMatrix(k), obs, hid);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) CHECK(sc(i, j) == doctest::Approx(i == j ? 1.75 : -0.25).epsilon(1e-14));
  }
}

TEST_CASE("schur_complement validates the partition") {
  const SymMatrix m = SymMatrix::identity(3);
  const std::vector<Index> a{0, 1}, overlap{1, 2}, missing{2}, short_o{0};
  CHECK_THROWS_AS(schur_complement(m, a, overlap), Error);
  CHECK_THROWS_AS(schur_complement(m, short_o, missing), Error);
  MatrixXd sing = MatrixXd::Identity(3, 3);
  sing(2, 2) = 0.0;
  const std::vector<Index> h{2};
  try {
    schur_complement(SymMatrix(sing), a, h);
    FAIL("expected singular");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::singular);
  }
}

}  // TEST_SUITE
