#include "golazo/error.hpp"
#include "golazo/gauss_admm.hpp"
#include "golazo/simgen.hpp"

#include "../oracle/barrier_oracle.hpp"
#include "../support/instances.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

using namespace golazo;
using Eigen::MatrixXd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Residual of the M-subproblem optimality condition, written without the
// eigenvalue map: -M^{-1} + S - Lambda + sigma (M - A + B) + rho sigma (M - M_prev).
double m_foc_residual(const MatrixXd& m, const MatrixXd& s, const MatrixXd& a, const MatrixXd& b,
                      const MatrixXd& dual, const MatrixXd& m_prev, const AdmmParams& p) {
  const MatrixXd r = -m.inverse() + s - dual + p.sigma * (m - a + b) + p.rho * p.sigma * (m - m_prev);
  return r.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_SUITE("gauss_admm") {

TEST_CASE("gaussian_loglik examples") {
  CHECK(gaussian_loglik(SymMatrix::identity(3), SymMatrix::identity(3)) == doctest::Approx(-3.0));
  CHECK(gaussian_loglik(SymMatrix::diagonal(Eigen::Vector2d(2, 2)), SymMatrix::zero(2)) ==
        doctest::Approx(2.0 * std::log(2.0)));

  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 10; ++rep) {
    const MatrixXd k = testing_support::random_spd(4, rng);
    const MatrixXd s = testing_support::random_spd(4, rng);
    const double oracle = std::log(k.determinant()) - (k * s).trace();
    CHECK(gaussian_loglik(SymMatrix(k), SymMatrix(s)) == doctest::Approx(oracle).epsilon(1e-12));
  }
  try {
    gaussian_loglik(SymMatrix::diagonal(Eigen::Vector2d(1, -1)), SymMatrix::identity(2));
    FAIL("expected not_positive_definite");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::not_positive_definite);
  }
}

TEST_CASE("m_update examples") {
  const AdmmParams p;
  const SymMatrix id = SymMatrix::identity(3), z = SymMatrix::zero(3);
  const SymMatrix m = m_update(id, id, z, z, id, p);
  CHECK((m.matrix() - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-15);

  const SymMatrix s1 = SymMatrix::diagonal(Eigen::VectorXd::Constant(1, 2.0));
  const SymMatrix one = SymMatrix::identity(1), zero1 = SymMatrix::zero(1);
  CHECK(m_update(s1, one, zero1, zero1, one, p)(0, 0) ==
        doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-14));
  CHECK(logdet_root(1.0, 1.0, 0.0) == doctest::Approx(0.6180339887498949));
  CHECK(logdet_root(-1e8, 1.0, 0.0) == doctest::Approx(1e8));
  CHECK(logdet_root(1e8, 1.0, 0.0) == doctest::Approx(1e-8));
}

TEST_CASE("m_update satisfies its optimality condition") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unif(0.1, 3.0);
  for (int rep = 0; rep < 100; ++rep) {
    AdmmParams p;
    p.sigma = unif(rng);
    p.rho = rep % 2 == 0 ? 0.0 : unif(rng);
    const Index d = 4;
    const MatrixXd s = testing_support::random_spd(d, rng);
    const MatrixXd a = testing_support::random_symmetric(d, rng);
    const MatrixXd b = testing_support::random_spd(d, rng, 0.0);
    const MatrixXd dual = testing_support::random_symmetric(d, rng);
    const MatrixXd prev = testing_support::random_spd(d, rng);
    const SymMatrix m = m_update(SymMatrix(s), SymMatrix(a), SymMatrix(b), SymMatrix(dual),
                                 SymMatrix(prev), p);
    CHECK(sym_eig(m).values.minCoeff() > 0.0);
    CHECK(m_foc_residual(m.matrix(), s, a, b, dual, prev, p) < 1e-8);
  }
}

TEST_CASE("b_update examples and projection identity") {
  const AdmmParams base;
  AdmmParams p = base;
  p.lambda = 1.0;
  CHECK(b_update(SymMatrix::zero(3), SymMatrix::zero(3), p).matrix().isZero(0.0));

  p.lambda = 0.0;
  std::mt19937_64 rng(8);
  const MatrixXd g = testing_support::random_symmetric(3, rng);
  const SymMatrix psd(g * g);
  CHECK((b_update(psd, SymMatrix::zero(3), p).matrix() - psd.matrix()).cwiseAbs().maxCoeff() < 1e-10);

  for (int rep = 0; rep < 100; ++rep) {
    AdmmParams q = base;
    q.lambda = std::abs(testing_support::random_symmetric(1, rng)(0, 0));
    const SymMatrix b(testing_support::random_symmetric(4, rng));
    const SymMatrix half(testing_support::random_symmetric(4, rng));
    const SymMatrix expected = psd_project(
        SymMatrix(b.matrix() + (half.matrix() - q.lambda * MatrixXd::Identity(4, 4)) / (q.tau() * q.r2())));
    CHECK(b_update(b, half, q).matrix() == expected.matrix());
  }
}

TEST_CASE("AdmmParams validation") {
  AdmmParams p;
  CHECK(p.tau() == doctest::Approx(1.515));
  CHECK(p.r1() == doctest::Approx(1.01));
  p.varsigma = 1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = AdmmParams{};
  p.alpha = 2.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = AdmmParams{};
  p.rho = -1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = AdmmParams{};
  p.sigma = 0.0;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("identity covariance with a lasso penalty") {
  PenaltySpec lasso;
  const GolazoBounds b = compile_penalty(lasso, 2, 0.1, 1.0);
  AdmmParams p;
  p.lambda = 0.1;
  p.eps_rel = p.eps_feas = 1e-10;
  p.max_iter = 100000;
  const AdmmResult r = solve_latent_gaussian(SymMatrix::identity(2), b, p);
  REQUIRE(r.converged);
  CHECK(std::abs(r.a(0, 1)) < 1e-8);
  CHECK(r.b.matrix().cwiseAbs().maxCoeff() < 1e-8);
  CHECK(r.m(0, 0) == doctest::Approx(1.0).epsilon(1e-8));

  const oracle::Solution o = oracle::solve({MatrixXd::Identity(2, 2), b.lower, b.upper, 0.1, false});
  CHECK((r.a.matrix() - o.a).cwiseAbs().maxCoeff() < 1e-4);
  CHECK((r.b.matrix() - o.b).cwiseAbs().maxCoeff() < 1e-4);
  CHECK((r.m.matrix() - o.primal).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("solver agrees with the barrier oracle on random instances") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> lam(0.02, 0.4);
  for (Index d : {2, 3, 5}) {
    for (int rep = 0; rep < 5; ++rep) {
      const MatrixXd s = testing_support::random_covariance(d, rng);
      const GolazoBounds b = testing_support::random_finite_bounds(d, rng);
      AdmmParams p;
      p.lambda = lam(rng);
      p.eps_rel = p.eps_feas = 1e-10;
      p.max_iter = 200000;
      const AdmmResult r = solve_latent_gaussian(SymMatrix(s), b, p);
      REQUIRE(r.converged);
      const oracle::Solution o = oracle::solve({s, b.lower, b.upper, p.lambda, false});
      const double obj = latent_gaussian_objective(SymMatrix(s), r.a, r.b, b, p.lambda);
      CHECK(std::abs(obj - o.objective) <= 1e-6 * std::max(1.0, std::abs(o.objective)));
      CHECK((r.a.matrix() - o.a).cwiseAbs().maxCoeff() < 1e-4);
      CHECK((r.b.matrix() - o.b).cwiseAbs().maxCoeff() < 1e-4);
    }
  }
}

TEST_CASE("sign constraints hold exactly at every iteration") {
  std::mt19937_64 rng(55);
  const Index d = 6;
  const MatrixXd s = testing_support::random_covariance(d, rng);
  for (PenaltyKind kind : {PenaltyKind::mtp2, PenaltyKind::sparse_positive, PenaltyKind::zero_pattern}) {
    PenaltySpec spec;
    spec.kind = kind;
    spec.base = PenaltyKind::mtp2;
    if (kind == PenaltyKind::zero_pattern) spec.zero_edges = crossing_edges({{0, 1, 2}, {3, 4, 5}});
    const GolazoBounds b = compile_penalty(spec, d, 0.2, 0.5);
    AdmmParams p;
    p.lambda = 0.2;
    p.max_iter = 3000;
    int violations = 0;
    auto observer = [&](int, const MatrixXd&, const MatrixXd& a, const MatrixXd&) {
      for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) {
          if (std::isinf(b.upper(i, j)) && a(i, j) > 0.0) ++violations;
          if (std::isinf(b.lower(i, j)) && a(i, j) < 0.0) ++violations;
          if (std::isinf(b.upper(i, j)) && std::isinf(b.lower(i, j)) && a(i, j) != 0.0) ++violations;
        }
      }
    };
    const AdmmResult r = solve_latent_gaussian(SymMatrix(s), b, p, observer);
    CHECK(violations == 0);
    CHECK(std::isfinite(golazo_value(r.a, b)));
  }
}

TEST_CASE("convergent runs meet both tolerances") {
  std::mt19937_64 rng(12);
  const MatrixXd s = testing_support::random_covariance(5, rng);
  PenaltySpec lasso;
  const GolazoBounds b = compile_penalty(lasso, 5, 0.1, 0.5);
  AdmmParams p;
  p.lambda = 0.1;
  const AdmmResult r = solve_latent_gaussian(SymMatrix(s), b, p);
  REQUIRE(r.converged);
  CHECK(r.final_ier() < p.eps_feas);
  CHECK(r.final_rel_chg() < p.eps_rel);
  CHECK(r.trace.rel_chg.size() == static_cast<std::size_t>(r.iterations));

  p.max_iter = 3;
  const AdmmResult capped = solve_latent_gaussian(SymMatrix(s), b, p);
  CHECK_FALSE(capped.converged);
  CHECK(capped.iterations == 3);
}

TEST_CASE("objective trace settles without large upticks") {
  std::mt19937_64 rng(19);
  const MatrixXd s = testing_support::random_covariance(5, rng);
  PenaltySpec lasso;
  const GolazoBounds b = compile_penalty(lasso, 5, 0.2, 0.5);
  AdmmParams p;
  p.lambda = 0.2;
  p.eps_rel = p.eps_feas = 1e-9;
  p.max_iter = 50000;
  const AdmmResult r = solve_latent_gaussian(SymMatrix(s), b, p);
  REQUIRE(r.converged);
  const auto& obj = r.trace.objective;
  const std::size_t burn = obj.size() / 2;
  double worst = 0.0;
  for (std::size_t k = burn + 1; k < obj.size(); ++k) worst = std::max(worst, obj[k] - obj[k - 1]);
  CHECK(worst <= 1e-7);
}

TEST_CASE("dimension and bound errors") {
  const GolazoBounds b3 = GolazoBounds::zeros(3);
  CHECK_THROWS_AS(solve_latent_gaussian(SymMatrix::identity(2), b3, AdmmParams{}), Error);
  GolazoBounds bad = GolazoBounds::zeros(2);
  bad.lower(0, 1) = bad.lower(1, 0) = 1.0;
  CHECK_THROWS_AS(solve_latent_gaussian(SymMatrix::identity(2), bad, AdmmParams{}), Error);
}

TEST_CASE("latent objective is infinite outside the domain") {
  const GolazoBounds b = GolazoBounds::zeros(2);
  CHECK(latent_gaussian_objective(SymMatrix::identity(2), SymMatrix::identity(2),
                                  SymMatrix::identity(2), b, 0.1) == kInf);
}

}  // TEST_SUITE
