#include <doctest.h>

#include <cmath>

#include "amgf/amg.hpp"
#include "amgf/dense_cholesky.hpp"
#include "amgf/error.hpp"
#include "amgf/pcg.hpp"
#include "amgf/smoother.hpp"
#include "amgf/vector_ops.hpp"
#include "helpers.hpp"

using namespace amgf;
using Eigen::MatrixXd;
using testing::dense;

TEST_SUITE("krylov") {
  TEST_CASE("identity system converges in one iteration") {
    const IdentityOperator id(7);
    std::mt19937_64 rng(31);
    const Vector b = testing::random_vector(7, rng);
    auto [x, rep] = pcg(id, id, b);
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
    CHECK(rep.relative_residuals.front() == 1.0);
    for (std::size_t i = 0; i < b.size(); ++i) CHECK(x[i] == doctest::Approx(b[i]));
  }

  TEST_CASE("exact preconditioner: one iteration, clustered Ritz values") {
    std::mt19937_64 rng(32);
    const SparseMatrix a = testing::random_spd(50, 0.1, rng);
    const DenseCholesky inv(a);
    auto [x, rep] = pcg(a, inv, testing::random_vector(50, rng));
    CHECK(rep.converged);
    CHECK(rep.iterations == 1);
    CHECK(rep.ritz_min == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(rep.ritz_max == doctest::Approx(1.0).epsilon(1e-8));
  }

  TEST_CASE("1D Laplacian: plain CG grows with n, AMG does not") {
    std::size_t plain_prev = 0;
    for (std::size_t n : {50u, 100u, 200u}) {
      auto a = std::make_shared<SparseMatrix>(testing::laplacian_1d(n));
      const Vector b(n, 1.0);
      auto [x0, plain] = pcg(*a, IdentityOperator(n), b);
      CHECK(plain.converged);
      CHECK(plain.iterations > plain_prev);
      plain_prev = plain.iterations;
      AmgConfig cfg;
      cfg.coarsest_size = 8;
      const auto h = AmgHierarchy::setup(a, {Vector(n, 1.0)}, cfg);
      auto [x1, rep] = pcg(*a, *h, b);
      CHECK(rep.converged);
      CHECK(rep.iterations <= 15);
    }
  }

  TEST_CASE("residual history, A-norm monotonicity and Ritz containment") {
    std::mt19937_64 rng(33);
    for (int t = 0; t < 4; ++t) {
      const std::size_t n = 40 + 40 * static_cast<std::size_t>(t);
      auto a = std::make_shared<SparseMatrix>(testing::random_spd(n, 0.05, rng));
      const SymmetricGaussSeidel m(a, 1);
      const Vector b = testing::random_vector(n, rng);
      const MatrixXd ad = dense(*a);
      const Eigen::VectorXd xs = ad.llt().solve(testing::to_eigen(b));
      double prev = std::numeric_limits<double>::infinity();
      for (std::size_t k = 1; k < 60; k += 3) {
        auto [x, rep] = pcg(*a, m, b, 1e-14, k);
        const Eigen::VectorXd e = testing::to_eigen(x) - xs;
        const double err = std::sqrt(e.dot(ad * e));
        CHECK(err <= prev * (1.0 + 1e-12));
        prev = err;
      }
      auto [x, rep] = pcg(*a, m, b, 1e-10);
      CHECK(rep.converged);
      CHECK(rep.relative_residuals.size() == rep.iterations + 1);
      CHECK(rep.relative_residuals.back() <= 1e-10);
      const auto ev = testing::product_eigenvalues(dense(m), ad);
      const double eps = 1e-6 * ev.maxCoeff();
      CHECK(rep.ritz_min >= ev.minCoeff() - eps);
      CHECK(rep.ritz_max <= ev.maxCoeff() + eps);
      const double kappa = ev.maxCoeff() / ev.minCoeff();
      CHECK(rep.iterations <= std::ceil(0.5 * std::sqrt(kappa) * std::log(2.0 / 1e-10)) + 5);
    }
  }

  TEST_CASE("max_it without convergence") {
    auto a = testing::laplacian_1d(100);
    auto [x, rep] = pcg(a, IdentityOperator(100), Vector(100, 1.0), 1e-10, 5);
    CHECK_FALSE(rep.converged);
    CHECK(rep.iterations == 5);
  }

  TEST_CASE("breakdown names the failing operator") {
    const SparseMatrix neg = SparseMatrix::diagonal(Vector{1.0, -1.0, 2.0});
    const IdentityOperator id(3);
    try {
      pcg(neg, id, Vector{1.0, 1.0, 1.0});
      FAIL("expected breakdown");
    } catch (const BreakdownError& e) {
      CHECK(e.source() == BreakdownError::Source::kOperator);
    }
    try {
      pcg(id, neg, Vector{1.0, 1.0, 1.0});
      FAIL("expected breakdown");
    } catch (const BreakdownError& e) {
      CHECK(e.source() == BreakdownError::Source::kPreconditioner);
    }
  }

  TEST_CASE("zero right-hand side") {
    auto [x, rep] = pcg(IdentityOperator(3), IdentityOperator(3), Vector(3, 0.0));
    CHECK(rep.converged);
    CHECK(x == Vector(3, 0.0));
  }

  TEST_CASE("tridiagonal extreme eigenvalues") {
    const auto [lo, hi] = tridiagonal_extreme_eigenvalues(Vector{2, 2}, Vector{-1});
    CHECK(lo == doctest::Approx(1.0));
    CHECK(hi == doctest::Approx(3.0));
    const std::size_t n = 30;
    const auto [lo2, hi2] = tridiagonal_extreme_eigenvalues(Vector(n, 2.0), Vector(n - 1, -1.0));
    const double pi = std::acos(-1.0);
    CHECK(lo2 == doctest::Approx(2.0 - 2.0 * std::cos(pi / (n + 1))).epsilon(1e-10));
    CHECK(hi2 == doctest::Approx(2.0 + 2.0 * std::cos(pi / (n + 1))).epsilon(1e-10));
  }
}
