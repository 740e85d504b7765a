#include <doctest.h>

#include <cmath>

#include "amgf/error.hpp"
#include "amgf/ipm.hpp"
#include "amgf/oracle.hpp"
#include "helpers.hpp"

using namespace amgf;
using oracle::DenseMatrix;

namespace {

DenseMatrix make(std::size_t r, std::size_t c, std::initializer_list<double> v) {
  DenseMatrix m(r, c);
  m.values.assign(v);
  return m;
}

}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("symmetric eigendecomposition") {
    auto e = oracle::dense_sym_eig(make(3, 3, {3, 0, 0, 0, 1, 0, 0, 0, 2}));
    REQUIRE(e.values.size() == 3);
    CHECK(e.values[0] == doctest::Approx(1.0));
    CHECK(e.values[1] == doctest::Approx(2.0));
    CHECK(e.values[2] == doctest::Approx(3.0));
    CHECK(std::abs(e.vectors(1, 0)) == doctest::Approx(1.0));

    e = oracle::dense_sym_eig(make(2, 2, {2, -1, -1, 2}));
    CHECK(e.values[0] == doctest::Approx(1.0));
    CHECK(e.values[1] == doctest::Approx(3.0));
    CHECK(std::abs(e.vectors(0, 0)) == doctest::Approx(std::sqrt(0.5)));

    CHECK_THROWS_AS(oracle::dense_sym_eig(make(2, 2, {1, 2, 0, 1})), DomainError);
  }

  TEST_CASE("generalized eigenvalues") {
    const DenseMatrix b = make(2, 2, {2, 1, 1, 2});
    DenseMatrix a = b;
    for (double& v : a.values) v *= 2.0;
    for (double l : oracle::dense_generalized_eig(a, b)) CHECK(l == doctest::Approx(2.0));
    const auto id = oracle::dense_generalized_eig(make(2, 2, {1, 0, 0, 4}), make(2, 2, {1, 0, 0, 1}));
    CHECK(id[0] == doctest::Approx(1.0));
    CHECK(id[1] == doctest::Approx(4.0));
    CHECK_THROWS_AS(oracle::dense_generalized_eig(b, make(2, 2, {1, 0, 0, -1})), NotSpdError);
  }

  TEST_CASE("product eigenvalues") {
    // M = A^{-1} gives all ones.
    const auto ev = oracle::dense_product_eig(make(2, 2, {2.0 / 3, 1.0 / 3, 1.0 / 3, 2.0 / 3}),
                                              make(2, 2, {2, -1, -1, 2}));
    for (double l : ev) CHECK(l == doctest::Approx(1.0));
    const auto d = oracle::dense_product_eig(make(2, 2, {1, 0, 0, 0.5}), make(2, 2, {4, 0, 0, 1}));
    CHECK(d[0] == doctest::Approx(0.5));
    CHECK(d[1] == doctest::Approx(4.0));
  }

  TEST_CASE("operator assembly") {
    const SparseMatrix a = testing::laplacian_1d(5);
    const DenseMatrix d = oracle::assemble(a);
    const DenseMatrix s = oracle::from_sparse(a);
    CHECK(d.values == s.values);
    CHECK(d(0, 1) == -1.0);
  }

  TEST_CASE("QP by active-set enumeration") {
    SUBCASE("unconstrained") {
      const auto s = oracle::qp_reference_solve(make(2, 2, {2, 0, 0, 4}), {2, 4}, DenseMatrix(0, 2), {}, {0, 0});
      REQUIRE(s.feasible);
      CHECK(s.u[0] == doctest::Approx(1.0));
      CHECK(s.u[1] == doctest::Approx(1.0));
      CHECK(s.objective == doctest::Approx(-3.0));
    }
    SUBCASE("one DOF") {
      const auto s = oracle::qp_reference_solve(make(1, 1, {1}), {2}, make(1, 1, {-1}), {1}, {0});
      REQUIRE(s.feasible);
      CHECK(s.u[0] == doctest::Approx(1.0));
      CHECK(s.lambda[0] == doctest::Approx(1.0));
      CHECK(s.active[0]);
      const auto free = oracle::qp_reference_solve(make(1, 1, {1}), {2}, make(1, 1, {-1}), {5}, {0});
      CHECK(free.u[0] == doctest::Approx(2.0));
      CHECK_FALSE(free.active[0]);
      CHECK(free.lambda[0] == 0.0);
    }
    SUBCASE("agrees with the interior-point solver") {
      std::mt19937_64 rng(51);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      for (int t = 0; t < 8; ++t) {
        const std::size_t n = 8, m = 3;
        auto k = std::make_shared<SparseMatrix>(testing::random_spd(n, 0.4, rng));
        TripletAssembler ja(m, n);
        DenseMatrix jd(m, n);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t c = 0; c < n; ++c) {
            jd(i, c) = u(rng);
            ja.add(i, c, jd(i, c));
          }
        ContactProblem p;
        p.k = k;
        p.f = testing::random_vector(n, rng);
        p.j = ja.finalize();
        p.g_ref = {0.2 * (u(rng) + 1.0), 0.2 * (u(rng) + 1.0), 0.2 * (u(rng) + 1.0)};
        p.u_ref = testing::random_vector(n, rng);
        p.m_u = DiagonalMatrix(n, 1.0);
        p.m_s = DiagonalMatrix(m, 1.0);
        IpConfig cfg;
        cfg.tol_ip = 1e-9;
        cfg.preconditioner = PreconditionerKind::kExact;
        auto [x, rep] = ip_solve(p, cfg);
        REQUIRE(rep.converged());
        const auto ref = oracle::qp_reference_solve(oracle::from_sparse(*k), p.f, jd, p.g_ref, p.u_ref);
        REQUIRE(ref.feasible);
        for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(ref.u[i]).epsilon(1e-6));
        for (std::size_t i = 0; i < m; ++i)
          CHECK(-rep.state.lambda[i] == doctest::Approx(ref.lambda[i]).epsilon(1e-6).scale(1.0));
      }
    }
  }
}
