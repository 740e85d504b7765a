#include <doctest.h>

#include <sstream>

#include "amgf/error.hpp"
#include "amgf/matrix_market.hpp"
#include "amgf/sparse_matrix.hpp"
#include "amgf/vector_ops.hpp"
#include "helpers.hpp"

using namespace amgf;
using testing::dense;
using Eigen::MatrixXd;

TEST_SUITE("sparse") {
  TEST_CASE("spmv small cases") {
    CHECK(spmv(SparseMatrix::identity(3), Vector{1, 2, 3}) == Vector{1, 2, 3});

    TripletAssembler t(2, 2);
    t.add(0, 0, 2);
    t.add(0, 1, -1);
    t.add(1, 0, -1);
    t.add(1, 1, 2);
    CHECK(spmv(t.finalize(), Vector{1, 1}) == Vector{1, 1});

    CHECK(spmv(SparseMatrix::zeros(3, 2), Vector{4, 5}) == Vector{0, 0, 0});
    CHECK_THROWS_AS(spmv(SparseMatrix::identity(3), Vector{1, 2}), SizeError);
  }

  TEST_CASE("spmv is linear") {
    std::mt19937_64 rng(1);
    for (std::size_t n : {5u, 60u, 200u}) {
      const SparseMatrix a = testing::random_spd(n, 0.05, rng);
      const Vector x = testing::random_vector(n, rng), y = testing::random_vector(n, rng);
      const double alpha = 0.7, beta = -1.3;
      Vector xy(n);
      for (std::size_t i = 0; i < n; ++i) xy[i] = alpha * x[i] + beta * y[i];
      const Vector lhs = spmv(a, xy), ax = spmv(a, x), ay = spmv(a, y);
      for (std::size_t i = 0; i < n; ++i) {
        const double rhs = alpha * ax[i] + beta * ay[i];
        CHECK(std::abs(lhs[i] - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
      }
    }
  }

  TEST_CASE("assembler sums duplicates and keeps explicit zeros") {
    TripletAssembler t(2, 3);
    t.add(0, 2, 1.5);
    t.add(0, 2, 2.5);
    t.add(1, 0, 1.0);
    t.add(1, 0, -1.0);
    const SparseMatrix a = t.finalize();
    CHECK(a.nnz() == 2);
    CHECK(a.at(0, 2) == 4.0);
    CHECK(a.at(1, 0) == 0.0);
    CHECK(a.at(1, 1) == 0.0);
  }

  TEST_CASE("CSR invariants are validated") {
    CHECK_NOTHROW(SparseMatrix(2, 2, {0, 1, 2}, {0, 1}, {1.0, 1.0}));
    CHECK_THROWS_AS(SparseMatrix(2, 2, {0, 2, 1}, {0, 1}, {1.0, 1.0}), SizeError);
    CHECK_THROWS_AS(SparseMatrix(2, 2, {0, 2, 2}, {1, 0}, {1.0, 1.0}), SizeError);
    CHECK_THROWS_AS(SparseMatrix(2, 2, {0, 1, 2}, {0, 2}, {1.0, 1.0}), SizeError);
    CHECK_THROWS_AS(SparseMatrix(2, 2, {1, 1, 2}, {0, 1}, {1.0, 1.0}), SizeError);
  }

  TEST_CASE("triple product") {
    SUBCASE("zero weights give a zero matrix") {
      TripletAssembler t(2, 3);
      t.add(0, 0, 1.0);
      t.add(1, 2, -2.0);
      const SparseMatrix p = triple_product(t.finalize(), DiagonalMatrix(2, 0.0));
      CHECK(dense(p).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("hand example") {
      TripletAssembler t(1, 2);
      t.add(0, 0, 1.0);
      t.add(0, 1, -1.0);
      const MatrixXd p = dense(triple_product(t.finalize(), DiagonalMatrix(Vector{3.0})));
      CHECK(p(0, 0) == 3.0);
      CHECK(p(0, 1) == -3.0);
      CHECK(p(1, 0) == -3.0);
      CHECK(p(1, 1) == 3.0);
    }
    SUBCASE("random against dense, symmetric, confined to nonzero columns") {
      std::mt19937_64 rng(3);
      std::uniform_real_distribution<double> u(-1.0, 1.0);
      for (int rep = 0; rep < 5; ++rep) {
        TripletAssembler t(5, 8);
        for (std::size_t i = 0; i < 5; ++i)
          for (std::size_t j = 0; j < 8; ++j)
            if (j % 3 != 1 && u(rng) > 0.3) t.add(i, j, u(rng));
        const SparseMatrix j = t.finalize();
        Vector d(5);
        for (auto& x : d) x = 0.5 + std::abs(u(rng));
        const SparseMatrix p = triple_product(j, DiagonalMatrix(d));
        const MatrixXd jd = dense(j);
        const MatrixXd ref = jd.transpose() * testing::to_eigen(d).asDiagonal() * jd;
        CHECK((dense(p) - ref).cwiseAbs().maxCoeff() <= 1e-13 * ref.cwiseAbs().maxCoeff());
        CHECK(p.is_symmetric());
        for (std::size_t c = 1; c < 8; c += 3) {
          CHECK(dense(p).row(static_cast<Eigen::Index>(c)).cwiseAbs().maxCoeff() == 0.0);
          CHECK(dense(p).col(static_cast<Eigen::Index>(c)).cwiseAbs().maxCoeff() == 0.0);
        }
      }
    }
    CHECK_THROWS_AS(triple_product(SparseMatrix::identity(3), DiagonalMatrix(2, 1.0)), SizeError);
  }

  TEST_CASE("products, sums and submatrices agree with dense") {
    std::mt19937_64 rng(4);
    const SparseMatrix a = testing::random_spd(30, 0.1, rng);
    const SparseMatrix b = testing::random_spd(30, 0.1, rng);
    const MatrixXd ad = dense(a), bd = dense(b);
    CHECK((dense(multiply(a, b)) - ad * bd).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((dense(add(a, b, 2.0, -0.5)) - (2.0 * ad - 0.5 * bd)).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((dense(a.transpose()) - ad.transpose()).cwiseAbs().maxCoeff() == 0.0);

    const std::vector<std::size_t> idx{1, 4, 5, 20};
    const MatrixXd sub = dense(principal_submatrix(a, idx));
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < idx.size(); ++j) CHECK(sub(i, j) == ad(idx[i], idx[j]));

    TripletAssembler pt(30, 6);
    for (std::size_t i = 0; i < 30; ++i) pt.add(i, i / 5, 1.0 + 0.1 * static_cast<double>(i));
    const SparseMatrix p = pt.finalize();
    const MatrixXd gal = dense(p).transpose() * ad * dense(p);
    const SparseMatrix g = galerkin_product(p, a);
    CHECK((dense(g) - gal).cwiseAbs().maxCoeff() <= 1e-12 * gal.cwiseAbs().maxCoeff());
    CHECK(g.is_symmetric(0.0));
  }

  TEST_CASE("diagonal matrix condition") {
    CHECK(DiagonalMatrix(Vector{1.0, 1e4, 10.0}).condition() == doctest::Approx(1e4));
  }

  TEST_CASE("weighted norm") {
    CHECK(weighted_norm(Vector{0.0, 0.0}, DiagonalMatrix(2, 3.0)) == 0.0);
    CHECK(weighted_norm(Vector{3.0, 4.0}, DiagonalMatrix(2, 1.0)) == doctest::Approx(5.0));
    CHECK(weighted_norm(Vector{2.0}, DiagonalMatrix(Vector{4.0})) == doctest::Approx(1.0));
    CHECK(weighted_norm(Vector{3.0, -7.0}, DiagonalMatrix(2, 1.0), NormKind::kInfinity) == 7.0);
    CHECK_THROWS_AS(weighted_norm(Vector{1.0}, DiagonalMatrix(Vector{0.0})), DomainError);
  }

  TEST_CASE("matrix market round trip") {
    std::mt19937_64 rng(5);
    for (const SparseMatrix& a : {SparseMatrix::identity(4), testing::random_spd(25, 0.2, rng)}) {
      for (auto sym : {MatrixMarketSymmetry::kGeneral, MatrixMarketSymmetry::kSymmetric}) {
        std::stringstream ss;
        write_matrix_market(ss, a, sym);
        const SparseMatrix b = read_matrix_market(ss);
        CHECK(dense(b) == dense(a));
      }
    }
  }

  TEST_CASE("matrix market conventions and errors") {
    std::stringstream one("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 2.0\n");
    const SparseMatrix a = read_matrix_market(one);
    CHECK(a.at(0, 0) == 2.0);
    CHECK(a.nnz() == 1);

    std::stringstream sym(
        "%%MatrixMarket matrix coordinate real symmetric\n% lower triangle\n3 3 3\n"
        "1 1 4\n2 1 -1\n3 2 -2\n");
    const MatrixXd s = dense(read_matrix_market(sym));
    CHECK(s(0, 1) == -1.0);
    CHECK(s(1, 0) == -1.0);
    CHECK(s(1, 2) == -2.0);
    CHECK(s(2, 1) == -2.0);

    std::stringstream bad_header("%%MatrixMarket matrix array real general\n1 1\n1.0\n");
    CHECK_THROWS_AS(read_matrix_market(bad_header), ParseError);
    std::stringstream out_of_range("%%MatrixMarket matrix coordinate real general\n2 2 1\n3 1 1.0\n");
    try {
      read_matrix_market(out_of_range);
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 3);
    }
  }
}
