#include <doctest.h>

#include "amgf/error.hpp"
#include "amgf/smoother.hpp"
#include "helpers.hpp"

using namespace amgf;
using Eigen::MatrixXd;
using testing::dense;

TEST_SUITE("smoother") {
  TEST_CASE("l1 diagonal") {
    CHECK(L1Smoother(std::make_shared<SparseMatrix>(SparseMatrix::identity(3))).l1_diagonal() ==
          Vector{1, 1, 1});
    const L1Smoother two(std::make_shared<SparseMatrix>(testing::laplacian_1d(2)));
    CHECK(two.l1_diagonal() == Vector{3, 3});
    const L1Smoother lap(std::make_shared<SparseMatrix>(testing::laplacian_1d(10)));
    CHECK(lap.l1_diagonal()[5] == 4.0);
    CHECK(lap.l1_diagonal()[0] == 3.0);

    TripletAssembler t(2, 2);
    t.add(0, 0, 1.0);
    t.add(1, 1, 0.0);
    CHECK_THROWS_AS(L1Smoother(std::make_shared<SparseMatrix>(t.finalize())), NotSpdError);
  }

  TEST_CASE("sweep fixed point and identity") {
    std::mt19937_64 rng(11);
    auto a = std::make_shared<SparseMatrix>(testing::random_spd(20, 0.2, rng));
    const L1Smoother s(a);
    const Vector x_exact = testing::random_vector(20, rng);
    const Vector b = spmv(*a, x_exact);
    for (auto dir : {SweepDirection::kForward, SweepDirection::kBackward}) {
      Vector x = x_exact;
      s.gauss_seidel(x, b, dir);
      for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i] == doctest::Approx(x_exact[i]).epsilon(1e-13));
    }
    const L1Smoother id(std::make_shared<SparseMatrix>(SparseMatrix::identity(4)));
    Vector x(4, 0.0);
    id.gauss_seidel(x, Vector{1, -2, 3, 5}, SweepDirection::kForward);
    CHECK(x == Vector{1, -2, 3, 5});
  }

  TEST_CASE("symmetric sweeps reduce the error") {
    auto a = std::make_shared<SparseMatrix>(testing::laplacian_1d(4));
    const L1Smoother s(a);
    const MatrixXd ad = dense(*a);
    const Eigen::VectorXd b = Eigen::VectorXd::Ones(4);
    const Eigen::VectorXd x_exact = ad.llt().solve(b);
    Vector x(4, 0.0), bv(4, 1.0);
    double prev = x_exact.norm();
    for (int k = 0; k < 5; ++k) {
      s.gauss_seidel(x, bv, SweepDirection::kForward);
      s.gauss_seidel(x, bv, SweepDirection::kBackward);
      const double err = (testing::to_eigen(x) - x_exact).norm();
      CHECK(err < prev);
      prev = err;
    }
  }

  TEST_CASE("symmetric smoother is symmetric, convergent and contracting") {
    std::mt19937_64 rng(12);
    for (int rep = 0; rep < 8; ++rep) {
      const std::size_t n = 10 + 12 * static_cast<std::size_t>(rep);
      auto a = std::make_shared<SparseMatrix>(testing::random_spd(n, 0.15, rng));
      const SymmetricGaussSeidel b(a, 1 + rep % 2);
      const MatrixXd bd = dense(b), ad = dense(*a);
      CHECK((bd - bd.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * bd.cwiseAbs().maxCoeff());
      const auto ev = testing::product_eigenvalues(bd, ad);
      CHECK(ev.maxCoeff() <= 1.0 + 1e-10);
      CHECK(ev.minCoeff() > 0.0);
      // ||I - B A||_A = max |1 - lambda(BA)|
      CHECK((1.0 - ev.array()).abs().maxCoeff() < 1.0);
    }
  }

  TEST_CASE("jacobi sweep and preconditioner") {
    auto a = std::make_shared<SparseMatrix>(testing::laplacian_1d(5));
    const L1Smoother s(a);
    Vector x(5, 0.0);
    s.jacobi(x, Vector{4, 3, 4, 3, 4});
    CHECK(x == Vector{4.0 / 3.0, 0.75, 1.0, 0.75, 4.0 / 3.0});

    const JacobiPreconditioner j(*a);
    CHECK(j(Vector{2, 4, 6, 8, 10}) == Vector{1, 2, 3, 4, 5});
  }
}
