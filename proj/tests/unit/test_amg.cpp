#include <doctest.h>

#include "amgf/amg.hpp"
#include "amgf/error.hpp"
#include "amgf/fem.hpp"
#include "amgf/pcg.hpp"
#include "amgf/vector_ops.hpp"
#include "helpers.hpp"

using namespace amgf;
using Eigen::MatrixXd;
using testing::dense;

namespace {

AmgConfig small_coarse(std::size_t coarsest) {
  AmgConfig c;
  c.coarsest_size = coarsest;
  return c;
}

void check_galerkin(const AmgHierarchy& h) {
  for (std::size_t l = 0; l + 1 < h.num_levels(); ++l) {
    const MatrixXd p = dense(h.level(l).prolongation);
    const MatrixXd ref = p.transpose() * dense(*h.level(l).matrix) * p;
    MatrixXd coarse = dense(*h.level(l + 1).matrix);
    // Empty aggregates carry a unit diagonal instead of a zero row.
    for (Eigen::Index k = 0; k < p.cols(); ++k)
      if (p.col(k).cwiseAbs().maxCoeff() == 0.0) coarse(k, k) -= 1.0;
    CHECK((coarse - ref).cwiseAbs().maxCoeff() <= 1e-12 * ref.cwiseAbs().maxCoeff());
  }
}

}  // namespace

TEST_SUITE("amg") {
  TEST_CASE("identity is solved exactly") {
    auto a = std::make_shared<SparseMatrix>(SparseMatrix::identity(100));
    const auto h = AmgHierarchy::setup(a);
    std::mt19937_64 rng(1);
    const Vector r = testing::random_vector(100, rng);
    const Vector z = (*h)(r);
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(z[i] == doctest::Approx(r[i]).epsilon(1e-12));
  }

  TEST_CASE("single level solves exactly") {
    std::mt19937_64 rng(2);
    auto a = std::make_shared<SparseMatrix>(testing::random_spd(30, 0.2, rng));
    const auto h = AmgHierarchy::setup(a);
    REQUIRE(h->num_levels() == 1);
    const Vector x = testing::random_vector(30, rng);
    const Vector z = (*h)(spmv(*a, x));
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(z[i] == doctest::Approx(x[i]).epsilon(1e-10));
  }

  TEST_CASE("1D Laplacian hierarchy") {
    auto a = std::make_shared<SparseMatrix>(testing::laplacian_1d(64));
    const auto h = AmgHierarchy::setup(a, {Vector(64, 1.0)}, small_coarse(8));
    CHECK(h->num_levels() >= 2);
    CHECK(h->level(h->num_levels() - 1).matrix->rows() <= 8);
    for (std::size_t l = 1; l < h->num_levels(); ++l) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(dense(*h->level(l).matrix));
      CHECK(es.eigenvalues().minCoeff() > 0.0);
    }
    check_galerkin(*h);
    CHECK((*h)(Vector(64, 0.0)) == Vector(64, 0.0));

    const Vector b(64, 1.0);
    auto [x, rep] = pcg(*a, *h, b, 1e-10);
    CHECK(rep.converged);
    CHECK(rep.iterations <= 15);
  }

  TEST_CASE("V-cycle is symmetric, positive and convergent") {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 6; ++rep) {
      const std::size_t n = 60 + 40 * static_cast<std::size_t>(rep);
      auto a = std::make_shared<SparseMatrix>(testing::random_spd(n, 0.05, rng));
      const auto h = AmgHierarchy::setup(a, {}, small_coarse(10));
      CHECK(h->num_levels() >= 2);
      const Vector x = testing::random_vector(n, rng), y = testing::random_vector(n, rng);
      const double bxy = dot((*h)(x), y), xby = dot(x, (*h)(y));
      CHECK(std::abs(bxy - xby) <= 1e-11 * std::max(std::abs(bxy), 1.0));
      CHECK(dot((*h)(x), x) > 0.0);
      const auto ev = testing::product_eigenvalues(dense(*h), dense(*a));
      CHECK(ev.maxCoeff() <= 1.0 + 1e-8);
      CHECK(ev.minCoeff() > 0.0);
    }
  }

  TEST_CASE("2D elasticity with rigid body modes") {
    const ContactSetup setup = build_two_block(2, 1);
    const ElasticSystem sys = assemble_elasticity(setup);
    const auto modes = free_rigid_body_modes(setup.mesh, sys.dofs);
    CHECK(modes.size() == 3);
    AmgConfig cfg;
    cfg.block_size = 2;
    const auto h = AmgHierarchy::setup(sys.k, modes, cfg);
    CHECK(h->num_levels() >= 2);
    CHECK(h->level(1).block_size == 3);
    check_galerkin(*h);
    CHECK(h->operator_complexity() >= 1.0);
    CHECK(h->operator_complexity() < 3.0);
  }

  TEST_CASE("rigid body modes") {
    const std::vector<double> coords{0, 0, 1, 0, 0, 1};
    const auto m2 = rigid_body_modes(2, coords);
    REQUIRE(m2.size() == 3);
    // Rotation: (-y, x) per node.
    CHECK(m2[2] == Vector{0, 0, 0, 1, -1, 0});
    CHECK(rigid_body_modes(3, std::vector<double>(9, 0.5)).size() == 6);
  }

  TEST_CASE("rank-deficient aggregates") {
    // Two nodes coupled only to each other cannot carry a rotation.
    TripletAssembler t(4, 4);
    for (std::size_t i = 0; i < 4; ++i) t.add(i, i, 2.0);
    t.add(0, 2, -1.0);
    t.add(2, 0, -1.0);
    t.add(1, 3, -1.0);
    t.add(3, 1, -1.0);
    auto a = std::make_shared<SparseMatrix>(t.finalize());
    const auto modes = rigid_body_modes(2, std::vector<double>{0, 0, 0, 0});
    AmgConfig cfg;
    cfg.block_size = 2;
    cfg.coarsest_size = 1;
    CHECK_THROWS_AS(AmgHierarchy::setup(a, modes, cfg), SetupError);
    cfg.rank_deficiency = AmgConfig::RankDeficiency::kZeroColumns;
    const auto h = AmgHierarchy::setup(a, modes, cfg);
    const auto ev = testing::product_eigenvalues(dense(*h), dense(*a));
    CHECK(ev.minCoeff() > 0.0);
  }
}
