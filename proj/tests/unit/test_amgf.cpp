#include <doctest.h>

#include "amgf/amg.hpp"
#include "amgf/certify.hpp"
#include "amgf/error.hpp"
#include "amgf/fem.hpp"
#include "amgf/filtered_preconditioner.hpp"
#include "amgf/smoother.hpp"
#include "amgf/time_stepping.hpp"
#include "helpers.hpp"

using namespace amgf;
using Eigen::MatrixXd;
using testing::dense;

namespace {

MatrixXd selection(std::size_t n, const ContactIndexSet& c) {
  MatrixXd p = MatrixXd::Zero(n, c.size());
  for (std::size_t k = 0; k < c.size(); ++k) p(c.indices[k], k) = 1.0;
  return p;
}

std::shared_ptr<const AmgHierarchy> amg(std::shared_ptr<const SparseMatrix> a, std::size_t coarsest,
                                        std::vector<Vector> nns = {}, std::size_t block = 1) {
  AmgConfig c;
  c.coarsest_size = coarsest;
  c.block_size = block;
  c.rank_deficiency = AmgConfig::RankDeficiency::kZeroColumns;
  return AmgHierarchy::setup(std::move(a), std::move(nns), c);
}

}  // namespace

TEST_SUITE("amgf") {
  TEST_CASE("contact DOF detection") {
    CHECK(detect_contact_dofs(SparseMatrix::zeros(0, 5)).empty());
    TripletAssembler t(1, 3);
    t.add(0, 0, 1.0);
    t.add(0, 2, -1.0);
    CHECK(detect_contact_dofs(t.finalize()).indices == std::vector<std::size_t>{0, 2});
    const std::vector<std::size_t> bounds{1, 2};
    CHECK(detect_contact_dofs(t.finalize(), bounds).indices == std::vector<std::size_t>{0, 1, 2});
  }

  TEST_CASE("A_w is the principal submatrix") {
    std::mt19937_64 rng(21);
    auto a = std::make_shared<SparseMatrix>(testing::random_spd(50, 0.1, rng));
    const auto c = testing::random_subset(50, 10, rng);
    const FilteredPreconditioner m(a, amg(a, 8), c);
    const MatrixXd p = selection(50, c);
    const MatrixXd aw = p.transpose() * dense(*a) * p;
    for (std::size_t i = 0; i < 10; ++i)
      for (std::size_t j = 0; j < 10; ++j) CHECK(std::abs(m.a_w()[i * 10 + j] - aw(i, j)) <= 1e-14);
  }

  TEST_CASE("degenerate contact sets") {
    std::mt19937_64 rng(22);
    auto a = std::make_shared<SparseMatrix>(testing::random_spd(40, 0.1, rng));
    auto b = std::make_shared<SymmetricGaussSeidel>(a, 1);
    const MatrixXd ad = dense(*a), bd = dense(*b), id = MatrixXd::Identity(40, 40);

    const MatrixXd m0 = dense(FilteredPreconditioner(a, b, {}));
    CHECK((m0 - (bd + bd * (id - ad * bd))).cwiseAbs().maxCoeff() < 1e-12);

    ContactIndexSet all;
    for (std::size_t i = 0; i < 40; ++i) all.indices.push_back(i);
    const MatrixXd ma = dense(FilteredPreconditioner(a, b, all)) * ad;
    CHECK((ma - id).cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("exact base gives the exact inverse") {
    std::mt19937_64 rng(23);
    auto a = std::make_shared<SparseMatrix>(testing::random_spd(30, 0.2, rng));
    const auto h = amg(a, 64);
    REQUIRE(h->num_levels() == 1);
    const FilteredPreconditioner m(a, h, testing::random_subset(30, 5, rng));
    const Vector x = testing::random_vector(30, rng);
    const Vector z = m(spmv(*a, x));
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(z[i] == doctest::Approx(x[i]).epsilon(1e-9));
  }

  TEST_CASE("filter stage alone reproduces contact unit vectors") {
    struct Zero final : LinearOperator {
      std::size_t n;
      explicit Zero(std::size_t size) : n(size) {}
      std::size_t size() const override { return n; }
      void apply(std::span<const double>, std::span<double> y) const override {
        std::fill(y.begin(), y.end(), 0.0);
      }
    };
    std::mt19937_64 rng(24);
    auto a = std::make_shared<SparseMatrix>(testing::random_spd(20, 0.2, rng));
    const auto c = testing::random_subset(20, 4, rng);
    const FilteredPreconditioner m(a, std::make_shared<Zero>(20), c);
    for (std::size_t k : c.indices) {
      Vector e(20, 0.0);
      e[k] = 1.0;
      const Vector x = m(spmv(*a, e));
      for (std::size_t i = 0; i < 20; ++i) CHECK(x[i] == doctest::Approx(e[i]).epsilon(1e-12));
    }
  }

  TEST_CASE("operator identity") {
    std::mt19937_64 rng(25);
    for (int rep = 0; rep < 4; ++rep) {
      const std::size_t n = 60, nc = 12;
      auto a = std::make_shared<SparseMatrix>(testing::random_spd(n, 0.08, rng));
      std::shared_ptr<const LinearOperator> b;
      if (rep % 2) b = std::make_shared<SymmetricGaussSeidel>(a, 1);
      else b = amg(a, 8);
      const auto c = testing::random_subset(n, nc, rng);
      const FilteredPreconditioner m(a, b, c);
      const MatrixXd ad = dense(*a), bd = dense(*b), md = dense(m), p = selection(n, c);
      const MatrixXd id = MatrixXd::Identity(n, n);
      const MatrixXd filt = id - p * (p.transpose() * ad * p).llt().solve(p.transpose() * ad);
      const MatrixXd rhs = (id - bd * ad) * filt * (id - bd * ad);
      CHECK(((id - md * ad) - rhs).cwiseAbs().maxCoeff() <= 1e-11);
      CHECK((md - md.transpose()).cwiseAbs().maxCoeff() <= 1e-10 * md.cwiseAbs().maxCoeff());
      CHECK(Eigen::SelfAdjointEigenSolver<MatrixXd>(0.5 * (md + md.transpose())).eigenvalues().minCoeff() > 0.0);
    }
  }

  TEST_CASE("update refactorizes A_w") {
    std::mt19937_64 rng(26);
    auto a = std::make_shared<SparseMatrix>(testing::random_spd(30, 0.1, rng));
    const auto c = testing::random_subset(30, 6, rng);
    FilteredPreconditioner m(a, amg(a, 8), c);
    auto a2 = std::make_shared<SparseMatrix>(add(*a, *a, 1.0, 1.0));
    m.update(a2, amg(a2, 8));
    const FilteredPreconditioner fresh(a2, amg(a2, 8), c);
    CHECK(m.a_w() == fresh.a_w());
    const Vector r = testing::random_vector(30, rng);
    const Vector z1 = m(r), z2 = fresh(r);
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(z1[i] == doctest::Approx(z2[i]).epsilon(1e-14));
  }

  TEST_CASE("A_w not SPD") {
    TripletAssembler t(3, 3);
    t.add(0, 0, 1.0);
    t.add(1, 1, -1.0);
    t.add(2, 2, 1.0);
    auto a = std::make_shared<SparseMatrix>(t.finalize());
    CHECK_THROWS_AS(FilteredPreconditioner(a, std::make_shared<IdentityOperator>(3), {{1}}), NotSpdError);
  }

  TEST_CASE("certificate: exact base") {
    std::mt19937_64 rng(27);
    auto a = std::make_shared<SparseMatrix>(testing::random_spd(30, 0.2, rng));
    const auto h = amg(a, 64);
    const auto c = testing::random_subset(30, 5, rng);
    const FilteredPreconditioner m(a, h, c);
    const auto rep = certify_bounds(*a, m, *h, c);
    CHECK(rep.kappa == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(rep.lower_bound_holds());
    CHECK(rep.upper_bound_holds());
  }

  TEST_CASE("certificate: 1D Laplacian with two sweeps") {
    auto a = std::make_shared<SparseMatrix>(testing::laplacian_1d(40));
    auto b = std::make_shared<SymmetricGaussSeidel>(a, 2);
    const ContactIndexSet c{{19, 20}};
    const auto rep = certify_bounds(*a, FilteredPreconditioner(a, b, c), *b, c);
    CHECK(rep.n == 40);
    CHECK(rep.n_c == 2);
    CHECK(rep.omega <= 1.0 + 1e-8);
    CHECK(rep.lower_bound_holds());
    CHECK(rep.upper_bound_holds());
    CHECK(rep.simplified_bound_holds());
    // Independent check of lmin/lmax against the pencil eigenvalues.
    const auto ev = testing::product_eigenvalues(dense(FilteredPreconditioner(a, b, c)), dense(*a));
    CHECK(rep.lmin == doctest::Approx(1.0 / ev.maxCoeff()));
    CHECK(rep.lmax == doctest::Approx(1.0 / ev.minCoeff()));

    const auto row = rep.csv_row();
    CHECK(CertifyReport::csv_header() == "n,n_c,omega,beta,lmin,lmax,kappa,bound");
    CHECK(std::count(row.begin(), row.end(), ',') == 7);
  }

  TEST_CASE("certificate: beta on V against the full space") {
    std::mt19937_64 rng(28);
    auto a = std::make_shared<SparseMatrix>(testing::random_spd(50, 0.1, rng));
    const auto b = amg(a, 8);
    const auto c = testing::random_subset(50, 8, rng);
    const auto rep = certify_bounds(*a, FilteredPreconditioner(a, b, c), *b, c);
    // beta on the subspace never exceeds the full-space constant 1/lambda_min(BA).
    const auto ev = testing::product_eigenvalues(dense(*b), dense(*a));
    CHECK(rep.beta <= 1.0 / ev.minCoeff() * (1.0 + 1e-10));
    CHECK(rep.alpha >= 1.0 / ev.maxCoeff() * (1.0 - 1e-10));
  }

  TEST_CASE("certificate refuses large problems") {
    auto a = std::make_shared<SparseMatrix>(testing::laplacian_1d(50));
    auto b = std::make_shared<SymmetricGaussSeidel>(a, 1);
    CertifyOptions opt;
    opt.dense_threshold = 20;
    CHECK_THROWS_AS(certify_bounds(*a, *b, *b, {}, opt), DomainError);
    CHECK_THROWS_AS(certify_precision_for(*a, opt), DomainError);
  }

  TEST_CASE("reconstructed certificate matches the assembled one") {
    std::mt19937_64 rng(29);
    for (int rep = 0; rep < 3; ++rep) {
      auto a = std::make_shared<SparseMatrix>(testing::random_spd(40 + 20 * static_cast<std::size_t>(rep), 0.1, rng));
      const auto h = amg(a, 8);
      REQUIRE(h->num_levels() >= 2);
      const auto c = testing::random_subset(a->rows(), 6, rng);
      CHECK(certify_precision_for(*a) == CertifyPrecision::kDouble);
      const auto assembled = certify_bounds(*a, FilteredPreconditioner(a, h, c), *h, c);
      for (auto prec : {CertifyPrecision::kDouble, CertifyPrecision::kQuad}) {
        const auto r = certify_amgf(*a, *h, c, prec);
        CHECK(r.precision == (prec == CertifyPrecision::kQuad ? "quad" : "double"));
        CHECK(r.omega == doctest::Approx(assembled.omega).epsilon(1e-10));
        CHECK(r.lmin == doctest::Approx(assembled.lmin).epsilon(1e-10));
        CHECK(r.lmax == doctest::Approx(assembled.lmax).epsilon(1e-8));
        CHECK(r.beta == doctest::Approx(assembled.beta).epsilon(1e-8));
      }
    }
  }

  TEST_CASE("robustness under D scaling") {
    const ContactSetup setup = build_two_block(2, 0);
    const ElasticSystem sys = assemble_elasticity(setup);
    const Vector rest(setup.mesh.coords.size(), 0.0);
    const StepProblem sp = make_step_problem(setup, sys, rest, 1, 2);
    const SparseMatrix& j = sp.problem.j;
    const ContactIndexSet c = detect_contact_dofs(j);
    double kmin = 1e300, kmax = 0.0, base0 = 0.0, base12 = 0.0;
    for (int k = 0; k <= 12; k += 4) {
      Vector d(j.rows());
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = i == 0 ? 1.0 : std::pow(10.0, k);
      auto a = std::make_shared<SparseMatrix>(add(*sys.k, triple_product(j, DiagonalMatrix(d))));
      const auto h = amg(a, 64, sp.problem.near_nullspace, 2);
      const auto rep = certify_amgf(*a, *h, c, certify_precision_for(*a));
      CHECK(rep.lower_bound_holds());
      CHECK(rep.simplified_bound_holds());
      kmin = std::min(kmin, rep.kappa);
      kmax = std::max(kmax, rep.kappa);
      if (k == 0) base0 = rep.kappa_base;
      if (k == 12) base12 = rep.kappa_base;
      CHECK(rep.kappa < rep.kappa_base);
    }
    CHECK(kmax / kmin < 4.0);
    // The rebuilt hierarchy partly adapts, so plain AMG saturates rather than diverging.
    CHECK(base12 >= 2.0 * base0);
  }

  TEST_CASE("stability estimate") {
    std::mt19937_64 rng(30);
    auto a = std::make_shared<SparseMatrix>(testing::random_spd(40, 0.1, rng));
    const auto b = amg(a, 8);
    const auto c = testing::random_subset(40, 6, rng);
    const auto rep = certify_bounds(*a, FilteredPreconditioner(a, b, c), *b, c);
    const auto s = check_stability_estimate(*a, *b, c, rep.omega, rep.beta, 1000, 1);
    CHECK(s.samples == 1000);
    CHECK(s.violations == 0);
    CHECK(s.max_ratio <= 1.0);
  }
}
