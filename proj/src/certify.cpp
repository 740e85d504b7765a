#include "amgf/certify.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <boost/multiprecision/float128.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "amgf/error.hpp"
#include "amgf/oracle.hpp"

namespace amgf {

namespace {

using quad = boost::multiprecision::float128;
template <typename T>
using MatT = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
using Mat = MatT<double>;
using Vec = Eigen::VectorXd;

Mat to_eigen(const oracle::DenseMatrix& d) {
  Mat m(d.rows, d.cols);
  for (std::size_t i = 0; i < d.rows; ++i)
    for (std::size_t j = 0; j < d.cols; ++j) m(i, j) = d(i, j);
  return m;
}

template <typename T>
MatT<T> dense_of(const SparseMatrix& a) {
  MatT<T> d = MatT<T>::Zero(static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols()));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto cols = a.row_columns(i);
    const auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k)
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cols[k])) = T(vals[k]);
  }
  return d;
}

template <typename T>
MatT<T> symmetric_part(const MatT<T>& m) {
  return T(0.5) * (m + m.transpose());
}

void check_threshold(std::size_t n, const CertifyOptions& options) {
  if (n > options.dense_threshold)
    throw DomainError("certify: n = " + std::to_string(n) +
                      " exceeds the dense certification threshold " +
                      std::to_string(options.dense_threshold) +
                      "; use the Lanczos estimates from PCG (ritz_min/ritz_max) instead");
}

template <typename T>
MatT<T> lower_cholesky(const MatT<T>& a, const char* what) {
  Eigen::LLT<MatT<T>> llt(a);
  if (llt.info() != Eigen::Success) throw NotSpdError(std::string("certify: ") + what);
  return llt.matrixL();
}

// Spectra from G = L^T B L and T = L^T M L (A = L L^T); z spans the
// complement of range(L^T P_w). The pencil (M^{-1}, A) has the reciprocal
// spectrum of T, and beta = lambda_max(Z^T G^{-1} Z).
CertifyReport spectra_transformed(const Mat& g, const Mat& t, const Mat& z) {
  CertifyReport rep;
  rep.n = static_cast<std::size_t>(g.rows());
  rep.n_c = static_cast<std::size_t>(g.rows() - z.cols());

  Eigen::SelfAdjointEigenSolver<Mat> eg(g, Eigen::EigenvaluesOnly);
  rep.omega = eg.eigenvalues().maxCoeff();
  rep.kappa_base = eg.eigenvalues().maxCoeff() / eg.eigenvalues().minCoeff();

  Eigen::SelfAdjointEigenSolver<Mat> et(t, Eigen::EigenvaluesOnly);
  const double tmax = et.eigenvalues().maxCoeff(), tmin = et.eigenvalues().minCoeff();
  rep.lmin = 1.0 / tmax;
  rep.lmax = 1.0 / tmin;
  rep.kappa = tmax / tmin;

  if (z.cols() > 0) {
    const Mat rg = lower_cholesky<double>(g, "B is not SPD");
    const Mat w = rg.triangularView<Eigen::Lower>().solve(z);
    Eigen::SelfAdjointEigenSolver<Mat> eh(symmetric_part<double>(w.transpose() * w),
                                          Eigen::EigenvaluesOnly);
    rep.alpha = eh.eigenvalues().minCoeff();
    rep.beta = eh.eigenvalues().maxCoeff();
  }
  rep.bound = 2.0 * (rep.beta + 2.0 + rep.omega) / (2.0 - rep.omega);
  rep.bound_simplified = 2.0 * (rep.beta + 3.0);
  return rep;
}

// Full orthogonal factor of the rows of l at the contact DOFs (as columns);
// its leading n_c columns span L^T range(P_w).
template <typename T>
MatT<T> contact_basis(const MatT<T>& l, const ContactIndexSet& contact) {
  const Eigen::Index n = l.rows();
  const auto nc = static_cast<Eigen::Index>(contact.size());
  MatT<T> q = MatT<T>::Identity(n, n);
  if (nc == 0) return q;
  MatT<T> y(n, nc);
  for (Eigen::Index k = 0; k < nc; ++k)
    y.col(k) = l.row(static_cast<Eigen::Index>(contact.indices[static_cast<std::size_t>(k)]))
                   .transpose();
  Eigen::HouseholderQR<MatT<T>> qr(y);
  return qr.householderQ() * q;
}

// Spectra of B A and M A from assembled operators.
CertifyReport spectra(const Mat& ad, const Mat& bd, const Mat& md, const ContactIndexSet& contact) {
  const Mat l = lower_cholesky<double>(ad, "A is not SPD");
  const Mat g = symmetric_part<double>(l.transpose() * bd * l);
  const Mat t = symmetric_part<double>(l.transpose() * md * l);
  const auto nc = static_cast<Eigen::Index>(contact.size());
  return spectra_transformed(g, t, contact_basis<double>(l, contact).rightCols(ad.rows() - nc));
}

template <typename T>
using SpT = Eigen::SparseMatrix<T, Eigen::RowMajor>;

template <typename T>
SpT<T> sparse_of(const SparseMatrix& a) {
  std::vector<Eigen::Triplet<T>> trip;
  trip.reserve(a.nnz());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto cols = a.row_columns(i);
    const auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k)
      trip.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cols[k]), T(vals[k]));
  }
  SpT<T> s(static_cast<Eigen::Index>(a.rows()), static_cast<Eigen::Index>(a.cols()));
  s.setFromTriplets(trip.begin(), trip.end());
  return s;
}

// Dense V-cycle operator of level l for the exact Galerkin operator a.
template <typename T>
MatT<T> vcycle(const AmgHierarchy& h, std::size_t l, const SpT<T>& a) {
  const Eigen::Index n = a.rows();
  const MatT<T> id = MatT<T>::Identity(n, n);
  if (l + 1 == h.num_levels()) {
    const MatT<T> ad = a;
    return ad.llt().solve(id);
  }

  // l1 Gauss-Seidel: triangular part of a with d_i = sum_j |a_ij|.
  SpT<T> lower = a.template triangularView<Eigen::Lower>();
  SpT<T> upper = a.template triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    T d = 0;
    for (typename SpT<T>::InnerIterator it(a, i); it; ++it)
      d += it.col() == i ? it.value() : T(abs(it.value()));
    lower.coeffRef(i, i) = d;
    upper.coeffRef(i, i) = d;
  }
  const int pre = h.config().pre_sweeps, post = h.config().post_sweeps;
  MatT<T> x = MatT<T>::Zero(n, n);
  for (int s = 0; s < pre; ++s) {
    const MatT<T> r = id - a * x;
    x += lower.template triangularView<Eigen::Lower>().solve(r);
  }

  const SpT<T> p = sparse_of<T>(h.level(l).prolongation);
  SpT<T> ac = SpT<T>(p.transpose()) * a * p;
  // Zero prolongation columns get a unit diagonal, as in the setup.
  Eigen::Matrix<T, Eigen::Dynamic, 1> colmax = Eigen::Matrix<T, Eigen::Dynamic, 1>::Zero(p.cols());
  for (Eigen::Index i = 0; i < p.rows(); ++i)
    for (typename SpT<T>::InnerIterator it(p, i); it; ++it)
      colmax(it.col()) = std::max<T>(colmax(it.col()), T(abs(it.value())));
  for (Eigen::Index k = 0; k < p.cols(); ++k)
    if (colmax(k) == T(0)) ac.coeffRef(k, k) += T(1);
  ac = T(0.5) * (ac + SpT<T>(ac.transpose()));
  const MatT<T> bc = vcycle<T>(h, l + 1, ac);
  const MatT<T> r = id - a * x;
  const MatT<T> rc = p.transpose() * r;
  x += p * (bc * rc);

  for (int s = 0; s < post; ++s) {
    const MatT<T> r2 = id - a * x;
    x += upper.template triangularView<Eigen::Upper>().solve(r2);
  }
  return x;
}

// Reconstructs B and M from the hierarchy. With A = L L^T every operator is
// carried in the coordinates y = L^T u, where G = L^T B L and L^T M L are
// O(1); only L, G and the contact projector are formed in precision T.
template <typename T>
CertifyReport certify_definition(const SparseMatrix& a, const AmgHierarchy& h,
                                 const ContactIndexSet& contact) {
  const SpT<T> as = sparse_of<T>(a);
  const Eigen::Index n = as.rows();
  const auto nc = static_cast<Eigen::Index>(contact.size());
  const MatT<T> ad = symmetric_part<T>(MatT<T>(as));
  const MatT<T> l = lower_cholesky<T>(ad, "A is not SPD");
  const MatT<T> bd = vcycle<T>(h, 0, as);
  MatT<T> g = bd * l;
  g = l.transpose() * g;

  const MatT<T> q = contact_basis<T>(l, contact);

  const Mat gd = symmetric_part<double>(g.template cast<double>());
  const Mat qd = q.template cast<double>();
  const Mat id = Mat::Identity(n, n);
  // x1 = B r; x2 = x1 + P_w A_w^{-1} P_w^T (r - A x1); x = x2 + B (r - A x2)
  Mat t = gd;
  if (nc > 0) {
    const Mat qc = qd.leftCols(nc);
    t += qc * (qc.transpose() * (id - t));
  }
  t = t + gd * (id - t);
  return spectra_transformed(gd, symmetric_part<double>(t), qd.rightCols(n - nc));
}

}  // namespace

std::string CertifyReport::csv_header() { return "n,n_c,omega,beta,lmin,lmax,kappa,bound"; }

std::string CertifyReport::csv_row() const {
  std::ostringstream os;
  os << n << ',' << n_c << std::scientific << std::setprecision(10) << ',' << omega << ','
     << beta << ',' << lmin << ',' << lmax << ',' << kappa << ',' << bound;
  return os.str();
}

CertifyReport certify_bounds(const SparseMatrix& a, const LinearOperator& m,
                             const LinearOperator& b, const ContactIndexSet& contact,
                             const CertifyOptions& options) {
  const std::size_t n = a.rows();
  if (a.cols() != n || m.size() != n || b.size() != n) throw SizeError("certify: size mismatch");
  check_threshold(n, options);
  const Mat ad = symmetric_part<double>(to_eigen(oracle::from_sparse(a)));
  const Mat bd = symmetric_part<double>(to_eigen(oracle::assemble(b)));
  const Mat md = symmetric_part<double>(to_eigen(oracle::assemble(m)));
  return spectra(ad, bd, md, contact);
}

CertifyReport certify_amgf(const SparseMatrix& a, const AmgHierarchy& b,
                           const ContactIndexSet& contact, CertifyPrecision precision,
                           const CertifyOptions& options) {
  const std::size_t n = a.rows();
  if (a.cols() != n || b.size() != n) throw SizeError("certify: size mismatch");
  check_threshold(n, options);
  if (precision == CertifyPrecision::kDouble) return certify_definition<double>(a, b, contact);
  CertifyReport rep = certify_definition<quad>(a, b, contact);
  rep.precision = "quad";
  return rep;
}

CertifyPrecision certify_precision_for(const SparseMatrix& a, const CertifyOptions& options) {
  check_threshold(a.rows(), options);
  const Mat ad = symmetric_part<double>(to_eigen(oracle::from_sparse(a)));
  Eigen::SelfAdjointEigenSolver<Mat> es(ad, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  const double cond = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  return std::numeric_limits<double>::epsilon() * cond > 1e-10 ? CertifyPrecision::kQuad
                                                                : CertifyPrecision::kDouble;
}

StabilityCheck check_stability_estimate(const SparseMatrix& a, const LinearOperator& b,
                                        const ContactIndexSet& contact, double omega,
                                        double beta, std::size_t samples, std::uint64_t seed,
                                        const CertifyOptions& options) {
  const std::size_t n = a.rows();
  if (b.size() != n) throw SizeError("stability: size mismatch");
  check_threshold(n, options);
  const auto ni = static_cast<Eigen::Index>(n);
  const auto nc = static_cast<Eigen::Index>(contact.size());
  const Mat ad = symmetric_part(to_eigen(oracle::from_sparse(a)));
  const Mat bd = symmetric_part(to_eigen(oracle::assemble(b)));
  Eigen::LLT<Mat> b_llt(bd);
  if (b_llt.info() != Eigen::Success) throw NotSpdError("stability: B is not SPD");
  Mat ap(ni, nc), aw(nc, nc);
  for (Eigen::Index k = 0; k < nc; ++k)
    ap.col(k) = ad.col(static_cast<Eigen::Index>(contact.indices[static_cast<std::size_t>(k)]));
  for (Eigen::Index k = 0; k < nc; ++k)
    aw.row(k) = ap.row(static_cast<Eigen::Index>(contact.indices[static_cast<std::size_t>(k)]));
  Eigen::LLT<Mat> aw_llt(symmetric_part(aw));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  StabilityCheck out;
  for (std::size_t s = 0; s < samples; ++s) {
    Vec u(ni);
    for (Eigen::Index i = 0; i < ni; ++i) u(i) = dist(rng);
    Vec pw = Vec::Zero(ni);
    if (nc > 0) {
      const Vec w = aw_llt.solve(ap.transpose() * u);
      for (Eigen::Index k = 0; k < nc; ++k)
        pw(static_cast<Eigen::Index>(contact.indices[static_cast<std::size_t>(k)])) = w(k);
    }
    const Vec v = u - pw;
    const double lhs = 2.0 * v.dot(b_llt.solve(v)) + (2.0 + omega) * pw.dot(ad * pw);
    const double rhs = 2.0 * (beta + 2.0 + omega) * u.dot(ad * u);
    const double ratio = lhs / rhs;
    out.max_ratio = std::max(out.max_ratio, ratio);
    if (ratio > 1.0 + 1e-10) ++out.violations;
    ++out.samples;
  }
  return out;
}

}  // namespace amgf
