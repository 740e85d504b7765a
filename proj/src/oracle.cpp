#include "amgf/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "amgf/error.hpp"

namespace amgf::oracle {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

Mat to_eigen(const DenseMatrix& a) {
  Mat m(a.rows, a.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) m(i, j) = a(i, j);
  return m;
}

std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

void require_symmetric(const Mat& a, const char* what) {
  if (a.rows() != a.cols()) throw SizeError(std::string(what) + ": matrix not square");
  const double scale = std::max(1e-300, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw DomainError(std::string(what) + ": matrix is not symmetric");
}

}  // namespace

DenseMatrix from_sparse(const SparseMatrix& a) {
  DenseMatrix d(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto cols = a.row_columns(i);
    auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) d(i, cols[k]) += vals[k];
  }
  return d;
}

DenseMatrix assemble(const LinearOperator& op) {
  const std::size_t n = op.size();
  DenseMatrix d(n, n);
  std::vector<double> e(n, 0.0), y(n);
  for (std::size_t k = 0; k < n; ++k) {
    e[k] = 1.0;
    op.apply(e, y);
    e[k] = 0.0;
    for (std::size_t i = 0; i < n; ++i) d(i, k) = y[i];
  }
  return d;
}

SymmetricEigen dense_sym_eig(const DenseMatrix& a) {
  Mat m = to_eigen(a);
  require_symmetric(m, "dense_sym_eig");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
  if (es.info() != Eigen::Success) throw DomainError("dense_sym_eig: no convergence");
  SymmetricEigen out;
  out.values = to_std(es.eigenvalues());
  out.vectors = DenseMatrix(a.rows, a.cols);
  const Mat& v = es.eigenvectors();
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < a.cols; ++j) out.vectors(i, j) = v(i, j);
  return out;
}

std::vector<double> dense_generalized_eig(const DenseMatrix& a, const DenseMatrix& b) {
  Mat ma = to_eigen(a), mb = to_eigen(b);
  require_symmetric(ma, "dense_generalized_eig");
  require_symmetric(mb, "dense_generalized_eig");
  if (ma.rows() != mb.rows()) throw SizeError("dense_generalized_eig: size mismatch");
  Eigen::LLT<Mat> llt(0.5 * (mb + mb.transpose()));
  if (llt.info() != Eigen::Success) throw NotSpdError("dense_generalized_eig: B is not SPD");
  // L^{-1} A L^{-T}
  const Mat l = llt.matrixL();
  Mat c = l.triangularView<Eigen::Lower>().solve(ma);
  c = l.triangularView<Eigen::Lower>().solve(c.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (c + c.transpose()), Eigen::EigenvaluesOnly);
  return to_std(es.eigenvalues());
}

std::vector<double> dense_product_eig(const DenseMatrix& m, const DenseMatrix& a) {
  Mat mm = to_eigen(m), ma = to_eigen(a);
  require_symmetric(ma, "dense_product_eig");
  Eigen::LLT<Mat> llt(0.5 * (ma + ma.transpose()));
  if (llt.info() != Eigen::Success) throw NotSpdError("dense_product_eig: A is not SPD");
  // eig(M A) = eig(L^T M L)
  const Mat l = llt.matrixL();
  Mat c = l.transpose() * (0.5 * (mm + mm.transpose())) * l;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (c + c.transpose()), Eigen::EigenvaluesOnly);
  return to_std(es.eigenvalues());
}

QpSolution qp_reference_solve(const DenseMatrix& k, const std::vector<double>& f,
                              const DenseMatrix& j, const std::vector<double>& g_ref,
                              const std::vector<double>& u_ref) {
  const std::size_t n = k.rows;
  const std::size_t m = j.rows;
  if (k.cols != n || f.size() != n || u_ref.size() != n || g_ref.size() != m ||
      (m > 0 && j.cols != n))
    throw SizeError("qp_reference_solve: dimension mismatch");
  if (m > 20) throw DomainError("qp_reference_solve: enumeration limited to m <= 20");
  const Mat mk = to_eigen(k);
  const Mat mj = m > 0 ? to_eigen(j) : Mat(0, static_cast<Eigen::Index>(n));
  const Vec vf = Eigen::Map<const Vec>(f.data(), static_cast<Eigen::Index>(n));
  const Vec vg = Eigen::Map<const Vec>(g_ref.data(), static_cast<Eigen::Index>(m));
  const Vec vu = Eigen::Map<const Vec>(u_ref.data(), static_cast<Eigen::Index>(n));
  // c(w) = J w + (g_ref - J u_ref)
  const Vec c0 = vg - mj * vu;

  QpSolution best;
  best.objective = std::numeric_limits<double>::infinity();
  const double scale = std::max(1.0, mk.cwiseAbs().maxCoeff());
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    std::vector<Eigen::Index> act;
    for (std::size_t i = 0; i < m; ++i)
      if (mask >> i & 1) act.push_back(static_cast<Eigen::Index>(i));
    const auto na = static_cast<Eigen::Index>(act.size());
    const auto nn = static_cast<Eigen::Index>(n);
    // [K  -J_S^T] [w  ]   [f      ]
    // [J_S  0   ] [lam] = [-c0_S  ]
    Mat kkt = Mat::Zero(nn + na, nn + na);
    Vec rhs = Vec::Zero(nn + na);
    kkt.topLeftCorner(nn, nn) = mk;
    rhs.head(nn) = vf;
    for (Eigen::Index a = 0; a < na; ++a) {
      kkt.block(0, nn + a, nn, 1) = -mj.row(act[static_cast<std::size_t>(a)]).transpose();
      kkt.block(nn + a, 0, 1, nn) = mj.row(act[static_cast<std::size_t>(a)]);
      rhs(nn + a) = -c0(act[static_cast<std::size_t>(a)]);
    }
    Eigen::FullPivLU<Mat> lu(kkt);
    if (lu.rank() < nn + na) continue;
    const Vec sol = lu.solve(rhs);
    if ((kkt * sol - rhs).cwiseAbs().maxCoeff() > 1e-9 * scale * std::max(1.0, sol.cwiseAbs().maxCoeff()))
      continue;
    const Vec w = sol.head(nn);
    const Vec c = mj * w + c0;
    bool ok = true;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(m); ++i)
      if (c(i) < -1e-10 * std::max(1.0, c0.cwiseAbs().maxCoeff())) ok = false;
    for (Eigen::Index a = 0; a < na; ++a)
      if (sol(nn + a) < -1e-10) ok = false;
    if (!ok) continue;
    const double obj = 0.5 * w.dot(mk * w) - vf.dot(w);
    if (obj < best.objective) {
      best.feasible = true;
      best.objective = obj;
      best.u = to_std(w);
      best.lambda.assign(m, 0.0);
      best.active.assign(m, false);
      for (Eigen::Index a = 0; a < na; ++a) {
        best.lambda[static_cast<std::size_t>(act[static_cast<std::size_t>(a)])] =
            std::max(0.0, sol(nn + a));
        best.active[static_cast<std::size_t>(act[static_cast<std::size_t>(a)])] = true;
      }
    }
  }
  return best;
}

}  // namespace amgf::oracle
