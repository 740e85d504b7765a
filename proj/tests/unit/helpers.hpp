// Shared fixtures for the unit tests. Dense references go through Eigen so
// they do not reuse library kernels.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <random>
#include <vector>

#include "amgf/filtered_preconditioner.hpp"
#include "amgf/linear_operator.hpp"
#include "amgf/sparse_matrix.hpp"

namespace testing {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd dense(const amgf::SparseMatrix& a) {
  MatrixXd d = MatrixXd::Zero(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto cols = a.row_columns(i);
    const auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) d(i, cols[k]) = vals[k];
  }
  return d;
}

inline MatrixXd dense(const amgf::LinearOperator& op) {
  const std::size_t n = op.size();
  MatrixXd d(n, n);
  amgf::Vector e(n, 0.0), y(n);
  for (std::size_t k = 0; k < n; ++k) {
    e[k] = 1.0;
    op.apply(e, y);
    e[k] = 0.0;
    for (std::size_t i = 0; i < n; ++i) d(i, k) = y[i];
  }
  return d;
}

inline VectorXd to_eigen(const amgf::Vector& v) {
  return Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Weighted graph Laplacian (path plus random edges) plus a positive diagonal.
inline amgf::SparseMatrix random_spd(std::size_t n, double density, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  amgf::TripletAssembler t(n, n);
  amgf::Vector diag(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (j != i + 1 && u(rng) > density) continue;
      const double w = 0.1 + u(rng);
      t.add(i, j, -w);
      t.add(j, i, -w);
      diag[i] += w;
      diag[j] += w;
    }
  for (std::size_t i = 0; i < n; ++i) t.add(i, i, diag[i] + 0.01 + 0.1 * u(rng));
  return t.finalize();
}

inline amgf::SparseMatrix laplacian_1d(std::size_t n) {
  amgf::TripletAssembler t(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    t.add(i, i, 2.0);
    if (i > 0) t.add(i, i - 1, -1.0);
    if (i + 1 < n) t.add(i, i + 1, -1.0);
  }
  return t.finalize();
}

inline amgf::Vector random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  amgf::Vector v(n);
  for (auto& x : v) x = g(rng);
  return v;
}

inline amgf::ContactIndexSet random_subset(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(k);
  std::sort(all.begin(), all.end());
  return {all};
}

/// Eigenvalues of M A for symmetric M and SPD A, via L^T M L.
inline VectorXd product_eigenvalues(const MatrixXd& m, const MatrixXd& a) {
  const MatrixXd l = a.llt().matrixL();
  const MatrixXd t = l.transpose() * m * l;
  return Eigen::SelfAdjointEigenSolver<MatrixXd>(0.5 * (t + t.transpose()), Eigen::EigenvaluesOnly)
      .eigenvalues();
}

}  // namespace testing
