#pragma once

#include <cstddef>
#include <vector>

#include "amgf/linear_operator.hpp"
#include "amgf/sparse_matrix.hpp"

// Dense brute-force references. Backed by Eigen and deliberately independent
// of the library's own kernels (only SparseMatrix is shared, for I/O).
namespace amgf::oracle {

struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return values[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

DenseMatrix from_sparse(const SparseMatrix& a);

/// Column k is op(e_k).
DenseMatrix assemble(const LinearOperator& op);

struct SymmetricEigen {
  std::vector<double> values;  // ascending
  DenseMatrix vectors;         // column j belongs to values[j]
};

/// Symmetric eigendecomposition. Throws DomainError on asymmetric input
/// (|a_ij - a_ji| > 1e-10 max|a|).
SymmetricEigen dense_sym_eig(const DenseMatrix& a);

/// Eigenvalues of B^{-1} A (ascending), B SPD. Throws NotSpdError otherwise.
std::vector<double> dense_generalized_eig(const DenseMatrix& a, const DenseMatrix& b);

/// Eigenvalues of M A (ascending) for symmetric M and SPD A.
std::vector<double> dense_product_eig(const DenseMatrix& m, const DenseMatrix& a);

struct QpSolution {
  bool feasible = false;
  std::vector<double> u;
  std::vector<double> lambda;
  double objective = 0.0;
  std::vector<bool> active;
};

/// Exact solution of
///   min 1/2 w^T K w - f^T w   s.t.  J (w - u_ref) + g_ref >= 0
/// by enumeration of active sets (m <= 20). lambda >= 0 are the multipliers
/// of the constraints.
QpSolution qp_reference_solve(const DenseMatrix& k, const std::vector<double>& f,
                              const DenseMatrix& j, const std::vector<double>& g_ref,
                              const std::vector<double>& u_ref);

}  // namespace amgf::oracle
