#pragma once

#include <memory>
#include <span>
#include <vector>

#include "amgf/dense_cholesky.hpp"
#include "amgf/linear_operator.hpp"
#include "amgf/sparse_matrix.hpp"

namespace amgf {

/// Sorted DOF ids adjacent to the contact surface (I_c). Defines the
/// embedding P as a column selection of the identity.
struct ContactIndexSet {
  std::vector<std::size_t> indices;

  std::size_t size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
};

/// Structurally nonzero columns of J, merged with `bound_indices` (DOFs
/// carrying box bounds). Empty J gives an empty set.
ContactIndexSet detect_contact_dofs(const SparseMatrix& j,
                                    std::span<const std::size_t> bound_indices = {});

/// Multiplicative AMG with filtering:
///   I - M A = (I - B A)(I - P A_w^{-1} P^T A)(I - B A),  A_w = P^T A P.
/// A_w is extracted as a principal submatrix and factorized exactly.
class FilteredPreconditioner final : public LinearOperator {
 public:
  /// Throws NotSpdError if A_w cannot be factorized.
  FilteredPreconditioner(std::shared_ptr<const SparseMatrix> a,
                         std::shared_ptr<const LinearOperator> base, ContactIndexSet contact);

  /// Re-extracts and re-factorizes A_w for a new operator with the same
  /// sparsity pattern (the extraction map is reused).
  void update(std::shared_ptr<const SparseMatrix> a, std::shared_ptr<const LinearOperator> base);

  std::size_t size() const override { return a_->rows(); }
  void apply(std::span<const double> r, std::span<double> x) const override;

  const SparseMatrix& matrix() const { return *a_; }
  const LinearOperator& base() const { return *base_; }
  const ContactIndexSet& contact() const { return contact_; }
  /// Dense row-major A_w (n_c x n_c).
  const std::vector<double>& a_w() const { return a_w_; }

 private:
  void build_extraction_map();
  void factorize();

  std::shared_ptr<const SparseMatrix> a_;
  std::shared_ptr<const LinearOperator> base_;
  ContactIndexSet contact_;
  // (position in A.values, position in dense A_w)
  std::vector<std::pair<std::size_t, std::size_t>> extraction_;
  std::size_t pattern_nnz_ = 0;
  std::vector<double> a_w_;
  DenseCholesky a_w_factor_;
};

}  // namespace amgf
