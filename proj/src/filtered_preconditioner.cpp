#include "amgf/filtered_preconditioner.hpp"

#include <algorithm>

#include "amgf/error.hpp"

namespace amgf {

ContactIndexSet detect_contact_dofs(const SparseMatrix& j,
                                    std::span<const std::size_t> bound_indices) {
  std::vector<std::size_t> idx = j.nonzero_columns();
  idx.insert(idx.end(), bound_indices.begin(), bound_indices.end());
  std::sort(idx.begin(), idx.end());
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return {std::move(idx)};
}

FilteredPreconditioner::FilteredPreconditioner(std::shared_ptr<const SparseMatrix> a,
                                               std::shared_ptr<const LinearOperator> base,
                                               ContactIndexSet contact)
    : a_(std::move(a)), base_(std::move(base)), contact_(std::move(contact)) {
  if (!a_ || a_->rows() != a_->cols()) throw SizeError("amgf: operator must be square");
  if (!base_ || base_->size() != a_->rows()) throw SizeError("amgf: base preconditioner size");
  const auto& idx = contact_.indices;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] >= a_->rows()) throw SizeError("amgf: contact index out of range");
    if (k > 0 && idx[k] <= idx[k - 1])
      throw DomainError("amgf: contact indices must be strictly increasing");
  }
  build_extraction_map();
  factorize();
}

void FilteredPreconditioner::build_extraction_map() {
  const std::size_t n = a_->rows();
  const std::size_t nc = contact_.size();
  std::vector<long> local(n, -1);
  for (std::size_t k = 0; k < nc; ++k) local[contact_.indices[k]] = static_cast<long>(k);
  extraction_.clear();
  const auto offsets = a_->row_offsets();
  const auto cols = a_->col_indices();
  for (std::size_t k = 0; k < nc; ++k) {
    const std::size_t i = contact_.indices[k];
    for (std::size_t q = offsets[i]; q < offsets[i + 1]; ++q) {
      const long c = local[cols[q]];
      if (c >= 0) extraction_.push_back({q, k * nc + static_cast<std::size_t>(c)});
    }
  }
  pattern_nnz_ = a_->nnz();
}

void FilteredPreconditioner::factorize() {
  const std::size_t nc = contact_.size();
  a_w_.assign(nc * nc, 0.0);
  const auto vals = a_->values();
  for (auto [src, dst] : extraction_) a_w_[dst] = vals[src];
  if (nc == 0) {
    a_w_factor_ = DenseCholesky();
    return;
  }
  try {
    a_w_factor_ = DenseCholesky(nc, a_w_);
  } catch (const NotSpdError& e) {
    throw NotSpdError(std::string("amgf: contact block A_w is not SPD (") + e.what() + ")");
  }
}

void FilteredPreconditioner::update(std::shared_ptr<const SparseMatrix> a,
                                    std::shared_ptr<const LinearOperator> base) {
  if (!a || a->rows() != a_->rows()) throw SizeError("amgf: update size mismatch");
  if (!base || base->size() != a->rows()) throw SizeError("amgf: base preconditioner size");
  const bool same_pattern = a->nnz() == pattern_nnz_;
  a_ = std::move(a);
  base_ = std::move(base);
  if (!same_pattern) build_extraction_map();
  factorize();
}

void FilteredPreconditioner::apply(std::span<const double> r, std::span<double> x) const {
  const std::size_t n = a_->rows();
  if (r.size() != n || x.size() != n) throw SizeError("amgf: size mismatch");
  Vector x1(n), ax(n), res(n);
  // x1 = B r
  base_->apply(r, x1);
  // r1 = r - A x1
  a_->multiply(x1, ax);
  for (std::size_t i = 0; i < n; ++i) res[i] = r[i] - ax[i];
  // x2 = x1 + P A_w^{-1} P^T r1
  const std::size_t nc = contact_.size();
  if (nc > 0) {
    Vector w(nc);
    for (std::size_t k = 0; k < nc; ++k) w[k] = res[contact_.indices[k]];
    a_w_factor_.solve_in_place(w);
    for (std::size_t k = 0; k < nc; ++k) x1[contact_.indices[k]] += w[k];
    a_->multiply(x1, ax);
    for (std::size_t i = 0; i < n; ++i) res[i] = r[i] - ax[i];
  }
  // x = x2 + B r2
  base_->apply(res, x);
  for (std::size_t i = 0; i < n; ++i) x[i] += x1[i];
}

}  // namespace amgf
