#include "amgf/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "amgf/error.hpp"

namespace amgf {

void IdentityOperator::apply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != n_ || y.size() != n_) throw SizeError("identity: size mismatch");
  std::copy(x.begin(), x.end(), y.begin());
}

double DiagonalMatrix::condition() const {
  if (entries_.empty()) return 1.0;
  auto [lo, hi] = std::minmax_element(entries_.begin(), entries_.end());
  if (*lo <= 0.0) throw DomainError("diagonal condition: nonpositive entry");
  return *hi / *lo;
}

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols,
                           std::vector<std::size_t> row_offsets,
                           std::vector<std::size_t> col_indices, Vector values)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  if (row_offsets_.size() != rows_ + 1) throw SizeError("csr: row_offsets length != rows + 1");
  if (row_offsets_.front() != 0) throw SizeError("csr: row_offsets[0] != 0");
  if (row_offsets_.back() != values_.size() || col_indices_.size() != values_.size())
    throw SizeError("csr: row_offsets[rows] != nnz");
  for (std::size_t i = 0; i < rows_; ++i) {
    if (row_offsets_[i] > row_offsets_[i + 1]) throw SizeError("csr: row_offsets decreasing");
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      if (col_indices_[k] >= cols_)
        throw SizeError("csr: column index out of range in row " + std::to_string(i));
      if (k > row_offsets_[i] && col_indices_[k] <= col_indices_[k - 1])
        throw SizeError("csr: column indices not strictly increasing in row " +
                        std::to_string(i));
    }
  }
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
  Vector ones(n, 1.0);
  return diagonal(ones);
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> entries) {
  const std::size_t n = entries.size();
  std::vector<std::size_t> offsets(n + 1);
  std::vector<std::size_t> cols(n);
  std::iota(offsets.begin(), offsets.end(), std::size_t{0});
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  return SparseMatrix(n, n, std::move(offsets), std::move(cols),
                      Vector(entries.begin(), entries.end()));
}

SparseMatrix SparseMatrix::zeros(std::size_t rows, std::size_t cols) {
  return SparseMatrix(rows, cols, std::vector<std::size_t>(rows + 1, 0), {}, {});
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  auto cols = row_columns(i);
  auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return values_[row_offsets_[i] + static_cast<std::size_t>(it - cols.begin())];
}

void SparseMatrix::multiply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != cols_ || y.size() != rows_) throw SizeError("spmv: size mismatch");
  for (std::size_t i = 0; i < rows_; ++i) {
    double sum = 0.0;
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
      sum += values_[k] * x[col_indices_[k]];
    y[i] = sum;
  }
}

void SparseMatrix::multiply_transpose(std::span<const double> x, std::span<double> y) const {
  if (x.size() != rows_ || y.size() != cols_) throw SizeError("spmv^T: size mismatch");
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t i = 0; i < rows_; ++i) {
    const double xi = x[i];
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k)
      y[col_indices_[k]] += values_[k] * xi;
  }
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<std::size_t> offsets(cols_ + 1, 0);
  for (std::size_t c : col_indices_) ++offsets[c + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<std::size_t> cols(nnz());
  Vector vals(nnz());
  std::vector<std::size_t> next(offsets.begin(), offsets.end() - 1);
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      const std::size_t dst = next[col_indices_[k]]++;
      cols[dst] = i;
      vals[dst] = values_[k];
    }
  }
  return SparseMatrix(cols_, rows_, std::move(offsets), std::move(cols), std::move(vals));
}

Vector SparseMatrix::diagonal_entries() const {
  Vector d(std::min(rows_, cols_), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = at(i, i);
  return d;
}

bool SparseMatrix::is_symmetric(double tol) const {
  if (rows_ != cols_) return false;
  for (std::size_t i = 0; i < rows_; ++i) {
    for (std::size_t k = row_offsets_[i]; k < row_offsets_[i + 1]; ++k) {
      const double aij = values_[k];
      const double aji = at(col_indices_[k], i);
      if (std::abs(aij - aji) > tol * std::max(1.0, std::abs(aij))) return false;
    }
  }
  return true;
}

double SparseMatrix::norm_inf() const {
  double best = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) {
    double sum = 0.0;
    for (double v : row_values(i)) sum += std::abs(v);
    best = std::max(best, sum);
  }
  return best;
}

std::vector<std::size_t> SparseMatrix::nonzero_columns() const {
  std::vector<char> used(cols_, 0);
  for (std::size_t c : col_indices_) used[c] = 1;
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < cols_; ++j)
    if (used[j]) out.push_back(j);
  return out;
}

void TripletAssembler::add(std::size_t i, std::size_t j, double value) {
  if (i >= rows_ || j >= cols_) throw SizeError("assembler: index out of range");
  entries_.push_back({i, j, value});
}

SparseMatrix TripletAssembler::finalize() const {
  std::vector<std::size_t> order(entries_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Stable so that duplicates are summed in insertion order.
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ea = entries_[a];
    const auto& eb = entries_[b];
    return ea.row != eb.row ? ea.row < eb.row : ea.col < eb.col;
  });
  std::vector<std::size_t> offsets(rows_ + 1, 0);
  std::vector<std::size_t> cols;
  Vector vals;
  cols.reserve(entries_.size());
  vals.reserve(entries_.size());
  std::size_t last_row = rows_, last_col = cols_;
  for (std::size_t idx : order) {
    const auto& e = entries_[idx];
    if (e.row == last_row && e.col == last_col) {
      vals.back() += e.value;
      continue;
    }
    cols.push_back(e.col);
    vals.push_back(e.value);
    ++offsets[e.row + 1];
    last_row = e.row;
    last_col = e.col;
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  return SparseMatrix(rows_, cols_, std::move(offsets), std::move(cols), std::move(vals));
}

Vector spmv(const SparseMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw SizeError("spmv: matrix has " + std::to_string(a.cols()) +
                                            " columns but x has " + std::to_string(x.size()));
  Vector y(a.rows());
  a.multiply(x, y);
  return y;
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols() != b.rows()) throw SizeError("multiply: inner dimension mismatch");
  const std::size_t n = a.rows(), m = b.cols();
  std::vector<std::size_t> offsets(n + 1, 0);
  std::vector<std::size_t> cols;
  Vector vals;
  // Dense accumulator with marker (Gustavson).
  Vector acc(m, 0.0);
  std::vector<std::size_t> marker(m, static_cast<std::size_t>(-1));
  std::vector<std::size_t> row_cols;
  for (std::size_t i = 0; i < n; ++i) {
    row_cols.clear();
    auto acols = a.row_columns(i);
    auto avals = a.row_values(i);
    for (std::size_t ka = 0; ka < acols.size(); ++ka) {
      const std::size_t k = acols[ka];
      const double aik = avals[ka];
      auto bcols = b.row_columns(k);
      auto bvals = b.row_values(k);
      for (std::size_t kb = 0; kb < bcols.size(); ++kb) {
        const std::size_t j = bcols[kb];
        if (marker[j] != i) {
          marker[j] = i;
          acc[j] = 0.0;
          row_cols.push_back(j);
        }
        acc[j] += aik * bvals[kb];
      }
    }
    std::sort(row_cols.begin(), row_cols.end());
    for (std::size_t j : row_cols) {
      cols.push_back(j);
      vals.push_back(acc[j]);
    }
    offsets[i + 1] = cols.size();
  }
  return SparseMatrix(n, m, std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix add(const SparseMatrix& a, const SparseMatrix& b, double alpha, double beta) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw SizeError("add: shape mismatch");
  std::vector<std::size_t> offsets(a.rows() + 1, 0);
  std::vector<std::size_t> cols;
  Vector vals;
  cols.reserve(a.nnz() + b.nnz());
  vals.reserve(a.nnz() + b.nnz());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ac = a.row_columns(i), bc = b.row_columns(i);
    auto av = a.row_values(i), bv = b.row_values(i);
    std::size_t p = 0, q = 0;
    while (p < ac.size() || q < bc.size()) {
      if (q == bc.size() || (p < ac.size() && ac[p] < bc[q])) {
        cols.push_back(ac[p]);
        vals.push_back(alpha * av[p]);
        ++p;
      } else if (p == ac.size() || bc[q] < ac[p]) {
        cols.push_back(bc[q]);
        vals.push_back(beta * bv[q]);
        ++q;
      } else {
        cols.push_back(ac[p]);
        vals.push_back(alpha * av[p] + beta * bv[q]);
        ++p;
        ++q;
      }
    }
    offsets[i + 1] = cols.size();
  }
  return SparseMatrix(a.rows(), a.cols(), std::move(offsets), std::move(cols), std::move(vals));
}

SparseMatrix add_diagonal(const SparseMatrix& a, std::span<const double> d) {
  if (a.rows() != a.cols() || d.size() != a.rows()) throw SizeError("add_diagonal: size mismatch");
  return add(a, SparseMatrix::diagonal(d));
}

SparseMatrix triple_product(const SparseMatrix& j, const DiagonalMatrix& d) {
  if (d.size() != j.rows())
    throw SizeError("triple_product: D has " + std::to_string(d.size()) + " entries but J has " +
                    std::to_string(j.rows()) + " rows");
  const std::size_t n = j.cols();
  // Sum of rank-one row contributions d_r * J_r^T J_r. Each product term
  // enters (a, b) and (b, a) identically, so the result is exactly symmetric.
  TripletAssembler asm_(n, n);
  for (std::size_t r = 0; r < j.rows(); ++r) {
    auto cols = j.row_columns(r);
    auto vals = j.row_values(r);
    for (std::size_t p = 0; p < cols.size(); ++p)
      for (std::size_t q = 0; q < cols.size(); ++q)
        asm_.add(cols[p], cols[q], d[r] * vals[p] * vals[q]);
  }
  return asm_.finalize();
}

SparseMatrix galerkin_product(const SparseMatrix& p, const SparseMatrix& a) {
  if (a.rows() != a.cols() || p.rows() != a.rows()) throw SizeError("galerkin: shape mismatch");
  SparseMatrix pt = p.transpose();
  SparseMatrix c = multiply(pt, multiply(a, p));
  SparseMatrix ct = c.transpose();
  return add(c, ct, 0.5, 0.5);
}

SparseMatrix submatrix(const SparseMatrix& a, std::span<const std::size_t> rows,
                       std::span<const std::size_t> cols) {
  std::vector<std::size_t> col_map(a.cols(), static_cast<std::size_t>(-1));
  for (std::size_t k = 0; k < cols.size(); ++k) {
    if (cols[k] >= a.cols() || (k > 0 && cols[k] <= cols[k - 1]))
      throw SizeError("submatrix: column index set must be increasing and in range");
    col_map[cols[k]] = k;
  }
  std::vector<std::size_t> offsets(rows.size() + 1, 0);
  std::vector<std::size_t> out_cols;
  Vector out_vals;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= a.rows() || (r > 0 && rows[r] <= rows[r - 1]))
      throw SizeError("submatrix: row index set must be increasing and in range");
    auto rc = a.row_columns(rows[r]);
    auto rv = a.row_values(rows[r]);
    for (std::size_t k = 0; k < rc.size(); ++k) {
      const std::size_t mapped = col_map[rc[k]];
      if (mapped == static_cast<std::size_t>(-1)) continue;
      out_cols.push_back(mapped);
      out_vals.push_back(rv[k]);
    }
    offsets[r + 1] = out_cols.size();
  }
  return SparseMatrix(rows.size(), cols.size(), std::move(offsets), std::move(out_cols),
                      std::move(out_vals));
}

SparseMatrix principal_submatrix(const SparseMatrix& a, std::span<const std::size_t> idx) {
  return submatrix(a, idx, idx);
}

std::vector<double> to_dense(const SparseMatrix& a) {
  std::vector<double> out(a.rows() * a.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto c = a.row_columns(i);
    auto v = a.row_values(i);
    for (std::size_t k = 0; k < c.size(); ++k) out[i * a.cols() + c[k]] = v[k];
  }
  return out;
}

}  // namespace amgf
