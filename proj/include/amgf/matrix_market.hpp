#pragma once

#include <iosfwd>
#include <string>

#include "amgf/sparse_matrix.hpp"

namespace amgf {

enum class MatrixMarketSymmetry { kGeneral, kSymmetric };

/// Reads a `matrix coordinate real general|symmetric` file. Symmetric files
/// store one triangle and are expanded to full storage. Indices are 1-based.
SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix read_matrix_market(const std::string& path);

/// Writes all stored entries (general) or the lower triangle (symmetric)
/// with 17 significant digits so that reading back reproduces A exactly.
void write_matrix_market(std::ostream& out, const SparseMatrix& a,
                         MatrixMarketSymmetry symmetry = MatrixMarketSymmetry::kGeneral);
void write_matrix_market(const std::string& path, const SparseMatrix& a,
                         MatrixMarketSymmetry symmetry = MatrixMarketSymmetry::kGeneral);

}  // namespace amgf
