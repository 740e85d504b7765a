#pragma once

#include <span>

#include "amgf/linear_operator.hpp"
#include "amgf/sparse_matrix.hpp"

namespace amgf {

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
double norm_inf(std::span<const double> x);
double norm1(std::span<const double> x);

/// y += alpha x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// true when every entry is finite.
bool all_finite(std::span<const double> x);

enum class NormKind { kWeighted, kInfinity };

/// sqrt(sum r_i^2 / w_i) in weighted mode, max |r_i| in infinity mode.
/// Throws DomainError on a nonpositive weight (weighted mode only).
double weighted_norm(std::span<const double> r, const DiagonalMatrix& w,
                     NormKind kind = NormKind::kWeighted);

}  // namespace amgf
