#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "amgf/fem.hpp"
#include "amgf/sparse_matrix.hpp"

namespace amgf {

/// One node-on-segment constraint with frozen normal and projection.
struct GapRow {
  std::size_t non_mortar_node = 0;
  std::size_t mortar_facet = 0;
  std::array<double, 3> normal{};       // unit, outward from the mortar body
  std::vector<std::size_t> facet_nodes;  // mortar facet nodes
  std::vector<double> weights;           // shape values at the projection; sum to 1
  double gap = 0.0;
};

struct GapOptions {
  /// Non-mortar nodes farther than this from every mortar facet are skipped.
  double search_radius = 1.0;
  /// Slack on the facet parameter range accepted by the projection.
  double projection_tolerance = 1e-10;
};

struct GapAssembly {
  SparseMatrix j;       // m x n_free
  SparseMatrix j_full;  // m x (num_nodes * dim), includes constrained DOFs
  Vector g;             // gap at the given coordinates
  std::vector<GapRow> rows;
  DiagonalMatrix ms;    // lumped non-mortar boundary measure per row
  std::size_t skipped = 0;
};

/// Gap constraints of the non-mortar nodes against the mortar facets at the
/// nodal positions `coords` (dim entries per node). Throws GeometryError on
/// a degenerate facet.
GapAssembly assemble_gap(const StructuredMesh& mesh, const DofMap& dofs,
                         std::span<const double> coords, const GapOptions& options = {});

/// Frozen-geometry gap (x_p - sum_k w_k x_k) . n at positions `coords`.
double frozen_gap(const GapRow& row, std::size_t dim, std::span<const double> coords);

}  // namespace amgf
