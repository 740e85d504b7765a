#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "amgf/linear_operator.hpp"
#include "amgf/sparse_matrix.hpp"

namespace amgf {

/// Isotropic linear elastic material.
struct Material {
  double youngs_modulus = 1.0;
  double poisson_ratio = 0.0;

  /// Throws DomainError unless E > 0 and 0 <= nu < 0.5.
  void validate() const;
  double lame_lambda() const;
  double lame_mu() const;
};

/// Bilinear quadrilateral (2D) or trilinear hexahedral (3D) mesh made of
/// structured blocks. Bodies do not share nodes.
struct StructuredMesh {
  std::size_t dim = 2;
  std::vector<double> coords;  // dim entries per node
  std::size_t nodes_per_element = 4;
  std::vector<std::size_t> connectivity;  // nodes_per_element entries per element
  std::vector<std::size_t> element_body;
  std::size_t num_bodies = 0;
  /// Sorted node ids: "dirichlet_bottom", "dirichlet_top", "mortar", "non_mortar".
  std::map<std::string, std::vector<std::size_t>> node_sets;
  /// Boundary facets (2 nodes in 2D, 4 in 3D) ordered so that the facet
  /// normal points out of the body.
  std::size_t nodes_per_facet = 2;
  std::vector<std::size_t> mortar_facets;
  std::vector<std::size_t> non_mortar_facets;

  std::size_t num_nodes() const { return coords.size() / dim; }
  std::size_t num_elements() const { return element_body.size(); }
  std::span<const double> node(std::size_t i) const { return {coords.data() + i * dim, dim}; }
  std::span<const std::size_t> element(std::size_t e) const {
    return {connectivity.data() + e * nodes_per_element, nodes_per_element};
  }
  const std::vector<std::size_t>& node_set(const std::string& name) const;
};

/// Mesh, materials and the displacement schedule of the driven boundary.
struct ContactSetup {
  StructuredMesh mesh;
  std::vector<Material> materials;  // per body
  /// Displacement of the driven ("dirichlet_top") nodes at the final time.
  std::vector<double> bc_value;
  /// Optional explicit per-step displacement (step i uses bc_schedule[i-1]).
  /// When empty, step i of m uses (i/m) bc_value.
  std::vector<std::vector<double>> bc_schedule;

  /// Driven displacement at step i of m (step 0 is zero).
  std::vector<double> bc_at(std::size_t step, std::size_t steps) const;
};

/// Two-block problem: a stiff small block pressed into a soft large block.
/// 2D: large [0,2]x[0,1] with (8x4)*2^r elements, small [0.5,1.5]x[1,2]
/// with (4x4)*2^r. 3D: large [0,2]^2x[0,1] with (4x4x2)*2^r, small
/// [0.5,1.5]^2x[1,2] with (2x2x2)*2^r. Default materials: small E=1000,
/// nu=0; large E=1, nu=0.499. Body 0 is the large block.
ContactSetup build_two_block(std::size_t dim, std::size_t refinement,
                             std::vector<Material> materials = {},
                             std::vector<double> bc_value = {});

/// Ironing problem: a die with a circular-arc bottom on a slab. The slab
/// top is the mortar surface; the die bottom the non-mortar surface. The
/// schedule pushes the die down over 3 steps, then slides it over 7.
ContactSetup build_ironing(std::size_t dim, std::size_t refinement,
                           std::vector<Material> materials = {});

/// Ironing boundary displacement at step i (0..10).
std::vector<double> ironing_bc(std::size_t dim, std::size_t step);

/// Maps mesh nodes to free DOFs. Constrained nodes are eliminated whole;
/// free DOFs are node-interleaved: dof = free_node * dim + component.
struct DofMap {
  std::size_t dim = 2;
  std::vector<long> node_to_free;  // -1 for constrained nodes
  std::vector<std::size_t> free_nodes;

  std::size_t num_free_dofs() const { return free_nodes.size() * dim; }
  long dof(std::size_t node, std::size_t component) const {
    const long f = node_to_free[node];
    return f < 0 ? -1 : f * static_cast<long>(dim) + static_cast<long>(component);
  }
};

DofMap make_dof_map(const StructuredMesh& mesh, std::span<const std::size_t> constrained_nodes);

/// Element stiffness (row-major, node-interleaved). Throws GeometryError
/// with the element id when a Jacobian determinant is not positive.
std::vector<double> element_stiffness(const StructuredMesh& mesh, std::size_t element,
                                      const Material& material);

/// Full stiffness over all nodes (before Dirichlet elimination).
SparseMatrix assemble_stiffness(const StructuredMesh& mesh, const std::vector<Material>& materials);

/// Linear elasticity with Dirichlet nodes eliminated symmetrically.
struct ElasticSystem {
  DofMap dofs;
  std::shared_ptr<const SparseMatrix> k;  // free x free, SPD
  SparseMatrix k_full;                    // all nodes, used for the lift
  DiagonalMatrix mass;                    // lumped mass on free DOFs
  std::vector<std::size_t> constrained_nodes;

  /// f = -K_FD u_D for a full nodal displacement field whose constrained
  /// entries hold the prescribed values.
  Vector load(std::span<const double> full_displacement) const;
  /// Full nodal field: free entries from u, constrained from `prescribed`.
  Vector expand(std::span<const double> u, std::span<const double> prescribed) const;
  /// Prescribed nodal field for a driven displacement (other BCs are zero).
  Vector prescribed_field(const StructuredMesh& mesh, std::span<const double> driven) const;
};

ElasticSystem assemble_elasticity(const ContactSetup& setup);

/// Lumped nodal mass (density 1) over all nodes and components.
Vector lumped_mass(const StructuredMesh& mesh);

/// Rigid body modes of the free DOFs at the reference coordinates.
std::vector<Vector> free_rigid_body_modes(const StructuredMesh& mesh, const DofMap& dofs);

}  // namespace amgf
