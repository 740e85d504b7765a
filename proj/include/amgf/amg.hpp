#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "amgf/dense_cholesky.hpp"
#include "amgf/linear_operator.hpp"
#include "amgf/smoother.hpp"
#include "amgf/sparse_matrix.hpp"

namespace amgf {

struct AmgConfig {
  /// Threshold on the symmetrically scaled node-block coupling strength.
  double strength_threshold = 0.25;
  std::size_t coarsest_size = 64;
  std::size_t max_levels = 25;
  int pre_sweeps = 1;
  int post_sweeps = 1;
  /// Damping of the single Jacobi step applied to the tentative prolongation.
  double prolongation_smoothing_omega = 2.0 / 3.0;
  /// Unknowns per node on the finest level (the spatial dimension for
  /// elasticity). Coarse levels use the number of near-nullspace vectors.
  std::size_t block_size = 1;
  enum class RankDeficiency { kError, kZeroColumns };
  /// What to do when the near-nullspace restricted to an aggregate is rank
  /// deficient (e.g. two coincident contact nodes coupled only to each
  /// other cannot carry a rotation): throw SetupError, or keep zero
  /// prolongation columns as PyAMG does. Empty coarse unknowns then get a
  /// unit diagonal and stay decoupled.
  RankDeficiency rank_deficiency = RankDeficiency::kError;
};

/// Rigid body modes of a node-interleaved displacement field. `coords` holds
/// `dim` coordinates per node; the result has dim*(dim+1)/2 vectors.
std::vector<Vector> rigid_body_modes(std::size_t dim, std::span<const double> coords);

/// Smoothed-aggregation multigrid hierarchy. As a LinearOperator it applies
/// one symmetric V-cycle z = B r (forward l1-Gauss-Seidel pre-smoothing,
/// backward post-smoothing, exact coarsest solve).
class AmgHierarchy final : public LinearOperator {
 public:
  struct Level {
    std::shared_ptr<const SparseMatrix> matrix;
    SparseMatrix prolongation;  // maps level l+1 to level l; empty on the coarsest
    SparseMatrix restriction;   // prolongation^T
    std::optional<L1Smoother> smoother;
    std::size_t block_size = 1;
    std::size_t num_aggregates = 0;
  };

  /// Throws SetupError when a tentative prolongation block is rank deficient.
  static std::shared_ptr<const AmgHierarchy> setup(std::shared_ptr<const SparseMatrix> a,
                                                   std::vector<Vector> near_nullspace = {},
                                                   const AmgConfig& config = {});

  std::size_t size() const override { return levels_.front().matrix->rows(); }
  void apply(std::span<const double> r, std::span<double> z) const override;

  std::size_t num_levels() const { return levels_.size(); }
  const Level& level(std::size_t l) const { return levels_.at(l); }
  const SparseMatrix& finest_matrix() const { return *levels_.front().matrix; }
  const std::vector<Vector>& near_nullspace() const { return near_nullspace_; }
  const AmgConfig& config() const { return config_; }

  /// Sum of nonzeros over all level operators divided by the finest nnz.
  double operator_complexity() const;

 private:
  AmgHierarchy() = default;
  void cycle(std::size_t l, std::span<const double> r, std::span<double> z) const;

  AmgConfig config_;
  std::vector<Level> levels_;
  DenseCholesky coarse_solver_;
  std::vector<Vector> near_nullspace_;
};

namespace detail {

/// Node-level aggregation. Returns the aggregate id of each node, or -1 for
/// nodes without off-diagonal couplings (left to the smoother).
std::vector<long> aggregate_nodes(const SparseMatrix& a, std::size_t block_size,
                                  double threshold, std::size_t min_nodes);

}  // namespace detail

}  // namespace amgf
