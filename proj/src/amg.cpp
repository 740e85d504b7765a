#include "amgf/amg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "amgf/error.hpp"
#include "amgf/vector_ops.hpp"

namespace amgf {

std::vector<Vector> rigid_body_modes(std::size_t dim, std::span<const double> coords) {
  if (dim != 2 && dim != 3) throw DomainError("rigid_body_modes: dim must be 2 or 3");
  if (coords.size() % dim != 0) throw SizeError("rigid_body_modes: coords not a multiple of dim");
  const std::size_t nodes = coords.size() / dim;
  const std::size_t n = nodes * dim;
  std::vector<Vector> modes;
  for (std::size_t c = 0; c < dim; ++c) {
    Vector t(n, 0.0);
    for (std::size_t p = 0; p < nodes; ++p) t[p * dim + c] = 1.0;
    modes.push_back(std::move(t));
  }
  if (dim == 2) {
    Vector r(n, 0.0);
    for (std::size_t p = 0; p < nodes; ++p) {
      r[p * 2 + 0] = -coords[p * 2 + 1];
      r[p * 2 + 1] = coords[p * 2 + 0];
    }
    modes.push_back(std::move(r));
  } else {
    // Rotations about x, y, z.
    const std::size_t axes[3][2] = {{1, 2}, {2, 0}, {0, 1}};
    for (const auto& ax : axes) {
      Vector r(n, 0.0);
      for (std::size_t p = 0; p < nodes; ++p) {
        r[p * 3 + ax[0]] = -coords[p * 3 + ax[1]];
        r[p * 3 + ax[1]] = coords[p * 3 + ax[0]];
      }
      modes.push_back(std::move(r));
    }
  }
  return modes;
}

namespace detail {

std::vector<long> aggregate_nodes(const SparseMatrix& a, std::size_t block_size,
                                  double threshold, std::size_t min_nodes) {
  const std::size_t bs = block_size;
  const std::size_t nodes = a.rows() / bs;

  // Node coupling strengths: Frobenius norms of the bs x bs blocks.
  TripletAssembler blocks(nodes, nodes);
  blocks.reserve(a.nnz());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto cols = a.row_columns(i);
    auto vals = a.row_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k)
      blocks.add(i / bs, cols[k] / bs, vals[k] * vals[k]);
  }
  const SparseMatrix s = blocks.finalize();
  Vector diag(nodes, 0.0);
  for (std::size_t p = 0; p < nodes; ++p) diag[p] = std::sqrt(s.at(p, p));

  // strong[p] lists (neighbor, scaled strength); any[p] all off-diagonal couplings.
  std::vector<std::vector<std::pair<std::size_t, double>>> strong(nodes), any(nodes);
  for (std::size_t p = 0; p < nodes; ++p) {
    auto cols = s.row_columns(p);
    auto vals = s.row_values(p);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const std::size_t q = cols[k];
      if (q == p) continue;
      const double norm = std::sqrt(vals[k]);
      if (norm == 0.0) continue;
      const double scaled = norm / std::sqrt(diag[p] * diag[q]);
      any[p].push_back({q, scaled});
      if (scaled > threshold) strong[p].push_back({q, scaled});
    }
  }

  std::vector<long> agg(nodes, -1);
  long next = 0;
  // Phase 1: roots whose strong neighborhood is entirely free.
  for (std::size_t p = 0; p < nodes; ++p) {
    if (agg[p] != -1 || strong[p].empty()) continue;
    bool free = true;
    for (auto [q, w] : strong[p])
      if (agg[q] != -1) {
        free = false;
        break;
      }
    if (!free) continue;
    agg[p] = next;
    for (auto [q, w] : strong[p]) agg[q] = next;
    ++next;
  }
  // Phase 2: attach to the most strongly coupled phase-1 aggregate.
  std::vector<long> phase1 = agg;
  for (std::size_t p = 0; p < nodes; ++p) {
    if (agg[p] != -1) continue;
    double best = -1.0;
    for (auto [q, w] : strong[p])
      if (phase1[q] != -1 && w > best) {
        best = w;
        agg[p] = phase1[q];
      }
  }
  // Phase 3: weakly coupled leftovers.
  for (std::size_t p = 0; p < nodes; ++p) {
    if (agg[p] != -1 || any[p].empty()) continue;
    double best = -1.0;
    for (auto [q, w] : any[p])
      if (agg[q] != -1 && w > best) {
        best = w;
        agg[p] = agg[q];
      }
    if (agg[p] != -1) continue;
    agg[p] = next;
    for (auto [q, w] : any[p])
      if (agg[q] == -1) agg[q] = next;
    ++next;
  }

  // Merge aggregates too small to carry the near-nullspace.
  if (min_nodes > 1) {
    bool changed = true;
    while (changed) {
      changed = false;
      std::vector<std::size_t> count(static_cast<std::size_t>(next), 0);
      for (long g : agg)
        if (g >= 0) ++count[static_cast<std::size_t>(g)];
      for (std::size_t p = 0; p < nodes; ++p) {
        const long g = agg[p];
        if (g < 0 || count[static_cast<std::size_t>(g)] >= min_nodes) continue;
        // Strongest coupling from any member of g to another aggregate.
        double best = -1.0;
        long target = -1;
        for (std::size_t r = 0; r < nodes; ++r) {
          if (agg[r] != g) continue;
          for (auto [q, w] : any[r])
            if (agg[q] >= 0 && agg[q] != g && w > best) {
              best = w;
              target = agg[q];
            }
        }
        if (target < 0)
          throw SetupError("aggregate " + std::to_string(g) + " has " +
                           std::to_string(count[static_cast<std::size_t>(g)]) +
                           " nodes and no neighbor to merge with");
        for (auto& x : agg)
          if (x == g) x = target;
        changed = true;
        break;
      }
    }
    // Renumber densely.
    std::vector<long> remap(static_cast<std::size_t>(next), -1);
    long k = 0;
    for (auto& x : agg) {
      if (x < 0) continue;
      auto& m = remap[static_cast<std::size_t>(x)];
      if (m < 0) m = k++;
      x = m;
    }
  }
  return agg;
}

}  // namespace detail

namespace {

struct TentativeResult {
  SparseMatrix prolongation;
  std::vector<Vector> coarse_nullspace;
  std::size_t num_aggregates;
  std::vector<std::size_t> empty_columns;
};

// Orthonormalizes the near-nullspace restricted to `rows` (modified
// Gram-Schmidt, one reorthogonalization pass). Returns false when the
// restriction is rank deficient; `bad` receives the offending vector.
bool local_qr(const std::vector<std::size_t>& rows, const std::vector<Vector>& nns,
              std::vector<Vector>& q, std::vector<double>& r, std::size_t& bad,
              bool zero_deficient = false) {
  const std::size_t k = nns.size();
  const std::size_t m = rows.size();
  q.assign(k, Vector(m));
  r.assign(k * k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < m; ++i) q[c][i] = nns[c][rows[i]];
    const double original = norm2(q[c]);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t prev = 0; prev < c; ++prev) {
        const double proj = dot(q[prev], q[c]);
        r[prev * k + c] += proj;
        axpy(-proj, q[prev], q[c]);
      }
    }
    const double nrm = norm2(q[c]);
    if (!(nrm > 1e-10 * std::max(original, 1e-300))) {
      bad = c;
      if (!zero_deficient) return false;
      std::fill(q[c].begin(), q[c].end(), 0.0);
      continue;
    }
    r[c * k + c] = nrm;
    for (double& v : q[c]) v /= nrm;
  }
  return true;
}

std::vector<std::vector<std::size_t>> aggregate_dofs(std::size_t bs, const std::vector<long>& agg) {
  long num_aggs = 0;
  for (long g : agg) num_aggs = std::max(num_aggs, g + 1);
  std::vector<std::vector<std::size_t>> dofs(static_cast<std::size_t>(num_aggs));
  for (std::size_t p = 0; p < agg.size(); ++p)
    if (agg[p] >= 0)
      for (std::size_t c = 0; c < bs; ++c) dofs[static_cast<std::size_t>(agg[p])].push_back(p * bs + c);
  return dofs;
}

TentativeResult tentative_prolongation(std::size_t n, std::size_t bs,
                                       const std::vector<long>& agg,
                                       const std::vector<Vector>& nns, bool zero_deficient) {
  const std::size_t k = nns.size();
  const auto dofs = aggregate_dofs(bs, agg);
  const std::size_t na = dofs.size();

  TripletAssembler pt(n, na * k);
  std::vector<Vector> coarse(k, Vector(na * k, 0.0));
  std::vector<Vector> q;
  std::vector<double> r;
  std::vector<std::size_t> empty;
  for (std::size_t g = 0; g < na; ++g) {
    const auto& rows = dofs[g];
    std::size_t bad = 0;
    if (!local_qr(rows, nns, q, r, bad, zero_deficient))
      throw SetupError("rank-deficient tentative prolongation in aggregate " +
                       std::to_string(g) + " (near-nullspace vector " + std::to_string(bad) + ")");
    for (std::size_t c = 0; c < k; ++c) {
      if (r[c * k + c] == 0.0) {
        empty.push_back(g * k + c);
        continue;
      }
      for (std::size_t i = 0; i < rows.size(); ++i) pt.add(rows[i], g * k + c, q[c][i]);
    }
    for (std::size_t row = 0; row < k; ++row)
      for (std::size_t c = 0; c < k; ++c) coarse[c][g * k + row] = r[row * k + c];
  }
  return {pt.finalize(), std::move(coarse), na, std::move(empty)};
}

}  // namespace

std::shared_ptr<const AmgHierarchy> AmgHierarchy::setup(std::shared_ptr<const SparseMatrix> a,
                                                        std::vector<Vector> near_nullspace,
                                                        const AmgConfig& config) {
  if (!a || a->rows() != a->cols()) throw SizeError("amg: matrix must be square");
  if (config.block_size == 0 || a->rows() % config.block_size != 0)
    throw SizeError("amg: size is not a multiple of block_size");
  if (near_nullspace.empty()) {
    for (std::size_t c = 0; c < config.block_size; ++c) {
      Vector t(a->rows(), 0.0);
      for (std::size_t i = c; i < t.size(); i += config.block_size) t[i] = 1.0;
      near_nullspace.push_back(std::move(t));
    }
  }
  for (const auto& v : near_nullspace)
    if (v.size() != a->rows()) throw SizeError("amg: near-nullspace vector size mismatch");

  std::shared_ptr<AmgHierarchy> h(new AmgHierarchy());
  h->config_ = config;
  h->near_nullspace_ = near_nullspace;

  std::shared_ptr<const SparseMatrix> current = std::move(a);
  std::vector<Vector> nns = std::move(near_nullspace);
  std::size_t bs = config.block_size;
  while (true) {
    Level level;
    level.matrix = current;
    level.block_size = bs;
    const std::size_t n = current->rows();
    const bool last = n <= config.coarsest_size || h->levels_.size() + 1 >= config.max_levels;
    if (!last) {
      const std::size_t k = nns.size();
      const std::size_t min_nodes = (k + bs - 1) / bs;
      auto agg = detail::aggregate_nodes(*current, bs, config.strength_threshold, min_nodes);
      auto tent = tentative_prolongation(
          n, bs, agg, nns, config.rank_deficiency == AmgConfig::RankDeficiency::kZeroColumns);
      if (tent.num_aggregates > 0 && tent.num_aggregates * k < n) {
        // P = (I - omega D^{-1} A) P_tent
        SparseMatrix ap = multiply(*current, tent.prolongation);
        const Vector d = current->diagonal_entries();
        std::vector<std::size_t> offsets(ap.row_offsets().begin(), ap.row_offsets().end());
        std::vector<std::size_t> cols(ap.col_indices().begin(), ap.col_indices().end());
        Vector vals(ap.values().begin(), ap.values().end());
        for (std::size_t i = 0; i < n; ++i)
          for (std::size_t q = offsets[i]; q < offsets[i + 1]; ++q)
            vals[q] *= config.prolongation_smoothing_omega / d[i];
        SparseMatrix scaled(ap.rows(), ap.cols(), std::move(offsets), std::move(cols),
                            std::move(vals));
        level.prolongation = add(tent.prolongation, scaled, 1.0, -1.0);
        level.restriction = level.prolongation.transpose();
        level.num_aggregates = tent.num_aggregates;
        level.smoother.emplace(current);
        SparseMatrix ac = galerkin_product(level.prolongation, *current);
        if (!tent.empty_columns.empty()) {
          Vector unit(ac.rows(), 0.0);
          for (std::size_t col : tent.empty_columns) unit[col] = 1.0;
          ac = add_diagonal(ac, unit);
        }
        auto coarse = std::make_shared<const SparseMatrix>(std::move(ac));
        h->levels_.push_back(std::move(level));
        current = std::move(coarse);
        nns = std::move(tent.coarse_nullspace);
        bs = k;
        continue;
      }
    }
    h->coarse_solver_ = DenseCholesky(*current);
    h->levels_.push_back(std::move(level));
    break;
  }
  return h;
}

void AmgHierarchy::apply(std::span<const double> r, std::span<double> z) const {
  if (r.size() != size() || z.size() != size()) throw SizeError("v-cycle: size mismatch");
  cycle(0, r, z);
}

void AmgHierarchy::cycle(std::size_t l, std::span<const double> r, std::span<double> z) const {
  const Level& lev = levels_[l];
  if (l + 1 == levels_.size()) {
    coarse_solver_.apply(r, z);
    return;
  }
  const std::size_t n = lev.matrix->rows();
  std::fill(z.begin(), z.end(), 0.0);
  for (int s = 0; s < config_.pre_sweeps; ++s)
    lev.smoother->gauss_seidel(z, r, SweepDirection::kForward);

  Vector res(n);
  lev.matrix->multiply(z, res);
  for (std::size_t i = 0; i < n; ++i) res[i] = r[i] - res[i];
  Vector rc(lev.restriction.rows()), zc(lev.restriction.rows());
  lev.restriction.multiply(res, rc);
  cycle(l + 1, rc, zc);
  Vector correction(n);
  lev.prolongation.multiply(zc, correction);
  axpy(1.0, correction, z);

  for (int s = 0; s < config_.post_sweeps; ++s)
    lev.smoother->gauss_seidel(z, r, SweepDirection::kBackward);
}

double AmgHierarchy::operator_complexity() const {
  double total = 0.0;
  for (const auto& l : levels_) total += static_cast<double>(l.matrix->nnz());
  return total / static_cast<double>(levels_.front().matrix->nnz());
}

}  // namespace amgf
