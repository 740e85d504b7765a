#include "amgf/gap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "amgf/error.hpp"

namespace amgf {

namespace {

struct Projection {
  bool found = false;
  double distance = std::numeric_limits<double>::infinity();
  GapRow row;
};

using P3 = std::array<double, 3>;

P3 point(std::span<const double> coords, std::size_t dim, std::size_t node) {
  P3 p{0, 0, 0};
  for (std::size_t c = 0; c < dim; ++c) p[c] = coords[node * dim + c];
  return p;
}

double dot3(const P3& a, const P3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
P3 sub3(const P3& a, const P3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
P3 cross3(const P3& a, const P3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double len3(const P3& a) { return std::sqrt(dot3(a, a)); }

Projection project_segment(const P3& xp, const P3& a, const P3& b, double tol,
                           std::size_t facet) {
  Projection out;
  const P3 t = sub3(b, a);
  const double l = len3(t);
  if (!(l > 1e-14)) throw GeometryError("mortar facet " + std::to_string(facet) + " has zero length");
  double xi = dot3(sub3(xp, a), t) / (l * l);
  if (xi < -tol || xi > 1.0 + tol) return out;
  xi = std::clamp(xi, 0.0, 1.0);
  const P3 n{-t[1] / l, t[0] / l, 0.0};
  const P3 proj{a[0] + xi * t[0], a[1] + xi * t[1], 0.0};
  const P3 diff = sub3(xp, proj);
  out.found = true;
  out.distance = len3(diff);
  out.row.normal = n;
  out.row.weights = {1.0 - xi, xi};
  out.row.gap = dot3(diff, n);
  return out;
}

// Bilinear shape values on [-1,1]^2 (counter-clockwise nodes).
void quad_shape(double xi, double eta, double* n, double* dxi, double* deta) {
  const double sx[4] = {-1, 1, 1, -1}, sy[4] = {-1, -1, 1, 1};
  for (int a = 0; a < 4; ++a) {
    n[a] = 0.25 * (1 + sx[a] * xi) * (1 + sy[a] * eta);
    dxi[a] = 0.25 * sx[a] * (1 + sy[a] * eta);
    deta[a] = 0.25 * sy[a] * (1 + sx[a] * xi);
  }
}

Projection project_quad(const P3& xp, const std::array<P3, 4>& x, double tol, std::size_t facet) {
  Projection out;
  double xi = 0.0, eta = 0.0;
  double n[4], dxi[4], deta[4];
  P3 pos{}, txi{}, teta{};
  auto eval = [&] {
    quad_shape(xi, eta, n, dxi, deta);
    pos = txi = teta = P3{0, 0, 0};
    for (int a = 0; a < 4; ++a)
      for (int c = 0; c < 3; ++c) {
        pos[c] += n[a] * x[a][c];
        txi[c] += dxi[a] * x[a][c];
        teta[c] += deta[a] * x[a][c];
      }
  };
  for (int it = 0; it < 50; ++it) {
    eval();
    const P3 r = sub3(pos, xp);
    // Mixed second derivative of the bilinear map.
    P3 txe{0, 0, 0};
    const double sxy[4] = {0.25, -0.25, 0.25, -0.25};
    for (int a = 0; a < 4; ++a)
      for (int c = 0; c < 3; ++c) txe[c] += sxy[a] * x[a][c];
    const double f0 = dot3(r, txi), f1 = dot3(r, teta);
    const double h00 = dot3(txi, txi), h11 = dot3(teta, teta);
    const double h01 = dot3(txi, teta) + dot3(r, txe);
    const double det = h00 * h11 - h01 * h01;
    if (!(std::abs(det) > 1e-300))
      throw GeometryError("mortar facet " + std::to_string(facet) + " is degenerate");
    const double dx = (h11 * f0 - h01 * f1) / det;
    const double de = (h00 * f1 - h01 * f0) / det;
    xi -= dx;
    eta -= de;
    if (std::abs(dx) + std::abs(de) < 1e-14) break;
  }
  if (std::abs(xi) > 1.0 + tol || std::abs(eta) > 1.0 + tol) return out;
  xi = std::clamp(xi, -1.0, 1.0);
  eta = std::clamp(eta, -1.0, 1.0);
  eval();
  P3 nrm = cross3(txi, teta);
  const double nl = len3(nrm);
  if (!(nl > 1e-14)) throw GeometryError("mortar facet " + std::to_string(facet) + " has zero area");
  for (double& v : nrm) v /= nl;
  const P3 diff = sub3(xp, pos);
  out.found = true;
  out.distance = len3(diff);
  out.row.normal = nrm;
  out.row.weights.assign(n, n + 4);
  out.row.gap = dot3(diff, nrm);
  return out;
}

// Lumped measure of the non-mortar boundary per node.
std::vector<double> non_mortar_measure(const StructuredMesh& mesh, std::span<const double> coords) {
  const std::size_t d = mesh.dim;
  const std::size_t npf = mesh.nodes_per_facet;
  std::vector<double> m(mesh.num_nodes(), 0.0);
  const std::size_t nf = mesh.non_mortar_facets.size() / npf;
  for (std::size_t f = 0; f < nf; ++f) {
    const std::size_t* nodes = &mesh.non_mortar_facets[f * npf];
    if (d == 2) {
      const double l = len3(sub3(point(coords, d, nodes[1]), point(coords, d, nodes[0])));
      if (!(l > 1e-14)) throw GeometryError("non-mortar facet " + std::to_string(f) + " has zero length");
      m[nodes[0]] += 0.5 * l;
      m[nodes[1]] += 0.5 * l;
    } else {
      std::array<P3, 4> x;
      for (int a = 0; a < 4; ++a) x[a] = point(coords, d, nodes[a]);
      const double g = 1.0 / std::sqrt(3.0);
      double area = 0.0;
      for (double xi : {-g, g})
        for (double eta : {-g, g}) {
          double n[4], dxi[4], deta[4];
          quad_shape(xi, eta, n, dxi, deta);
          P3 txi{0, 0, 0}, teta{0, 0, 0};
          for (int a = 0; a < 4; ++a)
            for (int c = 0; c < 3; ++c) {
              txi[c] += dxi[a] * x[a][c];
              teta[c] += deta[a] * x[a][c];
            }
          const double ja = len3(cross3(txi, teta));
          area += ja;
          for (int a = 0; a < 4; ++a) m[nodes[a]] += n[a] * ja;
        }
      if (!(area > 1e-14)) throw GeometryError("non-mortar facet " + std::to_string(f) + " has zero area");
    }
  }
  return m;
}

}  // namespace

GapAssembly assemble_gap(const StructuredMesh& mesh, const DofMap& dofs,
                         std::span<const double> coords, const GapOptions& options) {
  const std::size_t d = mesh.dim;
  if (coords.size() != mesh.num_nodes() * d) throw SizeError("gap: coordinate array size");
  const std::size_t npf = mesh.nodes_per_facet;
  const std::size_t nf = mesh.mortar_facets.size() / npf;
  const auto measure = non_mortar_measure(mesh, coords);

  GapAssembly out;
  std::vector<double> ms;
  for (std::size_t p : mesh.node_set("non_mortar")) {
    const P3 xp = point(coords, d, p);
    Projection best;
    for (std::size_t f = 0; f < nf; ++f) {
      const std::size_t* nodes = &mesh.mortar_facets[f * npf];
      Projection cand;
      if (d == 2) {
        cand = project_segment(xp, point(coords, d, nodes[0]), point(coords, d, nodes[1]),
                               options.projection_tolerance, f);
      } else {
        std::array<P3, 4> x;
        for (int a = 0; a < 4; ++a) x[a] = point(coords, d, nodes[a]);
        cand = project_quad(xp, x, options.projection_tolerance, f);
      }
      if (!cand.found || cand.distance > options.search_radius) continue;
      if (cand.distance < best.distance) {
        best = std::move(cand);
        best.row.mortar_facet = f;
        best.row.facet_nodes.assign(nodes, nodes + npf);
      }
    }
    if (!best.found) {
      ++out.skipped;
      continue;
    }
    best.row.non_mortar_node = p;
    out.rows.push_back(std::move(best.row));
    ms.push_back(measure[p]);
  }

  const std::size_t m = out.rows.size();
  TripletAssembler jf(m, dofs.num_free_dofs()), jall(m, mesh.num_nodes() * d);
  out.g.resize(m);
  for (std::size_t r = 0; r < m; ++r) {
    const GapRow& row = out.rows[r];
    out.g[r] = row.gap;
    auto add = [&](std::size_t node, double w) {
      for (std::size_t c = 0; c < d; ++c) {
        const double v = w * row.normal[c];
        jall.add(r, node * d + c, v);
        const long dof = dofs.dof(node, c);
        if (dof >= 0) jf.add(r, static_cast<std::size_t>(dof), v);
      }
    };
    add(row.non_mortar_node, 1.0);
    for (std::size_t k = 0; k < row.facet_nodes.size(); ++k)
      if (std::abs(row.weights[k]) > 1e-14) add(row.facet_nodes[k], -row.weights[k]);
  }
  out.j = jf.finalize();
  out.j_full = jall.finalize();
  out.ms = DiagonalMatrix(std::move(ms));
  return out;
}

double frozen_gap(const GapRow& row, std::size_t dim, std::span<const double> coords) {
  double g = 0.0;
  for (std::size_t c = 0; c < dim; ++c) {
    double x = coords[row.non_mortar_node * dim + c];
    for (std::size_t k = 0; k < row.facet_nodes.size(); ++k)
      x -= row.weights[k] * coords[row.facet_nodes[k] * dim + c];
    g += x * row.normal[c];
  }
  return g;
}

}  // namespace amgf
