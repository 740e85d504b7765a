#include "amgf/fem.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <string>

#include "amgf/amg.hpp"
#include "amgf/error.hpp"

namespace amgf {

void Material::validate() const {
  if (!(youngs_modulus > 0.0) || !std::isfinite(youngs_modulus))
    throw DomainError("material: Young's modulus must be positive");
  if (!(poisson_ratio >= 0.0 && poisson_ratio < 0.5))
    throw DomainError("material: Poisson ratio must lie in [0, 0.5)");
}

double Material::lame_lambda() const {
  validate();
  const double nu = poisson_ratio;
  return youngs_modulus * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
}

double Material::lame_mu() const {
  validate();
  return youngs_modulus / (2.0 * (1.0 + poisson_ratio));
}

const std::vector<std::size_t>& StructuredMesh::node_set(const std::string& name) const {
  auto it = node_sets.find(name);
  if (it == node_sets.end()) throw DomainError("mesh: no node set named '" + name + "'");
  return it->second;
}

std::vector<double> ContactSetup::bc_at(std::size_t step, std::size_t steps) const {
  if (steps == 0) throw DomainError("bc_at: number of steps must be >= 1");
  if (step > steps) throw DomainError("bc_at: step exceeds number of steps");
  if (step == 0) return std::vector<double>(bc_value.size(), 0.0);
  if (!bc_schedule.empty()) {
    if (steps != bc_schedule.size())
      throw DomainError("bc_at: this setup prescribes exactly " +
                        std::to_string(bc_schedule.size()) + " steps");
    return bc_schedule[step - 1];
  }
  std::vector<double> out(bc_value);
  for (double& v : out) v *= static_cast<double>(step) / static_cast<double>(steps);
  return out;
}

namespace {

using MapFn = std::function<void(const double* xi, double* x)>;

struct Grid {
  std::array<std::size_t, 3> n{1, 1, 1};  // elements per direction
  std::vector<std::size_t> ids;
  std::size_t at(std::size_t i, std::size_t j, std::size_t k = 0) const {
    return ids[(k * (n[1] + 1) + j) * (n[0] + 1) + i];
  }
};

Grid add_block(StructuredMesh& mesh, std::array<std::size_t, 3> counts, const MapFn& map,
               std::size_t body) {
  const std::size_t d = mesh.dim;
  if (d == 2) counts[2] = 0;
  Grid g;
  g.n = counts;
  const std::size_t nz = d == 3 ? counts[2] + 1 : 1;
  for (std::size_t k = 0; k < nz; ++k)
    for (std::size_t j = 0; j <= counts[1]; ++j)
      for (std::size_t i = 0; i <= counts[0]; ++i) {
        double xi[3] = {static_cast<double>(i) / static_cast<double>(counts[0]),
                        static_cast<double>(j) / static_cast<double>(counts[1]),
                        d == 3 ? static_cast<double>(k) / static_cast<double>(counts[2]) : 0.0};
        double x[3] = {0, 0, 0};
        map(xi, x);
        g.ids.push_back(mesh.num_nodes());
        for (std::size_t c = 0; c < d; ++c) mesh.coords.push_back(x[c]);
      }
  if (d == 2) {
    for (std::size_t j = 0; j < counts[1]; ++j)
      for (std::size_t i = 0; i < counts[0]; ++i) {
        for (std::size_t v : {g.at(i, j), g.at(i + 1, j), g.at(i + 1, j + 1), g.at(i, j + 1)})
          mesh.connectivity.push_back(v);
        mesh.element_body.push_back(body);
      }
  } else {
    for (std::size_t k = 0; k < counts[2]; ++k)
      for (std::size_t j = 0; j < counts[1]; ++j)
        for (std::size_t i = 0; i < counts[0]; ++i) {
          for (std::size_t kk : {k, k + 1})
            for (std::size_t v : {g.at(i, j, kk), g.at(i + 1, j, kk), g.at(i + 1, j + 1, kk),
                                  g.at(i, j + 1, kk)})
              mesh.connectivity.push_back(v);
          mesh.element_body.push_back(body);
        }
  }
  mesh.num_bodies = std::max(mesh.num_bodies, body + 1);
  return g;
}

// Nodes of the top (max vertical coordinate) or bottom face.
std::vector<std::size_t> face_nodes(const StructuredMesh& mesh, const Grid& g, bool top) {
  std::vector<std::size_t> out;
  if (mesh.dim == 2) {
    const std::size_t j = top ? g.n[1] : 0;
    for (std::size_t i = 0; i <= g.n[0]; ++i) out.push_back(g.at(i, j));
  } else {
    const std::size_t k = top ? g.n[2] : 0;
    for (std::size_t j = 0; j <= g.n[1]; ++j)
      for (std::size_t i = 0; i <= g.n[0]; ++i) out.push_back(g.at(i, j, k));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Outward-oriented facets of the top or bottom face.
void append_facets(const StructuredMesh& mesh, const Grid& g, bool top,
                   std::vector<std::size_t>& facets) {
  if (mesh.dim == 2) {
    const std::size_t j = top ? g.n[1] : 0;
    for (std::size_t i = 0; i < g.n[0]; ++i) {
      if (top) {
        facets.push_back(g.at(i, j));
        facets.push_back(g.at(i + 1, j));
      } else {
        facets.push_back(g.at(i + 1, j));
        facets.push_back(g.at(i, j));
      }
    }
  } else {
    const std::size_t k = top ? g.n[2] : 0;
    for (std::size_t j = 0; j < g.n[1]; ++j)
      for (std::size_t i = 0; i < g.n[0]; ++i) {
        if (top) {
          for (std::size_t v : {g.at(i, j, k), g.at(i + 1, j, k), g.at(i + 1, j + 1, k),
                                g.at(i, j + 1, k)})
            facets.push_back(v);
        } else {
          for (std::size_t v : {g.at(i, j, k), g.at(i, j + 1, k), g.at(i + 1, j + 1, k),
                                g.at(i + 1, j, k)})
            facets.push_back(v);
        }
      }
  }
}

// Labels body 0 as the mortar/fixed body and body 1 as the non-mortar/driven body.
void label_two_body_sets(StructuredMesh& mesh, const Grid& lower, const Grid& upper) {
  mesh.node_sets["dirichlet_bottom"] = face_nodes(mesh, lower, false);
  mesh.node_sets["mortar"] = face_nodes(mesh, lower, true);
  mesh.node_sets["non_mortar"] = face_nodes(mesh, upper, false);
  mesh.node_sets["dirichlet_top"] = face_nodes(mesh, upper, true);
  mesh.nodes_per_facet = mesh.dim == 2 ? 2 : 4;
  append_facets(mesh, lower, true, mesh.mortar_facets);
  append_facets(mesh, upper, false, mesh.non_mortar_facets);
}

StructuredMesh empty_mesh(std::size_t dim) {
  if (dim != 2 && dim != 3) throw DomainError("mesh: dimension must be 2 or 3");
  StructuredMesh mesh;
  mesh.dim = dim;
  mesh.nodes_per_element = dim == 2 ? 4 : 8;
  return mesh;
}

void check_materials(std::vector<Material>& materials, std::vector<Material> defaults) {
  if (materials.empty()) materials = std::move(defaults);
  if (materials.size() != 2) throw DomainError("setup: expected one material per body (2)");
  for (const auto& m : materials) m.validate();
}

}  // namespace

ContactSetup build_two_block(std::size_t dim, std::size_t refinement,
                             std::vector<Material> materials, std::vector<double> bc_value) {
  ContactSetup setup;
  setup.mesh = empty_mesh(dim);
  check_materials(materials, {{1.0, 0.499}, {1000.0, 0.0}});
  setup.materials = std::move(materials);
  if (bc_value.empty()) {
    bc_value.assign(dim, 0.0);
    bc_value[dim - 1] = -5.0 / 7.0;
  }
  if (bc_value.size() != dim) throw SizeError("two-block: bc_value must have dim entries");
  setup.bc_value = std::move(bc_value);

  const std::size_t s = std::size_t{1} << refinement;
  StructuredMesh& mesh = setup.mesh;
  Grid lower, upper;
  if (dim == 2) {
    lower = add_block(mesh, {8 * s, 4 * s, 0},
                      [](const double* xi, double* x) {
                        x[0] = 2.0 * xi[0];
                        x[1] = xi[1];
                      },
                      0);
    upper = add_block(mesh, {4 * s, 4 * s, 0},
                      [](const double* xi, double* x) {
                        x[0] = 0.5 + xi[0];
                        x[1] = 1.0 + xi[1];
                      },
                      1);
  } else {
    lower = add_block(mesh, {4 * s, 4 * s, 2 * s},
                      [](const double* xi, double* x) {
                        x[0] = 2.0 * xi[0];
                        x[1] = 2.0 * xi[1];
                        x[2] = xi[2];
                      },
                      0);
    upper = add_block(mesh, {2 * s, 2 * s, 2 * s},
                      [](const double* xi, double* x) {
                        x[0] = 0.5 + xi[0];
                        x[1] = 0.5 + xi[1];
                        x[2] = 1.0 + xi[2];
                      },
                      1);
  }
  label_two_body_sets(mesh, lower, upper);
  return setup;
}

std::vector<double> ironing_bc(std::size_t dim, std::size_t step) {
  if (dim != 2 && dim != 3) throw DomainError("ironing_bc: dimension must be 2 or 3");
  if (step > 10) throw DomainError("ironing_bc: step must be in 0..10");
  std::vector<double> u(dim, 0.0);
  const double i = static_cast<double>(step);
  if (step <= 3) {
    u[dim - 1] = -5.0 / 7.0 * i / 3.0;
  } else {
    u[0] = 15.0 / 7.0 * (i - 3.0) / 7.0;
    u[dim - 1] = -5.0 / 7.0;
  }
  return u;
}

ContactSetup build_ironing(std::size_t dim, std::size_t refinement,
                           std::vector<Material> materials) {
  ContactSetup setup;
  setup.mesh = empty_mesh(dim);
  check_materials(materials, {{1.0, 0.499}, {1000.0, 0.0}});
  setup.materials = std::move(materials);
  for (std::size_t i = 1; i <= 10; ++i) setup.bc_schedule.push_back(ironing_bc(dim, i));
  setup.bc_value = setup.bc_schedule.back();

  const std::size_t s = std::size_t{1} << refinement;
  // Die bottom: circular arc of radius 1 touching the slab at x = 1.
  auto arc = [](double x) { return 1.0 + 1.0 - std::sqrt(1.0 - (x - 1.0) * (x - 1.0)); };
  StructuredMesh& mesh = setup.mesh;
  Grid slab, die;
  if (dim == 2) {
    slab = add_block(mesh, {20 * s, 4 * s, 0},
                     [](const double* xi, double* x) {
                       x[0] = 5.0 * xi[0];
                       x[1] = xi[1];
                     },
                     0);
    die = add_block(mesh, {4 * s, 4 * s, 0},
                    [&](const double* xi, double* x) {
                      x[0] = 0.5 + xi[0];
                      const double yb = arc(x[0]);
                      x[1] = yb + xi[1] * (2.0 - yb);
                    },
                    1);
  } else {
    slab = add_block(mesh, {20 * s, 4 * s, 4 * s},
                     [](const double* xi, double* x) {
                       x[0] = 5.0 * xi[0];
                       x[1] = xi[1];
                       x[2] = xi[2];
                     },
                     0);
    die = add_block(mesh, {4 * s, 4 * s, 4 * s},
                    [&](const double* xi, double* x) {
                      x[0] = 0.5 + xi[0];
                      x[1] = xi[1];
                      const double zb = arc(x[0]);
                      x[2] = zb + xi[2] * (2.0 - zb);
                    },
                    1);
  }
  label_two_body_sets(mesh, slab, die);
  return setup;
}

DofMap make_dof_map(const StructuredMesh& mesh, std::span<const std::size_t> constrained_nodes) {
  DofMap map;
  map.dim = mesh.dim;
  map.node_to_free.assign(mesh.num_nodes(), 0);
  for (std::size_t n : constrained_nodes) {
    if (n >= mesh.num_nodes()) throw SizeError("dof map: constrained node out of range");
    map.node_to_free[n] = -1;
  }
  for (std::size_t n = 0; n < mesh.num_nodes(); ++n) {
    if (map.node_to_free[n] < 0) continue;
    map.node_to_free[n] = static_cast<long>(map.free_nodes.size());
    map.free_nodes.push_back(n);
  }
  return map;
}

namespace {

constexpr double kSigns2[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
constexpr double kSigns3[8][3] = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                                  {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};

double sign_of(std::size_t dim, std::size_t a, std::size_t c) {
  return dim == 2 ? kSigns2[a][c] : kSigns3[a][c];
}

// Shape function values and reference gradients at xi.
void shape(std::size_t dim, const double* xi, double* n, double* dn) {
  const std::size_t npe = dim == 2 ? 4 : 8;
  const double scale = dim == 2 ? 0.25 : 0.125;
  for (std::size_t a = 0; a < npe; ++a) {
    double f[3];
    for (std::size_t c = 0; c < dim; ++c) f[c] = 1.0 + sign_of(dim, a, c) * xi[c];
    double prod = scale;
    for (std::size_t c = 0; c < dim; ++c) prod *= f[c];
    n[a] = prod;
    for (std::size_t c = 0; c < dim; ++c) {
      double g = scale * sign_of(dim, a, c);
      for (std::size_t o = 0; o < dim; ++o)
        if (o != c) g *= f[o];
      dn[a * dim + c] = g;
    }
  }
}

// Jacobian determinant and physical gradients; returns det.
double physical_gradients(const StructuredMesh& mesh, std::span<const std::size_t> nodes,
                          const double* dn, double* grad) {
  const std::size_t d = mesh.dim;
  const std::size_t npe = nodes.size();
  double jac[3][3] = {};
  for (std::size_t a = 0; a < npe; ++a) {
    auto x = mesh.node(nodes[a]);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) jac[r][c] += x[r] * dn[a * d + c];
  }
  double inv[3][3];
  double det;
  if (d == 2) {
    det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
    inv[0][0] = jac[1][1] / det;
    inv[0][1] = -jac[0][1] / det;
    inv[1][0] = -jac[1][0] / det;
    inv[1][1] = jac[0][0] / det;
  } else {
    det = jac[0][0] * (jac[1][1] * jac[2][2] - jac[1][2] * jac[2][1]) -
          jac[0][1] * (jac[1][0] * jac[2][2] - jac[1][2] * jac[2][0]) +
          jac[0][2] * (jac[1][0] * jac[2][1] - jac[1][1] * jac[2][0]);
    inv[0][0] = (jac[1][1] * jac[2][2] - jac[1][2] * jac[2][1]) / det;
    inv[0][1] = (jac[0][2] * jac[2][1] - jac[0][1] * jac[2][2]) / det;
    inv[0][2] = (jac[0][1] * jac[1][2] - jac[0][2] * jac[1][1]) / det;
    inv[1][0] = (jac[1][2] * jac[2][0] - jac[1][0] * jac[2][2]) / det;
    inv[1][1] = (jac[0][0] * jac[2][2] - jac[0][2] * jac[2][0]) / det;
    inv[1][2] = (jac[0][2] * jac[1][0] - jac[0][0] * jac[1][2]) / det;
    inv[2][0] = (jac[1][0] * jac[2][1] - jac[1][1] * jac[2][0]) / det;
    inv[2][1] = (jac[0][1] * jac[2][0] - jac[0][0] * jac[2][1]) / det;
    inv[2][2] = (jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0]) / det;
  }
  // grad_x N = J^{-T} grad_xi N, with jac[r][c] = dx_r/dxi_c.
  for (std::size_t a = 0; a < npe; ++a)
    for (std::size_t r = 0; r < d; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) s += dn[a * d + c] * inv[c][r];
      grad[a * d + r] = s;
    }
  return det;
}

template <typename F>
void for_each_gauss_point(std::size_t dim, F&& f) {
  const double g = 1.0 / std::sqrt(3.0);
  const std::size_t count = std::size_t{1} << dim;
  for (std::size_t q = 0; q < count; ++q) {
    double xi[3];
    for (std::size_t c = 0; c < dim; ++c) xi[c] = (q >> c & 1) ? g : -g;
    f(xi, 1.0);
  }
}

}  // namespace

std::vector<double> element_stiffness(const StructuredMesh& mesh, std::size_t element,
                                      const Material& material) {
  const std::size_t d = mesh.dim;
  const std::size_t npe = mesh.nodes_per_element;
  const std::size_t ndof = npe * d;
  const auto nodes = mesh.element(element);
  const double lam = material.lame_lambda();
  const double mu = material.lame_mu();
  const std::size_t nstrain = d == 2 ? 3 : 6;
  // Voigt pairs for the shear strains.
  const std::size_t shear2[1][2] = {{0, 1}};
  const std::size_t shear3[3][2] = {{0, 1}, {1, 2}, {0, 2}};

  std::vector<double> ke(ndof * ndof, 0.0);
  std::vector<double> n(npe), dn(npe * d), grad(npe * d), b(nstrain * ndof), db(nstrain * ndof);
  for_each_gauss_point(d, [&](const double* xi, double w) {
    shape(d, xi, n.data(), dn.data());
    const double det = physical_gradients(mesh, nodes, dn.data(), grad.data());
    if (!(det > 0.0))
      throw GeometryError("element " + std::to_string(element) +
                          " has a nonpositive Jacobian determinant");
    std::fill(b.begin(), b.end(), 0.0);
    for (std::size_t a = 0; a < npe; ++a) {
      for (std::size_t c = 0; c < d; ++c) b[c * ndof + a * d + c] = grad[a * d + c];
      for (std::size_t s = 0; s + d < nstrain; ++s) {
        const std::size_t p = d == 2 ? shear2[s][0] : shear3[s][0];
        const std::size_t q = d == 2 ? shear2[s][1] : shear3[s][1];
        b[(d + s) * ndof + a * d + p] = grad[a * d + q];
        b[(d + s) * ndof + a * d + q] = grad[a * d + p];
      }
    }
    // D B with D = lambda 1 1^T (normal block) + 2 mu I (normal) + mu I (shear)
    for (std::size_t j = 0; j < ndof; ++j) {
      double trace = 0.0;
      for (std::size_t c = 0; c < d; ++c) trace += b[c * ndof + j];
      for (std::size_t c = 0; c < d; ++c) db[c * ndof + j] = lam * trace + 2.0 * mu * b[c * ndof + j];
      for (std::size_t s = d; s < nstrain; ++s) db[s * ndof + j] = mu * b[s * ndof + j];
    }
    const double scale = det * w;
    for (std::size_t i = 0; i < ndof; ++i)
      for (std::size_t j = i; j < ndof; ++j) {
        double s = 0.0;
        for (std::size_t r = 0; r < nstrain; ++r) s += b[r * ndof + i] * db[r * ndof + j];
        ke[i * ndof + j] += s * scale;
      }
  });
  for (std::size_t i = 0; i < ndof; ++i)
    for (std::size_t j = 0; j < i; ++j) ke[i * ndof + j] = ke[j * ndof + i];
  return ke;
}

SparseMatrix assemble_stiffness(const StructuredMesh& mesh,
                                const std::vector<Material>& materials) {
  if (materials.size() < mesh.num_bodies) throw SizeError("assembly: missing material for a body");
  const std::size_t d = mesh.dim;
  const std::size_t n = mesh.num_nodes() * d;
  const std::size_t npe = mesh.nodes_per_element;
  TripletAssembler t(n, n);
  t.reserve(mesh.num_elements() * npe * npe * d * d);
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto ke = element_stiffness(mesh, e, materials[mesh.element_body[e]]);
    const auto nodes = mesh.element(e);
    const std::size_t ndof = npe * d;
    for (std::size_t i = 0; i < ndof; ++i)
      for (std::size_t j = 0; j < ndof; ++j)
        t.add(nodes[i / d] * d + i % d, nodes[j / d] * d + j % d, ke[i * ndof + j]);
  }
  return t.finalize();
}

Vector lumped_mass(const StructuredMesh& mesh) {
  const std::size_t d = mesh.dim;
  const std::size_t npe = mesh.nodes_per_element;
  Vector mass(mesh.num_nodes() * d, 0.0);
  std::vector<double> n(npe), dn(npe * d), grad(npe * d);
  for (std::size_t e = 0; e < mesh.num_elements(); ++e) {
    const auto nodes = mesh.element(e);
    for_each_gauss_point(d, [&](const double* xi, double w) {
      shape(d, xi, n.data(), dn.data());
      const double det = physical_gradients(mesh, nodes, dn.data(), grad.data());
      for (std::size_t a = 0; a < npe; ++a)
        for (std::size_t c = 0; c < d; ++c) mass[nodes[a] * d + c] += n[a] * det * w;
    });
  }
  return mass;
}

Vector ElasticSystem::load(std::span<const double> full_displacement) const {
  const std::size_t d = dofs.dim;
  if (full_displacement.size() != k_full.rows()) throw SizeError("load: field size mismatch");
  Vector lift(full_displacement.size(), 0.0);
  for (std::size_t node : constrained_nodes)
    for (std::size_t c = 0; c < d; ++c) lift[node * d + c] = full_displacement[node * d + c];
  Vector y(lift.size());
  k_full.multiply(lift, y);
  Vector f(dofs.num_free_dofs());
  for (std::size_t fi = 0; fi < dofs.free_nodes.size(); ++fi)
    for (std::size_t c = 0; c < d; ++c) f[fi * d + c] = -y[dofs.free_nodes[fi] * d + c];
  return f;
}

Vector ElasticSystem::expand(std::span<const double> u, std::span<const double> prescribed) const {
  const std::size_t d = dofs.dim;
  if (u.size() != dofs.num_free_dofs() || prescribed.size() != k_full.rows())
    throw SizeError("expand: size mismatch");
  Vector full(prescribed.begin(), prescribed.end());
  for (std::size_t fi = 0; fi < dofs.free_nodes.size(); ++fi)
    for (std::size_t c = 0; c < d; ++c) full[dofs.free_nodes[fi] * d + c] = u[fi * d + c];
  return full;
}

Vector ElasticSystem::prescribed_field(const StructuredMesh& mesh,
                                       std::span<const double> driven) const {
  const std::size_t d = mesh.dim;
  if (driven.size() != d) throw SizeError("prescribed_field: driven value needs dim entries");
  Vector full(mesh.num_nodes() * d, 0.0);
  for (std::size_t node : mesh.node_set("dirichlet_top"))
    for (std::size_t c = 0; c < d; ++c) full[node * d + c] = driven[c];
  return full;
}

ElasticSystem assemble_elasticity(const ContactSetup& setup) {
  const StructuredMesh& mesh = setup.mesh;
  ElasticSystem sys;
  std::vector<std::size_t> constrained = mesh.node_set("dirichlet_bottom");
  const auto& top = mesh.node_set("dirichlet_top");
  constrained.insert(constrained.end(), top.begin(), top.end());
  std::sort(constrained.begin(), constrained.end());
  constrained.erase(std::unique(constrained.begin(), constrained.end()), constrained.end());
  sys.constrained_nodes = constrained;
  sys.dofs = make_dof_map(mesh, constrained);
  sys.k_full = assemble_stiffness(mesh, setup.materials);

  const std::size_t d = mesh.dim;
  std::vector<std::size_t> free_full;
  free_full.reserve(sys.dofs.num_free_dofs());
  for (std::size_t node : sys.dofs.free_nodes)
    for (std::size_t c = 0; c < d; ++c) free_full.push_back(node * d + c);
  sys.k = std::make_shared<const SparseMatrix>(principal_submatrix(sys.k_full, free_full));

  const Vector mass = lumped_mass(mesh);
  Vector m(free_full.size());
  for (std::size_t i = 0; i < free_full.size(); ++i) m[i] = mass[free_full[i]];
  sys.mass = DiagonalMatrix(std::move(m));
  return sys;
}

std::vector<Vector> free_rigid_body_modes(const StructuredMesh& mesh, const DofMap& dofs) {
  std::vector<double> coords;
  coords.reserve(dofs.free_nodes.size() * mesh.dim);
  for (std::size_t node : dofs.free_nodes) {
    auto x = mesh.node(node);
    coords.insert(coords.end(), x.begin(), x.end());
  }
  return rigid_body_modes(mesh.dim, coords);
}

}  // namespace amgf
