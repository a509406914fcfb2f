#include <algorithm>
#include <map>

#include "cardio/fem.hpp"

namespace cardio::fem {

using mesh::SimplicialMesh;
using sparse::CsrMatrix;
using sparse::TripletBuilder;

std::array<Point, 4> p1_gradients(const SimplicialMesh& mesh, int c) {
  const int dim = mesh.dim();
  const auto& cell = mesh.cell(c);
  const Point& x0 = mesh.vertex(cell[0]);
  std::array<Point, 4> g{};
  if (dim == 2) {
    const Point a = mesh.vertex(cell[1]) - x0, b = mesh.vertex(cell[2]) - x0;
    const double det = a[0] * b[1] - a[1] * b[0];
    // rows of J^{-1}, J = [a b]
    g[1] = {b[1] / det, -b[0] / det, 0.0};
    g[2] = {-a[1] / det, a[0] / det, 0.0};
  } else {
    const Point a = mesh.vertex(cell[1]) - x0, b = mesh.vertex(cell[2]) - x0, d = mesh.vertex(cell[3]) - x0;
    const double det = dot(a, cross(b, d));
    g[1] = (1.0 / det) * cross(b, d);
    g[2] = (1.0 / det) * cross(d, a);
    g[3] = (1.0 / det) * cross(a, b);
  }
  g[0] = {0.0, 0.0, 0.0};
  for (int k = 1; k <= dim; ++k) g[0] = g[0] - g[k];
  return g;
}

std::vector<double> element_mass(const SimplicialMesh& mesh, int c, double coeff) {
  const int nv = mesh.dim() + 1;
  const double m = mesh.cell_measure(c);
  // exact integral of phi_a phi_b: |K| (1 + delta_ab) / ((d+1)(d+2))
  const double base = coeff * m / (nv * (nv + 1));
  std::vector<double> e(nv * nv, base);
  for (int a = 0; a < nv; ++a) e[a * nv + a] = 2.0 * base;
  return e;
}

std::vector<double> element_stiffness(const SimplicialMesh& mesh, int c, const Tensor& D) {
  const int dim = mesh.dim(), nv = dim + 1;
  const double m = mesh.cell_measure(c);
  const auto g = p1_gradients(mesh, c);
  std::vector<double> e(nv * nv);
  for (int a = 0; a < nv; ++a) {
    Point Dg{0.0, 0.0, 0.0};
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) Dg[i] += D[i * 3 + j] * g[a][j];
    for (int b = 0; b < nv; ++b) e[a * nv + b] = m * dot(Dg, g[b]);
  }
  // exact symmetry regardless of rounding in D g
  for (int a = 0; a < nv; ++a)
    for (int b = a + 1; b < nv; ++b) e[b * nv + a] = e[a * nv + b];
  return e;
}

void add_mass(TripletBuilder& out, const SimplicialMesh& mesh, double coeff, int row_offset, int col_offset) {
  const int nv = mesh.dim() + 1;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto e = element_mass(mesh, static_cast<int>(c), coeff);
    const auto& cell = mesh.cell(static_cast<int>(c));
    for (int a = 0; a < nv; ++a)
      for (int b = 0; b < nv; ++b) out.add(row_offset + cell[a], col_offset + cell[b], e[a * nv + b]);
  }
}

void add_stiffness(TripletBuilder& out, const SimplicialMesh& mesh, const ConductivityField& field, int row_offset,
                   int col_offset) {
  if (field.tensors.size() != mesh.num_cells())
    throw InvariantError("conductivity field has " + std::to_string(field.tensors.size()) + " tensors for " +
                         std::to_string(mesh.num_cells()) + " cells");
  const int nv = mesh.dim() + 1;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto e = element_stiffness(mesh, static_cast<int>(c), field.tensors[c]);
    const auto& cell = mesh.cell(static_cast<int>(c));
    for (int a = 0; a < nv; ++a)
      for (int b = 0; b < nv; ++b) out.add(row_offset + cell[a], col_offset + cell[b], e[a * nv + b]);
  }
}

CsrMatrix assemble_mass(const SimplicialMesh& mesh, double coeff) {
  TripletBuilder t(static_cast<int>(mesh.num_vertices()));
  t.reserve(mesh.num_cells() * (mesh.dim() + 1) * (mesh.dim() + 1));
  add_mass(t, mesh, coeff, 0, 0);
  auto m = t.finalize();
  m.set_symmetric(true);
  return m;
}

CsrMatrix assemble_stiffness(const SimplicialMesh& mesh, const ConductivityField& field) {
  TripletBuilder t(static_cast<int>(mesh.num_vertices()));
  t.reserve(mesh.num_cells() * (mesh.dim() + 1) * (mesh.dim() + 1));
  add_stiffness(t, mesh, field, 0, 0);
  auto m = t.finalize();
  m.set_symmetric(true);
  return m;
}

std::vector<double> lumped_mass(const SimplicialMesh& mesh) {
  std::vector<double> w(mesh.num_vertices(), 0.0);
  const int nv = mesh.dim() + 1;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const double share = mesh.cell_measure(static_cast<int>(c)) / nv;
    for (int a = 0; a < nv; ++a) w[mesh.cell(static_cast<int>(c))[a]] += share;
  }
  return w;
}

std::vector<double> assemble_load(const SimplicialMesh& mesh, std::span<const double> cell_source) {
  if (cell_source.size() != mesh.num_cells())
    throw InvariantError("cell source has " + std::to_string(cell_source.size()) + " entries for " +
                         std::to_string(mesh.num_cells()) + " cells");
  std::vector<double> f(mesh.num_vertices(), 0.0);
  const int nv = mesh.dim() + 1;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    if (cell_source[c] == 0.0) continue;
    const double share = cell_source[c] * mesh.cell_measure(static_cast<int>(c)) / nv;
    for (int a = 0; a < nv; ++a) f[mesh.cell(static_cast<int>(c))[a]] += share;
  }
  return f;
}

std::vector<double> assemble_load_nodal(const SimplicialMesh& mesh, std::span<const double> nodal_source) {
  if (nodal_source.size() != mesh.num_vertices()) throw InvariantError("nodal source size does not match mesh");
  std::vector<double> cell(mesh.num_cells());
  const int nv = mesh.dim() + 1;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    double s = 0.0;
    for (int a = 0; a < nv; ++a) s += nodal_source[mesh.cell(static_cast<int>(c))[a]];
    cell[c] = s / nv;
  }
  return assemble_load(mesh, cell);
}

namespace {

std::vector<double> dirichlet_values_by_node(int n, std::span<const int> nodes, std::span<const double> values,
                                             std::vector<char>& constrained) {
  if (nodes.size() != values.size()) throw InvariantError("Dirichlet nodes and values differ in size");
  std::vector<double> g(n, 0.0);
  constrained.assign(n, 0);
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const int i = nodes[k];
    if (i < 0 || i >= n) throw InvariantError("Dirichlet node " + std::to_string(i) + " out of range");
    if (constrained[i] && g[i] != values[k])
      throw InvariantError("Dirichlet node " + std::to_string(i) + " given conflicting values");
    constrained[i] = 1;
    g[i] = values[k];
  }
  return g;
}

}  // namespace

DirichletResult apply_dirichlet(const CsrMatrix& A, std::span<const double> b, std::span<const int> nodes,
                                std::span<const double> values) {
  const int n = A.size();
  std::vector<char> constrained;
  const auto g = dirichlet_values_by_node(n, nodes, values, constrained);
  DirichletResult out{A, std::vector<double>(b.begin(), b.end())};
  if (nodes.empty()) return out;
  auto& vals = out.A.mutable_values();
  const auto& rp = A.row_ptr();
  const auto& cols = A.cols();
  for (int i = 0; i < n; ++i) {
    for (int k = rp[i]; k < rp[i + 1]; ++k) {
      const int j = cols[k];
      if (constrained[i]) {
        vals[k] = (i == j) ? 1.0 : 0.0;
      } else if (constrained[j]) {
        out.b[i] -= vals[k] * g[j];
        vals[k] = 0.0;
      }
    }
    if (constrained[i]) out.b[i] = g[i];
  }
  for (int i = 0; i < n; ++i)
    if (constrained[i] && A.at(i, i) == 0.0 && out.A.at(i, i) != 1.0)
      throw InvariantError("Dirichlet node " + std::to_string(i) + " has no diagonal entry");
  return out;
}

DirichletSystem::DirichletSystem(const CsrMatrix& A, std::vector<int> nodes) : nodes_(std::move(nodes)) {
  const int n = A.size();
  constrained_.assign(n, 0);
  for (int i : nodes_) {
    if (i < 0 || i >= n) throw InvariantError("Dirichlet node " + std::to_string(i) + " out of range");
    constrained_[i] = 1;
  }
  TripletBuilder red(n), cpl(n);
  const auto& rp = A.row_ptr();
  for (int i = 0; i < n; ++i) {
    if (constrained_[i]) {
      red.add(i, i, 1.0);
      continue;
    }
    for (int k = rp[i]; k < rp[i + 1]; ++k) {
      const int j = A.cols()[k];
      if (constrained_[j])
        cpl.add(i, j, A.values()[k]);
      else
        red.add(i, j, A.values()[k]);
    }
  }
  reduced_ = red.finalize();
  reduced_.set_symmetric(A.symmetric());
  coupling_ = cpl.finalize();
}

std::vector<double> DirichletSystem::rhs(std::span<const double> b, std::span<const double> values) const {
  const int n = reduced_.size();
  if (values.size() != nodes_.size()) throw InvariantError("Dirichlet value count does not match node count");
  std::vector<double> g(n, 0.0);
  for (std::size_t k = 0; k < nodes_.size(); ++k) g[nodes_[k]] = values[k];
  std::vector<double> out = coupling_ * g;
  for (int i = 0; i < n; ++i) out[i] = constrained_[i] ? g[i] : (b.empty() ? 0.0 : b[i]) - out[i];
  return out;
}

}  // namespace cardio::fem
