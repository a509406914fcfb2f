#include "cardio/mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <unordered_map>

namespace cardio::mesh {

namespace {

std::uint64_t facet_key(const Facet& f, int nv) {
  std::uint64_t key = 0;
  for (int k = 0; k < nv; ++k) key = (key << 21) | static_cast<std::uint64_t>(f[k]);
  return key;
}

Facet sorted_facet(const Facet& f, int nv) {
  Facet s = f;
  std::sort(s.begin(), s.begin() + nv);
  for (int k = nv; k < 3; ++k) s[k] = -1;
  return s;
}

// Faces of a simplex opposite each local vertex.
template <typename Fn>
void for_each_face(int dim, const Simplex& c, Fn&& fn) {
  const int nv = dim + 1;
  for (int skip = 0; skip < nv; ++skip) {
    Facet f{-1, -1, -1};
    int k = 0;
    for (int j = 0; j < nv; ++j)
      if (j != skip) f[k++] = c[j];
    fn(f, skip);
  }
}

}  // namespace

double simplex_measure(int dim, std::span<const Point> pts) {
  const Point a = pts[1] - pts[0];
  const Point b = pts[2] - pts[0];
  if (dim == 2) return 0.5 * (a[0] * b[1] - a[1] * b[0]);
  const Point c = pts[3] - pts[0];
  return dot(a, cross(b, c)) / 6.0;
}

SimplicialMesh::SimplicialMesh(int dim, std::vector<Point> vertices, std::vector<Simplex> cells,
                               std::vector<int> cell_region, std::vector<Facet> facets,
                               std::vector<int> facet_label)
    : dim_(dim),
      vertices_(std::move(vertices)),
      cells_(std::move(cells)),
      cell_region_(std::move(cell_region)),
      facets_(std::move(facets)),
      facet_label_(std::move(facet_label)) {
  if (dim_ != 2 && dim_ != 3) throw InvariantError("mesh dimension must be 2 or 3, got " + std::to_string(dim_));
  if (cell_region_.size() != cells_.size()) throw InvariantError("cell_region size differs from cell count");
  if (facet_label_.size() != facets_.size()) throw InvariantError("facet_label size differs from facet count");
  const int nv = static_cast<int>(vertices_.size());
  if (nv >= (1 << 21)) throw InvariantError("too many vertices for facet hashing");
  for (auto& p : vertices_)
    if (dim_ == 2) p[2] = 0.0;

  for (std::size_t c = 0; c < cells_.size(); ++c) {
    auto& cell = cells_[c];
    for (int k = 0; k <= dim_; ++k)
      if (cell[k] < 0 || cell[k] >= nv)
        throw InvariantError("cell " + std::to_string(c) + " references vertex " + std::to_string(cell[k]) +
                             " out of range [0," + std::to_string(nv) + ")");
    for (int k = dim_ + 1; k < 4; ++k) cell[k] = -1;
    double m = cell_measure(static_cast<int>(c));
    if (m < 0.0) {
      std::swap(cell[dim_ - 1], cell[dim_]);
      m = -m;
    }
    if (m < kDegenerateMeasure)
      throw InvariantError("cell " + std::to_string(c) + " is degenerate (measure " + std::to_string(m) + ")");
  }

  std::unordered_map<std::uint64_t, int> face_count;
  face_count.reserve(cells_.size() * (dim_ + 1));
  for (const auto& cell : cells_)
    for_each_face(dim_, cell, [&](const Facet& f, int) { ++face_count[facet_key(sorted_facet(f, dim_), dim_)]; });

  for (std::size_t i = 0; i < facets_.size(); ++i) {
    auto& f = facets_[i];
    for (int k = 0; k < dim_; ++k)
      if (f[k] < 0 || f[k] >= nv)
        throw InvariantError("facet " + std::to_string(i) + " references vertex " + std::to_string(f[k]) +
                             " out of range [0," + std::to_string(nv) + ")");
    for (int k = dim_; k < 3; ++k) f[k] = -1;
    auto it = face_count.find(facet_key(sorted_facet(f, dim_), dim_));
    if (it == face_count.end() || it->second != 1)
      throw InvariantError("facet " + std::to_string(i) + " is not a face of exactly one cell");
  }
}

double SimplicialMesh::cell_measure(int c) const {
  std::array<Point, 4> pts{};
  for (int k = 0; k <= dim_; ++k) pts[k] = vertices_[cells_[c][k]];
  return simplex_measure(dim_, std::span<const Point>(pts.data(), dim_ + 1));
}

Point SimplicialMesh::cell_centroid(int c) const {
  Point s{0.0, 0.0, 0.0};
  for (int k = 0; k <= dim_; ++k) s = s + vertices_[cells_[c][k]];
  return (1.0 / (dim_ + 1)) * s;
}

std::vector<int> SimplicialMesh::labeled_vertices(int label) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < facets_.size(); ++i)
    if (facet_label_[i] == label)
      for (int k = 0; k < dim_; ++k) out.push_back(facets_[i][k]);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool SimplicialMesh::has_label(int label) const {
  return std::find(facet_label_.begin(), facet_label_.end(), label) != facet_label_.end();
}

std::vector<Facet> find_boundary_facets(int dim, std::span<const Simplex> cells) {
  std::unordered_map<std::uint64_t, int> count;
  std::vector<Facet> order;
  for (const auto& cell : cells)
    for_each_face(dim, cell, [&](const Facet& f, int) {
      const Facet s = sorted_facet(f, dim);
      auto [it, inserted] = count.emplace(facet_key(s, dim), 0);
      if (inserted) order.push_back(s);
      ++it->second;
    });
  std::vector<Facet> out;
  for (const auto& f : order)
    if (count[facet_key(f, dim)] == 1) out.push_back(f);
  return out;
}

}  // namespace cardio::mesh
