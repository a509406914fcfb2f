#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <unordered_map>

#include "cardio/mesh.hpp"

namespace cardio::mesh {

namespace {

// Closest point on segment ab; returns weights (wa, wb).
std::array<double, 3> closest_on_segment(const Point& a, const Point& b, const Point& p) {
  const Point ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return {1.0 - t, t, 0.0};
}

// Closest point on triangle abc (Ericson, Real-Time Collision Detection 5.1.5).
std::array<double, 3> closest_on_triangle(const Point& a, const Point& b, const Point& c, const Point& p) {
  const Point ab = b - a, ac = c - a, ap = p - a;
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return {1.0, 0.0, 0.0};
  const Point bp = p - b;
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return {0.0, 1.0, 0.0};
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return {1.0 - v, v, 0.0};
  }
  const Point cp = p - c;
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return {0.0, 0.0, 1.0};
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return {1.0 - w, 0.0, w};
  }
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return {0.0, 1.0 - w, w};
  }
  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom, w = vc * denom;
  return {1.0 - v - w, v, w};
}

}  // namespace

SurfaceLocation closest_point_on_facet(int dim, std::span<const Point> facet, const Point& p) {
  SurfaceLocation loc;
  loc.weights = dim == 2 ? closest_on_segment(facet[0], facet[1], p) : closest_on_triangle(facet[0], facet[1], facet[2], p);
  Point q{0.0, 0.0, 0.0};
  for (int k = 0; k < dim; ++k) q = q + loc.weights[k] * facet[k];
  loc.distance = distance(p, q);
  return loc;
}

SurfacePatch::SurfacePatch(int dim, int label, std::vector<Facet> facets, std::vector<Point> normals,
                           std::vector<double> measures, std::vector<Point> coords)
    : dim_(dim),
      label_(label),
      facets_(std::move(facets)),
      normals_(std::move(normals)),
      measures_(std::move(measures)),
      coords_(std::move(coords)) {
  std::map<int, double> lumped;
  for (std::size_t f = 0; f < facets_.size(); ++f) {
    total_ += measures_[f];
    for (int k = 0; k < dim_; ++k) lumped[facets_[f][k]] += measures_[f] / dim_;
  }
  for (const auto& [v, w] : lumped) {
    vertices_.push_back(v);
    lumped_.push_back(w);
  }
  build_grid();
}

void SurfacePatch::build_grid() {
  if (facets_.empty()) return;
  Point lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(), std::numeric_limits<double>::max()};
  Point hi{-lo[0], -lo[1], -lo[2]};
  for (const auto& p : coords_)
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  const int na = dim_;
  double extent = 0.0;
  for (int a = 0; a < na; ++a) extent = std::max(extent, hi[a] - lo[a]);
  if (extent <= 0.0) extent = 1.0;
  // about 2^dim cells per facet overall
  const double target = std::max(1.0, 2.0 * std::pow(static_cast<double>(facets_.size()), 1.0 / dim_));
  const double cell = extent / target;
  grid_lo_ = lo;
  for (int a = 0; a < 3; ++a) {
    if (a < na) {
      grid_n_[a] = std::max(1, std::min(512, static_cast<int>(std::ceil((hi[a] - lo[a]) / cell))));
      cell_size_[a] = std::max((hi[a] - lo[a]) / grid_n_[a], 1e-12);
    } else {
      grid_n_[a] = 1;
      cell_size_[a] = 1.0;
    }
  }
  const std::size_t ncell = static_cast<std::size_t>(grid_n_[0]) * grid_n_[1] * grid_n_[2];
  std::vector<std::vector<int>> bins(ncell);
  for (std::size_t f = 0; f < facets_.size(); ++f) {
    std::array<int, 3> i0{0, 0, 0}, i1{0, 0, 0};
    for (int a = 0; a < na; ++a) {
      double mn = std::numeric_limits<double>::max(), mx = -mn;
      for (int k = 0; k < dim_; ++k) {
        mn = std::min(mn, coords_[f * 3 + k][a]);
        mx = std::max(mx, coords_[f * 3 + k][a]);
      }
      i0[a] = std::clamp(static_cast<int>(std::floor((mn - grid_lo_[a]) / cell_size_[a])), 0, grid_n_[a] - 1);
      i1[a] = std::clamp(static_cast<int>(std::floor((mx - grid_lo_[a]) / cell_size_[a])), 0, grid_n_[a] - 1);
    }
    for (int z = i0[2]; z <= i1[2]; ++z)
      for (int y = i0[1]; y <= i1[1]; ++y)
        for (int x = i0[0]; x <= i1[0]; ++x)
          bins[(static_cast<std::size_t>(z) * grid_n_[1] + y) * grid_n_[0] + x].push_back(static_cast<int>(f));
  }
  grid_start_.assign(ncell + 1, 0);
  for (std::size_t c = 0; c < ncell; ++c) grid_start_[c + 1] = grid_start_[c] + static_cast<int>(bins[c].size());
  grid_items_.reserve(grid_start_.back());
  for (const auto& b : bins) grid_items_.insert(grid_items_.end(), b.begin(), b.end());
}

void SurfacePatch::visit(const Point& p, int f, SurfaceLocation& best) const {
  const auto loc = closest_point_on_facet(dim_, std::span<const Point>(&coords_[f * 3], dim_), p);
  if (best.facet < 0 || loc.distance < best.distance || (loc.distance == best.distance && f < best.facet)) {
    best = loc;
    best.facet = f;
  }
}

SurfaceLocation SurfacePatch::locate_brute_force(const Point& p) const {
  SurfaceLocation best;
  for (std::size_t f = 0; f < facets_.size(); ++f) visit(p, static_cast<int>(f), best);
  return best;
}

SurfaceLocation SurfacePatch::locate(const Point& p) const {
  if (facets_.empty()) throw Error("locate on an empty surface patch");
  std::array<int, 3> q{0, 0, 0};
  for (int a = 0; a < 3; ++a)
    q[a] = std::clamp(static_cast<int>(std::floor((p[a] - grid_lo_[a]) / cell_size_[a])), 0, grid_n_[a] - 1);
  double min_cell = std::numeric_limits<double>::max();
  int max_ring = 0;
  for (int a = 0; a < dim_; ++a) {
    if (grid_n_[a] > 1) min_cell = std::min(min_cell, cell_size_[a]);
    max_ring = std::max(max_ring, std::max(q[a], grid_n_[a] - 1 - q[a]));
  }
  SurfaceLocation best;
  for (int r = 0; r <= max_ring; ++r) {
    const int zr = grid_n_[2] > 1 ? r : 0;
    for (int z = q[2] - zr; z <= q[2] + zr; ++z) {
      if (z < 0 || z >= grid_n_[2]) continue;
      for (int y = q[1] - r; y <= q[1] + r; ++y) {
        if (y < 0 || y >= grid_n_[1]) continue;
        for (int x = q[0] - r; x <= q[0] + r; ++x) {
          if (x < 0 || x >= grid_n_[0]) continue;
          // ring r only: skip the interior already visited
          if (std::max({std::abs(x - q[0]), std::abs(y - q[1]), std::abs(z - q[2])}) != r) continue;
          const std::size_t c = (static_cast<std::size_t>(z) * grid_n_[1] + y) * grid_n_[0] + x;
          for (int i = grid_start_[c]; i < grid_start_[c + 1]; ++i) visit(p, grid_items_[i], best);
        }
      }
    }
    // cells of ring r+1 and beyond are at least r*min_cell away
    if (best.facet >= 0 && best.distance < r * min_cell) break;
  }
  return best;
}

SurfacePatch extract_boundary(const SimplicialMesh& mesh, int label) {
  if (!mesh.has_label(label)) throw Error("surface label " + std::to_string(label) + " not present in mesh");
  const int dim = mesh.dim();
  // map sorted facet -> opposite vertex of its cell
  std::unordered_map<std::uint64_t, int> opposite;
  auto key_of = [&](Facet f) {
    std::sort(f.begin(), f.begin() + dim);
    std::uint64_t key = 0;
    for (int k = 0; k < dim; ++k) key = (key << 21) | static_cast<std::uint64_t>(f[k]);
    return key;
  };
  for (const auto& cell : mesh.cells())
    for (int skip = 0; skip <= dim; ++skip) {
      Facet f{-1, -1, -1};
      int k = 0;
      for (int j = 0; j <= dim; ++j)
        if (j != skip) f[k++] = cell[j];
      opposite[key_of(f)] = cell[skip];
    }
  std::vector<Facet> facets;
  std::vector<Point> normals, coords;
  std::vector<double> measures;
  for (std::size_t i = 0; i < mesh.num_facets(); ++i) {
    if (mesh.facet_label()[i] != label) continue;
    const Facet& f = mesh.facets()[i];
    const Point& a = mesh.vertex(f[0]);
    const Point& b = mesh.vertex(f[1]);
    Point n;
    double measure;
    if (dim == 2) {
      const Point t = b - a;
      measure = norm(t);
      n = {t[1] / measure, -t[0] / measure, 0.0};
    } else {
      const Point c = mesh.vertex(f[2]);
      const Point cr = cross(b - a, c - a);
      const double len = norm(cr);
      measure = 0.5 * len;
      n = (1.0 / len) * cr;
    }
    const Point& opp = mesh.vertex(opposite.at(key_of(f)));
    if (dot(n, opp - a) > 0.0) n = -1.0 * n;
    facets.push_back(f);
    normals.push_back(n);
    measures.push_back(measure);
    for (int k = 0; k < 3; ++k) coords.push_back(k < dim ? mesh.vertex(f[k]) : Point{0.0, 0.0, 0.0});
  }
  return SurfacePatch(dim, label, std::move(facets), std::move(normals), std::move(measures), std::move(coords));
}

}  // namespace cardio::mesh
