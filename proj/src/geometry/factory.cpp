#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <unordered_map>

#include "cardio/geometry.hpp"
#include "curves.hpp"

namespace cardio::geometry {

using mesh::Facet;
using mesh::Simplex;
using mesh::SimplicialMesh;

namespace {

double orient2(const Point& a, const Point& b, const Point& c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

// Spatial hash of accepted points for minimum-distance thinning.
class PointHash {
 public:
  explicit PointHash(double cell) : cell_(cell) {}
  void add(const Point& p) {
    pts_.push_back(p);
    map_[key(ix(p[0]), ix(p[1]))].push_back(static_cast<int>(pts_.size()) - 1);
  }
  bool any_within(const Point& p, double r) const {
    const long r_cells = static_cast<long>(std::ceil(r / cell_));
    const long cx = ix(p[0]), cy = ix(p[1]);
    for (long dx = -r_cells; dx <= r_cells; ++dx)
      for (long dy = -r_cells; dy <= r_cells; ++dy) {
        const auto it = map_.find(key(cx + dx, cy + dy));
        if (it == map_.end()) continue;
        for (int k : it->second)
          if (std::hypot(pts_[k][0] - p[0], pts_[k][1] - p[1]) < r) return true;
      }
    return false;
  }

 private:
  long ix(double x) const { return static_cast<long>(std::floor(x / cell_)); }
  static long long key(long x, long y) { return (static_cast<long long>(x) << 32) ^ (y & 0xffffffffLL); }
  double cell_;
  std::vector<Point> pts_;
  std::unordered_map<long long, std::vector<int>> map_;
};

// Triangulated box minus a convex-ish hole polygon (ccw).
struct Annulus {
  std::vector<Point> vertices;  // hole polygon first, in order
  std::vector<std::array<int, 3>> triangles;
  std::vector<std::array<int, 2>> hole_edges;
  std::vector<std::array<int, 2>> box_edges;
};

double distance_to_box(const Point& p, double hx, double hy) {
  return std::min(hx - std::abs(p[0]), hy - std::abs(p[1]));
}

std::vector<Point> resample_loop(const std::vector<Point>& loop, double spacing, double phase) {
  std::vector<double> cum(loop.size() + 1, 0.0);
  for (std::size_t i = 0; i < loop.size(); ++i) cum[i + 1] = cum[i] + distance(loop[i], loop[(i + 1) % loop.size()]);
  const double total = cum.back();
  const int n = std::max(3, static_cast<int>(std::lround(total / spacing)));
  std::vector<Point> out;
  out.reserve(n);
  std::size_t seg = 0;
  for (int i = 0; i < n; ++i) {
    const double s = total * (i + phase) / n;
    while (seg + 1 < loop.size() && cum[seg + 1] < s) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double t = len > 0 ? (s - cum[seg]) / len : 0.0;
    out.push_back(loop[seg] + t * (loop[(seg + 1) % loop.size()] - loop[seg]));
  }
  return out;
}

Annulus triangulate_annulus(const std::vector<Point>& hole, const IdealGeometrySpec& spec) {
  const double hx = spec.torso_half[0], hy = spec.torso_half[1];
  const double hg = spec.h_torso_gamma, hs = spec.h_torso_sigma;
  auto size_at = [&](double d_gamma, double d_sigma) {
    d_gamma = std::max(d_gamma, 0.0);
    d_sigma = std::max(d_sigma, 0.0);
    const double den = d_gamma + d_sigma;
    return den > 0 ? hg + (hs - hg) * d_gamma / den : hg;
  };

  Annulus out;
  const int nh = static_cast<int>(hole.size());
  out.vertices = hole;
  for (int i = 0; i < nh; ++i) out.hole_edges.push_back({i, (i + 1) % nh});

  PointHash accepted(std::max(0.7 * hg, 1e-6));
  for (const auto& p : hole) accepted.add(p);

  // box boundary at spacing h_sigma, counter-clockwise from the lower-left corner
  const Point corners[4] = {{-hx, -hy, 0}, {hx, -hy, 0}, {hx, hy, 0}, {-hx, hy, 0}};
  const int box_first = static_cast<int>(out.vertices.size());
  for (int s = 0; s < 4; ++s) {
    const Point& a = corners[s];
    const Point& b = corners[(s + 1) % 4];
    const int n = std::max(1, static_cast<int>(std::lround(distance(a, b) / hs)));
    for (int k = 0; k < n; ++k) {
      const Point p = a + (static_cast<double>(k) / n) * (b - a);
      out.vertices.push_back(p);
      accepted.add(p);
    }
  }
  const int nbox = static_cast<int>(out.vertices.size()) - box_first;
  for (int k = 0; k < nbox; ++k) out.box_edges.push_back({box_first + k, box_first + (k + 1) % nbox});

  // interior candidates on outward offset rings of the hole
  std::mt19937 rng(spec.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<Point> normals(nh);
  for (int i = 0; i < nh; ++i) {
    const Point& prev = hole[(i + nh - 1) % nh];
    const Point& next = hole[(i + 1) % nh];
    Point n{next[1] - prev[1], -(next[0] - prev[0]), 0.0};
    normals[i] = (1.0 / norm(n)) * n;
  }
  const double far = std::hypot(2 * hx, 2 * hy);
  double d = 0.0;
  int ring = 0;
  while (d < far) {
    double h_min = 1e300;
    std::vector<Point> offset(nh);
    for (int i = 0; i < nh; ++i) {
      offset[i] = hole[i] + d * normals[i];
      const double ds = distance_to_box(offset[i], hx, hy);
      if (ds > 0) h_min = std::min(h_min, size_at(d, ds));
    }
    if (h_min > 1e299) break;
    const double step = 0.866 * h_min;
    d += step;
    ++ring;
    for (int i = 0; i < nh; ++i) offset[i] = hole[i] + d * normals[i];
    const auto cand = resample_loop(offset, h_min, 0.5 * (ring % 2));
    for (Point p : cand) {
      const double ds0 = distance_to_box(p, hx, hy);
      if (ds0 <= 0) continue;
      const double h = size_at(d, ds0);
      p[0] += 0.12 * h * unit(rng);
      p[1] += 0.12 * h * unit(rng);
      const double ds = distance_to_box(p, hx, hy);
      if (ds < 0.5 * h) continue;
      if (detail::point_in_polygon(hole, p)) continue;
      if (detail::distance_to_polyline(hole, p) < 0.5 * hg) continue;
      if (accepted.any_within(p, 0.7 * h)) continue;
      accepted.add(p);
      out.vertices.push_back(p);
    }
  }

  // ghost layer outside the box keeps the box edges Delaunay; phantom centre fills the hole
  std::vector<Point> all = out.vertices;
  const int ghost_first = static_cast<int>(all.size());
  for (int s = 0; s < 4; ++s) {
    const Point& a = corners[s];
    const Point& b = corners[(s + 1) % 4];
    const Point dir = (1.0 / distance(a, b)) * (b - a);
    const Point outward{dir[1], -dir[0], 0.0};
    const int n = std::max(1, static_cast<int>(std::lround(distance(a, b) / hs)));
    for (int k = 0; k <= n; ++k) all.push_back(a + (static_cast<double>(k) / n) * (b - a) + hs * outward);
  }
  Point centroid{0, 0, 0};
  for (const auto& p : hole) centroid = centroid + p;
  centroid = (1.0 / nh) * centroid;
  all.push_back(centroid);

  const auto tris = delaunay(all);
  for (const auto& t : tris) {
    if (t[0] >= ghost_first || t[1] >= ghost_first || t[2] >= ghost_first) continue;
    const Point c = (1.0 / 3.0) * (all[t[0]] + all[t[1]] + all[t[2]]);
    if (detail::point_in_polygon(hole, c)) continue;
    if (orient2(all[t[0]], all[t[1]], all[t[2]]) <= 1e-12) throw InvariantError("degenerate torso triangle");
    out.triangles.push_back(t);
  }
  return out;
}

SimplicialMesh build_2d(std::vector<Point> vertices, const std::vector<std::array<int, 3>>& tris, int region,
                        const std::vector<std::array<int, 2>>& gamma_edges,
                        const std::vector<std::array<int, 2>>& sigma_edges) {
  std::vector<Simplex> cells;
  cells.reserve(tris.size());
  for (const auto& t : tris) cells.push_back({t[0], t[1], t[2], -1});
  // every boundary edge must be one of the labeled curve edges
  std::map<std::pair<int, int>, int> labels;
  for (const auto& e : gamma_edges) labels[{std::min(e[0], e[1]), std::max(e[0], e[1])}] = mesh::kGamma;
  for (const auto& e : sigma_edges) labels[{std::min(e[0], e[1]), std::max(e[0], e[1])}] = mesh::kSigmaExt;
  const auto boundary = mesh::find_boundary_facets(2, cells);
  if (boundary.size() != labels.size())
    throw InvariantError("generated mesh boundary has " + std::to_string(boundary.size()) + " edges, expected " +
                         std::to_string(labels.size()));
  std::vector<Facet> facets;
  std::vector<int> facet_label;
  for (const auto& e : gamma_edges) {
    facets.push_back({e[0], e[1], -1});
    facet_label.push_back(mesh::kGamma);
  }
  for (const auto& e : sigma_edges) {
    facets.push_back({e[0], e[1], -1});
    facet_label.push_back(mesh::kSigmaExt);
  }
  for (const auto& f : boundary)
    if (!labels.count({std::min(f[0], f[1]), std::max(f[0], f[1])}))
      throw InvariantError("generated mesh has an unexpected boundary edge");
  // drop unreferenced vertices
  std::vector<int> remap(vertices.size(), -1);
  std::vector<Point> used;
  for (const auto& c : cells)
    for (int k = 0; k < 3; ++k) remap[c[k]] = -2;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    if (remap[i] == -2) {
      remap[i] = static_cast<int>(used.size());
      used.push_back(vertices[i]);
    }
  for (auto& c : cells)
    for (int k = 0; k < 3; ++k) c[k] = remap[c[k]];
  for (auto& f : facets)
    for (int k = 0; k < 2; ++k) f[k] = remap[f[k]];
  std::vector<int> regions(cells.size(), region);
  return SimplicialMesh(2, std::move(used), std::move(cells), std::move(regions), std::move(facets),
                        std::move(facet_label));
}

SimplicialMesh heart_2d(const IdealGeometrySpec& spec) {
  const auto disc = detail::ring_disc(spec.heart_center, spec.heart_semi_axes[0], spec.heart_semi_axes[1],
                                      spec.h_heart, 0.0);
  for (const auto& t : disc.triangles)
    if (orient2(disc.vertices[t[0]], disc.vertices[t[1]], disc.vertices[t[2]]) <= 0.0)
      throw InvariantError("heart ring triangulation produced a folded triangle");
  std::vector<std::array<int, 2>> edges;
  const int n = static_cast<int>(disc.boundary.size());
  for (int i = 0; i < n; ++i) edges.push_back({disc.boundary[i], disc.boundary[(i + 1) % n]});
  return build_2d(disc.vertices, disc.triangles, kHeartRegion, edges, {});
}

SimplicialMesh torso_2d(const std::vector<Point>& hole, const IdealGeometrySpec& spec) {
  const auto ann = triangulate_annulus(hole, spec);
  return build_2d(ann.vertices, ann.triangles, kTorsoRegion, ann.hole_edges, ann.box_edges);
}

// ---------------------------------------------------------------- 3D extrusion

std::vector<double> uniform_levels(double z0, double z1, double h) {
  const int n = std::max(1, static_cast<int>(std::lround((z1 - z0) / h)));
  std::vector<double> z(n + 1);
  for (int k = 0; k <= n; ++k) z[k] = z0 + (z1 - z0) * k / n;
  return z;
}

// levels over [-tz, tz] containing the given inner levels, graded outward
std::vector<double> graded_levels(const std::vector<double>& inner, double tz, double h0, double h1) {
  std::vector<double> up, down;
  double z = inner.back(), h = h0;
  while (tz - z > 1.5 * h) {
    h = std::min(h1, h * 1.3);
    z += h;
    up.push_back(z);
  }
  up.push_back(tz);
  z = inner.front();
  h = h0;
  while (z + tz > 1.5 * h) {
    h = std::min(h1, h * 1.3);
    z -= h;
    down.push_back(z);
  }
  down.push_back(-tz);
  std::vector<double> out(down.rbegin(), down.rend());
  out.insert(out.end(), inner.begin(), inner.end());
  out.insert(out.end(), up.begin(), up.end());
  return out;
}

// prism over triangle with 2D ids sorted ascending: three tets with consistent diagonals
void split_prism(std::array<int, 3> tri, int layer, int per_layer, std::vector<Simplex>& out) {
  std::sort(tri.begin(), tri.end());
  auto a = [&](int k) { return layer * per_layer + tri[k]; };
  auto b = [&](int k) { return (layer + 1) * per_layer + tri[k]; };
  out.push_back({a(0), a(1), a(2), b(2)});
  out.push_back({a(0), a(1), b(1), b(2)});
  out.push_back({a(0), b(0), b(1), b(2)});
}

SimplicialMesh extrude(const std::vector<Point>& v2, const std::vector<std::array<int, 3>>& tris,
                       const std::vector<double>& levels, const std::vector<char>& keep_cell_layer,
                       const std::vector<int>& region_of_layer_cell, const Point& box_half, bool torso) {
  const int per_layer = static_cast<int>(v2.size());
  const int layers = static_cast<int>(levels.size()) - 1;
  std::vector<Point> verts;
  verts.reserve(v2.size() * levels.size());
  for (double z : levels)
    for (const auto& p : v2) verts.push_back({p[0], p[1], z});
  std::vector<Simplex> cells;
  std::vector<int> regions;
  for (int l = 0; l < layers; ++l)
    for (std::size_t t = 0; t < tris.size(); ++t) {
      if (!keep_cell_layer[l * tris.size() + t]) continue;
      split_prism(tris[t], l, per_layer, cells);
      for (int k = 0; k < 3; ++k) regions.push_back(region_of_layer_cell[l * tris.size() + t]);
    }
  // compact vertices
  std::vector<int> remap(verts.size(), -1);
  std::vector<Point> used;
  for (const auto& c : cells)
    for (int k = 0; k < 4; ++k) remap[c[k]] = -2;
  for (std::size_t i = 0; i < verts.size(); ++i)
    if (remap[i] == -2) {
      remap[i] = static_cast<int>(used.size());
      used.push_back(verts[i]);
    }
  for (auto& c : cells)
    for (int k = 0; k < 4; ++k) c[k] = remap[c[k]];
  auto facets = mesh::find_boundary_facets(3, cells);
  std::vector<int> labels;
  const double tol = 1e-9;
  for (const auto& f : facets) {
    int label = mesh::kGamma;
    if (torso) {
      for (int ax = 0; ax < 3; ++ax) {
        bool on = true;
        for (int k = 0; k < 3 && on; ++k) {
          const double x = used[f[k]][ax];
          on = std::abs(std::abs(x) - box_half[ax]) < tol * std::max(1.0, box_half[ax]) &&
               (x > 0) == (used[f[0]][ax] > 0);
        }
        if (on) label = mesh::kSigmaExt;
      }
    }
    labels.push_back(label);
  }
  return SimplicialMesh(3, std::move(used), std::move(cells), std::move(regions), std::move(facets),
                        std::move(labels));
}

// union of the hole-filling disc (vertices first, same order) and an annulus
struct Union2D {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> tris;
  std::vector<char> in_disc;  // per triangle
};

Union2D union_2d(const detail::RingDisc& disc, const IdealGeometrySpec& spec) {
  std::vector<Point> hole;
  for (int i : disc.boundary) hole.push_back(disc.vertices[i]);
  const auto ann = triangulate_annulus(hole, spec);
  Union2D u;
  u.vertices = disc.vertices;
  std::vector<int> map(ann.vertices.size());
  for (std::size_t i = 0; i < ann.vertices.size(); ++i) {
    if (i < hole.size()) {
      map[i] = disc.boundary[i];
    } else {
      map[i] = static_cast<int>(u.vertices.size());
      u.vertices.push_back(ann.vertices[i]);
    }
  }
  for (const auto& t : disc.triangles) {
    u.tris.push_back(t);
    u.in_disc.push_back(1);
  }
  for (const auto& t : ann.triangles) {
    u.tris.push_back({map[t[0]], map[t[1]], map[t[2]]});
    u.in_disc.push_back(0);
  }
  return u;
}

MeshPair generate_3d(const IdealGeometrySpec& spec) {
  const double a = spec.heart_semi_axes[0], b = spec.heart_semi_axes[1], c = spec.heart_semi_axes[2];
  const double cz = spec.heart_center[2];
  Point center2{spec.heart_center[0], spec.heart_center[1], 0.0};
  const auto heart_disc = detail::ring_disc(center2, a, b, spec.h_heart, 0.0);
  const auto heart_levels = uniform_levels(cz - c, cz + c, spec.h_heart);

  MeshPair out;
  {
    const std::size_t nt = heart_disc.triangles.size();
    const int layers = static_cast<int>(heart_levels.size()) - 1;
    std::vector<char> keep(nt * layers, 1);
    std::vector<int> reg(nt * layers, kHeartRegion);
    out.heart = extrude(heart_disc.vertices, heart_disc.triangles, heart_levels, keep, reg, spec.torso_half, false);
  }
  const auto torso_disc =
      spec.conforming ? heart_disc : detail::ring_disc(center2, a, b, spec.h_torso_gamma, 0.5);
  const auto inner = spec.conforming ? heart_levels : uniform_levels(cz - c, cz + c, spec.h_torso_gamma);
  const auto levels = graded_levels(inner, spec.torso_half[2], spec.h_torso_gamma, spec.h_torso_sigma);
  const auto u = union_2d(torso_disc, spec);
  const std::size_t nt = u.tris.size();
  const int layers = static_cast<int>(levels.size()) - 1;
  std::vector<char> keep(nt * layers, 1);
  std::vector<int> reg(nt * layers, kTorsoRegion);
  for (int l = 0; l < layers; ++l) {
    const double zm = 0.5 * (levels[l] + levels[l + 1]);
    const bool in_band = zm > cz - c && zm < cz + c;
    for (std::size_t t = 0; t < nt; ++t)
      if (in_band && u.in_disc[t]) keep[l * nt + t] = 0;
  }
  out.torso = extrude(u.vertices, u.tris, levels, keep, reg, spec.torso_half, true);
  return out;
}

}  // namespace

void IdealGeometrySpec::validate() const {
  if (dim != 2 && dim != 3) throw InvariantError("geometry dim must be 2 or 3");
  if (!(h_heart > 0 && h_torso_gamma > 0 && h_torso_sigma > 0)) throw InvariantError("mesh sizes must be positive");
  for (int k = 0; k < dim; ++k)
    if (!(torso_half[k] > 0 && heart_semi_axes[k] > 0)) throw InvariantError("extents must be positive");
  const double margin = 2.0 * std::max({h_heart, h_torso_gamma, h_torso_sigma});
  for (int k = 0; k < dim; ++k) {
    const double lo = heart_center[k] - heart_semi_axes[k], hi = heart_center[k] + heart_semi_axes[k];
    if (lo - margin < -torso_half[k] || hi + margin > torso_half[k])
      throw InvariantError("heart is too close to the torso wall (axis " + std::to_string(k) + ")");
  }
}

SimplicialMesh generate_heart(const IdealGeometrySpec& spec) {
  spec.validate();
  if (spec.dim == 3) return generate_3d(spec).heart;
  return heart_2d(spec);
}

MeshPair generate_pair(const IdealGeometrySpec& spec) {
  spec.validate();
  if (spec.dim == 3) return generate_3d(spec);
  MeshPair out;
  out.heart = heart_2d(spec);
  if (spec.conforming) {
    out.torso = generate_torso_around(out.heart, spec);
  } else {
    const double a = spec.heart_semi_axes[0], b = spec.heart_semi_axes[1];
    const int n = detail::loop_count(detail::ellipse_perimeter(a, b), spec.h_torso_gamma);
    out.torso = torso_2d(detail::ellipse_points(spec.heart_center, a, b, n, 0.5), spec);
  }
  return out;
}

SimplicialMesh generate_torso_around(const SimplicialMesh& heart, const IdealGeometrySpec& spec) {
  if (heart.dim() != 2) throw InvariantError("generate_torso_around supports 2D meshes only");
  const auto loop = boundary_loop(heart, mesh::kGamma);
  std::vector<Point> hole;
  for (int i : loop) hole.push_back(heart.vertex(i));
  for (const auto& p : hole)
    if (distance_to_box(p, spec.torso_half[0], spec.torso_half[1]) < 2.0 * spec.h_torso_sigma)
      throw InvariantError("heart is too close to the torso wall");
  return torso_2d(hole, spec);
}

std::vector<int> boundary_loop(const SimplicialMesh& mesh, int label) {
  if (mesh.dim() != 2) throw InvariantError("boundary_loop needs a 2D mesh");
  std::unordered_map<int, std::vector<int>> adj;
  for (std::size_t f = 0; f < mesh.num_facets(); ++f) {
    if (mesh.facet_label()[f] != label) continue;
    const auto& e = mesh.facets()[f];
    adj[e[0]].push_back(e[1]);
    adj[e[1]].push_back(e[0]);
  }
  if (adj.empty()) throw InvariantError("label " + std::to_string(label) + " not present in mesh");
  int start = adj.begin()->first;
  for (const auto& [v, nb] : adj) {
    if (nb.size() != 2) throw InvariantError("labeled boundary is not a simple closed curve");
    start = std::min(start, v);
  }
  std::vector<int> loop{start};
  int prev = start, cur = std::min(adj[start][0], adj[start][1]);
  while (cur != start) {
    loop.push_back(cur);
    const auto& nb = adj[cur];
    const int next = nb[0] == prev ? nb[1] : nb[0];
    prev = cur;
    cur = next;
    if (loop.size() > adj.size()) throw InvariantError("labeled boundary is not a single closed curve");
  }
  if (loop.size() != adj.size()) throw InvariantError("labeled boundary has more than one component");
  std::vector<Point> pts;
  for (int i : loop) pts.push_back(mesh.vertex(i));
  if (detail::polygon_area(pts) < 0) std::reverse(loop.begin() + 1, loop.end());
  return loop;
}

SimplicialMesh rectangle_mesh(double x0, double x1, double y0, double y1, int nx, int ny, int label, int region) {
  if (nx < 1 || ny < 1 || !(x1 > x0) || !(y1 > y0)) throw InvariantError("invalid rectangle");
  std::vector<Point> v;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) v.push_back({x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny, 0.0});
  auto id = [&](int i, int j) { return j * (nx + 1) + i; };
  std::vector<Simplex> cells;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
      if ((i + j) % 2 == 0) {
        cells.push_back({a, b, c, -1});
        cells.push_back({a, c, d, -1});
      } else {
        cells.push_back({a, b, d, -1});
        cells.push_back({b, c, d, -1});
      }
    }
  std::vector<Facet> facets;
  for (int i = 0; i < nx; ++i) {
    facets.push_back({id(i, 0), id(i + 1, 0), -1});
    facets.push_back({id(i, ny), id(i + 1, ny), -1});
  }
  for (int j = 0; j < ny; ++j) {
    facets.push_back({id(0, j), id(0, j + 1), -1});
    facets.push_back({id(nx, j), id(nx, j + 1), -1});
  }
  std::vector<int> labels(facets.size(), label);
  std::vector<int> regions(cells.size(), region);
  return SimplicialMesh(2, std::move(v), std::move(cells), std::move(regions), std::move(facets), std::move(labels));
}

double mean_edge_length(const SimplicialMesh& mesh) {
  double s = 0.0;
  long count = 0;
  const int nv = mesh.dim() + 1;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto& cell = mesh.cell(static_cast<int>(c));
    for (int a = 0; a < nv; ++a)
      for (int b = a + 1; b < nv; ++b) {
        s += distance(mesh.vertex(cell[a]), mesh.vertex(cell[b]));
        ++count;
      }
  }
  return count ? s / count : 0.0;
}

}  // namespace cardio::geometry
