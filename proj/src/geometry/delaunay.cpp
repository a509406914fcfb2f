#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "cardio/geometry.hpp"

namespace cardio::geometry {

namespace {

double orient(const Point& a, const Point& b, const Point& c) {
  return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

// > 0 when d lies inside the circumcircle of ccw (a, b, c)
double incircle(const Point& a, const Point& b, const Point& c, const Point& d) {
  const double adx = a[0] - d[0], ady = a[1] - d[1];
  const double bdx = b[0] - d[0], bdy = b[1] - d[1];
  const double cdx = c[0] - d[0], cdy = c[1] - d[1];
  const double ad = adx * adx + ady * ady, bd = bdx * bdx + bdy * bdy, cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
}

struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> n;  // n[k] is across the edge opposite v[k]
  bool alive = true;
};

class Triangulator {
 public:
  explicit Triangulator(std::span<const Point> input) : pts_(input.begin(), input.end()) {
    double lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
    for (const auto& p : pts_)
      for (int k = 0; k < 2; ++k) {
        lo[k] = std::min(lo[k], p[k]);
        hi[k] = std::max(hi[k], p[k]);
      }
    const double span = std::max({hi[0] - lo[0], hi[1] - lo[1], 1e-12});
    const double cx = 0.5 * (lo[0] + hi[0]), cy = 0.5 * (lo[1] + hi[1]);
    const double r = 50.0 * span;
    super_ = static_cast<int>(pts_.size());
    pts_.push_back({cx - r, cy - r, 0.0});
    pts_.push_back({cx + r, cy - r, 0.0});
    pts_.push_back({cx, cy + r, 0.0});
    tris_.push_back({{super_, super_ + 1, super_ + 2}, {-1, -1, -1}, true});
  }

  void insert(int p) {
    const int t0 = locate(p);
    std::vector<int> cavity{t0};
    std::vector<char> in_cavity(tris_.size(), 0);
    in_cavity[t0] = 1;
    for (std::size_t k = 0; k < cavity.size(); ++k) {
      const Tri& t = tris_[cavity[k]];
      for (int e = 0; e < 3; ++e) {
        const int nb = t.n[e];
        if (nb < 0 || in_cavity[nb]) continue;
        const Tri& u = tris_[nb];
        if (incircle(pts_[u.v[0]], pts_[u.v[1]], pts_[u.v[2]], pts_[p]) > 0.0) {
          in_cavity[nb] = 1;
          cavity.push_back(nb);
        }
      }
    }
    // keep the cavity star-shaped with respect to p
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t k = 0; k < cavity.size(); ++k) {
        const int ti = cavity[k];
        if (ti == t0) continue;
        const Tri& t = tris_[ti];
        for (int e = 0; e < 3; ++e) {
          const int nb = t.n[e];
          if (nb >= 0 && in_cavity[nb]) continue;
          if (orient(pts_[t.v[(e + 1) % 3]], pts_[t.v[(e + 2) % 3]], pts_[p]) <= 0.0) {
            in_cavity[ti] = 0;
            cavity.erase(cavity.begin() + static_cast<long>(k));
            changed = true;
            break;
          }
        }
        if (changed) break;
      }
    }

    struct Edge {
      int a, b, outside;
    };
    std::vector<Edge> edges;
    for (int ti : cavity) {
      const Tri& t = tris_[ti];
      for (int e = 0; e < 3; ++e) {
        const int nb = t.n[e];
        if (nb >= 0 && in_cavity[nb]) continue;
        edges.push_back({t.v[(e + 1) % 3], t.v[(e + 2) % 3], nb});
      }
    }
    for (int ti : cavity) tris_[ti].alive = false;

    std::unordered_map<int, int> by_start, by_end;
    const int first = static_cast<int>(tris_.size());
    for (std::size_t k = 0; k < edges.size(); ++k) {
      const auto& ed = edges[k];
      const int id = first + static_cast<int>(k);
      tris_.push_back({{ed.a, ed.b, p}, {-1, -1, ed.outside}, true});
      by_start[ed.a] = id;
      by_end[ed.b] = id;
      if (ed.outside >= 0) {
        Tri& o = tris_[ed.outside];
        for (int e = 0; e < 3; ++e)
          if (o.n[e] >= 0 && !tris_[o.n[e]].alive && in_cavity_of(o, e, ed.a, ed.b)) o.n[e] = id;
      }
    }
    for (std::size_t k = 0; k < edges.size(); ++k) {
      Tri& t = tris_[first + k];
      t.n[0] = by_start.at(t.v[1]);
      t.n[1] = by_end.at(t.v[0]);
    }
    last_ = first;
  }

  std::vector<std::array<int, 3>> result() const {
    std::vector<std::array<int, 3>> out;
    for (const auto& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] >= super_ || t.v[1] >= super_ || t.v[2] >= super_) continue;
      out.push_back(t.v);
    }
    return out;
  }

 private:
  // the edge of o opposite e is (b, a) when it borders the cavity edge (a, b)
  bool in_cavity_of(const Tri& o, int e, int a, int b) const {
    return o.v[(e + 1) % 3] == b && o.v[(e + 2) % 3] == a;
  }

  int locate(int p) {
    int t = last_;
    if (t < 0 || !tris_[t].alive) t = find_alive();
    const Point& x = pts_[p];
    for (std::size_t step = 0; step < 4 * tris_.size() + 16; ++step) {
      const Tri& tr = tris_[t];
      int next = -1;
      for (int e = 0; e < 3; ++e) {
        if (orient(pts_[tr.v[(e + 1) % 3]], pts_[tr.v[(e + 2) % 3]], x) < 0.0) {
          next = tr.n[e];
          break;
        }
      }
      if (next < 0) return t;
      t = next;
    }
    // walk cycled on a degenerate configuration: exhaustive search
    for (std::size_t i = 0; i < tris_.size(); ++i) {
      const Tri& tr = tris_[i];
      if (!tr.alive) continue;
      if (orient(pts_[tr.v[0]], pts_[tr.v[1]], x) >= 0 && orient(pts_[tr.v[1]], pts_[tr.v[2]], x) >= 0 &&
          orient(pts_[tr.v[2]], pts_[tr.v[0]], x) >= 0)
        return static_cast<int>(i);
    }
    throw InvariantError("Delaunay point location failed");
  }

  int find_alive() const {
    for (int i = static_cast<int>(tris_.size()) - 1; i >= 0; --i)
      if (tris_[i].alive) return i;
    throw InvariantError("empty triangulation");
  }

  std::vector<Point> pts_;
  std::vector<Tri> tris_;
  int super_ = 0;
  int last_ = 0;
};

}  // namespace

std::vector<std::array<int, 3>> delaunay(std::span<const Point> points) {
  if (points.size() < 3) return {};
  Triangulator tri(points);
  // insertion along a serpentine over coarse bins keeps walks short
  double lo[2] = {1e300, 1e300}, hi[2] = {-1e300, -1e300};
  for (const auto& p : points)
    for (int k = 0; k < 2; ++k) {
      lo[k] = std::min(lo[k], p[k]);
      hi[k] = std::max(hi[k], p[k]);
    }
  const int bins = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(points.size()) / 8.0)));
  const double by = std::max(hi[1] - lo[1], 1e-12) / bins;
  std::vector<int> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  auto row = [&](int i) { return std::min(bins - 1, static_cast<int>((points[i][1] - lo[1]) / by)); };
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const int ra = row(a), rb = row(b);
    if (ra != rb) return ra < rb;
    return (ra % 2 == 0) ? points[a][0] < points[b][0] : points[a][0] > points[b][0];
  });
  for (int i : order) tri.insert(i);
  return tri.result();
}

}  // namespace cardio::geometry
