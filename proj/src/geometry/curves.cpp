#include "curves.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace cardio::geometry::detail {

namespace {

constexpr int kArcSamples = 4096;

// cumulative arc length of the unit-parameter ellipse at kArcSamples+1 angles
std::vector<double> arc_table(double a, double b) {
  std::vector<double> s(kArcSamples + 1, 0.0);
  const double dth = 2.0 * std::numbers::pi / kArcSamples;
  for (int k = 1; k <= kArcSamples; ++k) {
    // midpoint rule on |x'(theta)|
    const double th = (k - 0.5) * dth;
    s[k] = s[k - 1] + dth * std::hypot(a * std::sin(th), b * std::cos(th));
  }
  return s;
}

}  // namespace

double ellipse_perimeter(double a, double b) {
  if (a == b) return 2.0 * std::numbers::pi * a;
  return arc_table(a, b).back();
}

int loop_count(double perimeter, double h) { return std::max(6, static_cast<int>(std::lround(perimeter / h))); }

std::vector<Point> ellipse_points(const Point& center, double a, double b, int n, double phase) {
  std::vector<Point> out(n);
  if (a == b) {
    for (int i = 0; i < n; ++i) {
      const double th = 2.0 * std::numbers::pi * (i + phase) / n;
      out[i] = {center[0] + a * std::cos(th), center[1] + a * std::sin(th), center[2]};
    }
    return out;
  }
  const auto s = arc_table(a, b);
  const double total = s.back();
  const double dth = 2.0 * std::numbers::pi / kArcSamples;
  for (int i = 0; i < n; ++i) {
    double target = total * (i + phase) / n;
    target = std::fmod(target, total);
    const auto it = std::upper_bound(s.begin(), s.end(), target);
    const int k = std::clamp(static_cast<int>(it - s.begin()) - 1, 0, kArcSamples - 1);
    const double frac = (target - s[k]) / (s[k + 1] - s[k]);
    const double th = (k + frac) * dth;
    out[i] = {center[0] + a * std::cos(th), center[1] + b * std::sin(th), center[2]};
  }
  return out;
}

RingDisc ring_disc(const Point& center, double a, double b, double h, double phase) {
  RingDisc d;
  const int rings = std::max(1, static_cast<int>(std::lround(0.5 * (a + b) / h)));
  d.vertices.push_back(center);
  std::vector<int> prev{0};
  double prev_phase = 0.0;
  for (int k = 1; k <= rings; ++k) {
    const double s = static_cast<double>(k) / rings;
    const int n = loop_count(ellipse_perimeter(s * a, s * b), h);
    // stagger alternate rings; the outer ring uses the requested phase
    const double ph = (k == rings) ? phase : 0.5 * (k % 2);
    const auto pts = ellipse_points(center, s * a, s * b, n, ph);
    std::vector<int> cur(n);
    for (int i = 0; i < n; ++i) {
      cur[i] = static_cast<int>(d.vertices.size());
      d.vertices.push_back(pts[i]);
    }
    if (prev.size() == 1) {
      for (int i = 0; i < n; ++i) d.triangles.push_back({prev[0], cur[i], cur[(i + 1) % n]});
    } else {
      // merge-walk between the rings in arc-length fraction order
      const int na = static_cast<int>(prev.size()), nb = n;
      int i = 0, j = 0;
      while (i < na || j < nb) {
        const int ai = prev[i % na], ai1 = prev[(i + 1) % na];
        const int bj = cur[j % nb], bj1 = cur[(j + 1) % nb];
        const double ua = (i + 1 + prev_phase) / na, ub = (j + 1 + ph) / nb;
        const bool advance_a = j >= nb || (i < na && ua < ub);
        if (advance_a) {
          d.triangles.push_back({ai, bj, ai1});
          ++i;
        } else {
          d.triangles.push_back({ai, bj, bj1});
          ++j;
        }
      }
    }
    prev_phase = ph;
    prev = std::move(cur);
  }
  d.boundary = prev;
  return d;
}

double polygon_area(const std::vector<Point>& loop) {
  double s = 0.0;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Point& p = loop[i];
    const Point& q = loop[(i + 1) % loop.size()];
    s += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * s;
}

bool point_in_polygon(const std::vector<Point>& loop, const Point& p) {
  bool inside = false;
  for (std::size_t i = 0, j = loop.size() - 1; i < loop.size(); j = i++) {
    const Point& a = loop[i];
    const Point& b = loop[j];
    if ((a[1] > p[1]) != (b[1] > p[1]) && p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0])
      inside = !inside;
  }
  return inside;
}

double distance_to_polyline(const std::vector<Point>& loop, const Point& p) {
  double best = 1e300;
  for (std::size_t i = 0; i < loop.size(); ++i) {
    const Point& a = loop[i];
    const Point& b = loop[(i + 1) % loop.size()];
    const Point ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, distance(p, a + t * ab));
  }
  return best;
}

}  // namespace cardio::geometry::detail
