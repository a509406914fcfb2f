#pragma once

#include <vector>

#include "cardio/common.hpp"

namespace cardio::geometry::detail {

/// n points on the ellipse (center, semi-axes a, b), equally spaced in arc length,
/// starting at arc fraction phase/n from the +x vertex, counter-clockwise.
std::vector<Point> ellipse_points(const Point& center, double a, double b, int n, double phase);

double ellipse_perimeter(double a, double b);

/// Point count for a closed curve of the given perimeter at spacing h.
int loop_count(double perimeter, double h);

/// Triangles of a disc filled by concentric scaled ellipses; the outer ring is returned in `boundary`.
struct RingDisc {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<int> boundary;  // ccw
};
RingDisc ring_disc(const Point& center, double a, double b, double h, double phase);

/// Closed-polyline utilities.
double polygon_area(const std::vector<Point>& loop);
bool point_in_polygon(const std::vector<Point>& loop, const Point& p);
double distance_to_polyline(const std::vector<Point>& loop, const Point& p);

}  // namespace cardio::geometry::detail
