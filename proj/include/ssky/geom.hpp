#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ssky {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

// Validating constructor; rejects NaN and infinities.
Point2 make_point(double x, double y);

// Lexicographic (x, then y).
inline bool lex_less(Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

inline double dist2(Point2 a, Point2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }

// Twice the signed area of (o, a, b); positive for a counterclockwise turn.
inline double cross(Point2 o, Point2 a, Point2 b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Collinearity threshold on the raw cross product.
inline constexpr double kOrientEps = 1e-9;

// +1 counterclockwise, -1 clockwise, 0 when |cross| <= kOrientEps.
int orientation(Point2 a, Point2 b, Point2 c);

// a*x + b*y = c with a^2 + b^2 = 1.
struct Line {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  // Signed distance of p from the line, positive on the side (a, b) points to.
  double offset(Point2 p) const { return a * p.x + b * p.y - c; }
};

// Normalizes (a, b) to unit length; throws InvalidArgument when (a, b) = 0.
Line make_line(double a, double b, double c);

// Points on the returned line are equidistant from p1 and p2. The normal
// points from p1 towards p2, so offset(q) < 0 means q is closer to p1.
Line perpendicular_bisector(Point2 p1, Point2 p2);

struct Rect {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  static Rect of_point(Point2 p) { return {p.x, p.y, p.x, p.y}; }
  static Rect bounding(std::span<const Point2> pts);

  bool empty() const { return xmin > xmax || ymin > ymax; }
  bool contains(Point2 p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }
  bool contains(const Rect& r) const {
    return r.xmin >= xmin && r.xmax <= xmax && r.ymin >= ymin && r.ymax <= ymax;
  }
  bool intersects(const Rect& r) const {
    return r.xmin <= xmax && r.xmax >= xmin && r.ymin <= ymax && r.ymax >= ymin;
  }
  Rect intersection(const Rect& r) const;
  Rect united(const Rect& r) const;
  Rect expanded(double margin) const { return {xmin - margin, ymin - margin, xmax + margin, ymax + margin}; }
  double diagonal() const;
  Point2 center() const { return {0.5 * (xmin + xmax), 0.5 * (ymin + ymax)}; }
  // Squared distance from p to the closed rectangle (0 inside).
  double mindist2(Point2 p) const;

  friend bool operator==(const Rect&, const Rect&) = default;
};

enum class Degeneracy { full, segment, point };

enum class Containment { interior, boundary, outside };

// Convex polygon stored clockwise from its lexicographically smallest vertex.
// The upper chain runs from vertex 0 to the lexicographically largest vertex
// (index rightmost()); the lower chain continues from there back to vertex 0.
class ConvexPolygon {
 public:
  ConvexPolygon() = default;

  // `ring` must already be convex and in clockwise order; it is rotated so
  // that it starts at the lexicographically smallest vertex. Returns the
  // rotation applied (ring[k] becomes vertex 0) through `rotation` if given.
  static ConvexPolygon from_clockwise(std::vector<Point2> ring, std::size_t* rotation = nullptr);

  std::span<const Point2> vertices() const { return vertices_; }
  std::size_t size() const { return vertices_.size(); }
  bool empty() const { return vertices_.empty(); }
  const Point2& vertex(std::size_t i) const { return vertices_[i % vertices_.size()]; }
  Degeneracy degeneracy() const { return degeneracy_; }
  std::size_t rightmost() const { return rightmost_; }
  Rect bounds() const { return Rect::bounding(vertices_); }

  friend bool operator==(const ConvexPolygon&, const ConvexPolygon&) = default;

 private:
  std::vector<Point2> vertices_;
  std::size_t rightmost_ = 0;
  Degeneracy degeneracy_ = Degeneracy::point;
};

// Graham-style monotone chain; collinear boundary points are dropped.
ConvexPolygon convex_hull(std::span<const Point2> points);

// Index and value of the minimum and maximum of dot(direction, v) over the
// polygon vertices, found by binary search over each chain.
struct Extremes {
  std::size_t min_index = 0;
  std::size_t max_index = 0;
  double min_value = 0.0;
  double max_value = 0.0;
};
Extremes extreme_vertices(const ConvexPolygon& poly, Point2 direction);
Extremes extreme_vertices_linear(const ConvexPolygon& poly, Point2 direction);

// Signed offsets of the hull vertices farthest on either side of a line.
struct LineExtent {
  double min_offset = 0.0;
  double max_offset = 0.0;
};

enum class SearchMethod { automatic, binary, linear };

// Hulls at or below this vertex count use a linear scan under `automatic`.
inline constexpr std::size_t kLinearScanThreshold = 8;

LineExtent line_extent(const Line& line, const ConvexPolygon& hull,
                       SearchMethod method = SearchMethod::automatic);

// True iff the line passes through the open interior of the hull: some
// vertex lies more than kOrientEps above it and some vertex more than
// kOrientEps below it. Segment and point hulls have no interior.
bool line_intersects_interior(const Line& line, const ConvexPolygon& hull,
                              SearchMethod method = SearchMethod::automatic);

Containment point_in_convex_polygon(Point2 p, const ConvexPolygon& poly);

}  // namespace ssky
