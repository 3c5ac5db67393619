#include "ssky/geom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ssky/errors.hpp"

namespace ssky {

Point2 make_point(double x, double y) {
  if (!std::isfinite(x) || !std::isfinite(y)) {
    throw InvalidArgument("point coordinates must be finite");
  }
  return {x, y};
}

int orientation(Point2 a, Point2 b, Point2 c) {
  const double v = cross(a, b, c);
  if (v > kOrientEps) return 1;
  if (v < -kOrientEps) return -1;
  return 0;
}

Line make_line(double a, double b, double c) {
  const double norm = std::hypot(a, b);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw InvalidArgument("line normal must be non-zero");
  }
  return {a / norm, b / norm, c / norm};
}

Line perpendicular_bisector(Point2 p1, Point2 p2) {
  if (p1 == p2) {
    throw DegeneratePair("bisector of coincident points is undefined");
  }
  const double a = p2.x - p1.x;
  const double b = p2.y - p1.y;
  const double c = 0.5 * ((p2.x * p2.x + p2.y * p2.y) - (p1.x * p1.x + p1.y * p1.y));
  return make_line(a, b, c);
}

Rect Rect::bounding(std::span<const Point2> pts) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  Rect r{inf, inf, -inf, -inf};
  for (const Point2& p : pts) {
    r.xmin = std::min(r.xmin, p.x);
    r.ymin = std::min(r.ymin, p.y);
    r.xmax = std::max(r.xmax, p.x);
    r.ymax = std::max(r.ymax, p.y);
  }
  return r;
}

Rect Rect::intersection(const Rect& r) const {
  return {std::max(xmin, r.xmin), std::max(ymin, r.ymin), std::min(xmax, r.xmax), std::min(ymax, r.ymax)};
}

Rect Rect::united(const Rect& r) const {
  return {std::min(xmin, r.xmin), std::min(ymin, r.ymin), std::max(xmax, r.xmax), std::max(ymax, r.ymax)};
}

double Rect::diagonal() const { return std::hypot(xmax - xmin, ymax - ymin); }

double Rect::mindist2(Point2 p) const {
  const double dx = p.x < xmin ? xmin - p.x : (p.x > xmax ? p.x - xmax : 0.0);
  const double dy = p.y < ymin ? ymin - p.y : (p.y > ymax ? p.y - ymax : 0.0);
  return dx * dx + dy * dy;
}

ConvexPolygon ConvexPolygon::from_clockwise(std::vector<Point2> ring, std::size_t* rotation) {
  ConvexPolygon poly;
  if (ring.empty()) {
    throw InvalidArgument("polygon needs at least one vertex");
  }
  std::size_t start = 0;
  for (std::size_t i = 1; i < ring.size(); ++i) {
    if (lex_less(ring[i], ring[start])) start = i;
  }
  std::rotate(ring.begin(), ring.begin() + static_cast<std::ptrdiff_t>(start), ring.end());
  if (rotation != nullptr) *rotation = start;

  std::size_t right = 0;
  for (std::size_t i = 1; i < ring.size(); ++i) {
    if (lex_less(ring[right], ring[i])) right = i;
  }
  poly.vertices_ = std::move(ring);
  poly.rightmost_ = right;
  poly.degeneracy_ = poly.vertices_.size() == 1   ? Degeneracy::point
                     : poly.vertices_.size() == 2 ? Degeneracy::segment
                                                  : Degeneracy::full;
  return poly;
}

ConvexPolygon convex_hull(std::span<const Point2> points) {
  if (points.empty()) {
    throw InvalidArgument("convex hull of an empty point set");
  }
  std::vector<Point2> sorted(points.begin(), points.end());
  for (const Point2& p : sorted) make_point(p.x, p.y);
  std::sort(sorted.begin(), sorted.end(), lex_less);
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.size() == 1) {
    return ConvexPolygon::from_clockwise(std::move(sorted));
  }

  // Both passes keep only strict clockwise turns.
  auto build = [](auto first, auto last) {
    std::vector<Point2> chain;
    for (auto it = first; it != last; ++it) {
      while (chain.size() >= 2 && orientation(chain[chain.size() - 2], chain.back(), *it) >= 0) {
        chain.pop_back();
      }
      chain.push_back(*it);
    }
    return chain;
  };
  std::vector<Point2> upper = build(sorted.begin(), sorted.end());
  const std::vector<Point2> lower = build(sorted.rbegin(), sorted.rend());

  upper.insert(upper.end(), lower.begin() + 1, lower.end() - 1);
  return ConvexPolygon::from_clockwise(std::move(upper));
}

namespace {

// Along one chain the increments of a linear functional change sign at most
// once, so its extremes are at the chain ends or at the sign change.
void scan_chain(const ConvexPolygon& poly, Point2 dir, std::size_t b, std::size_t e, Extremes& ex) {
  const std::size_t n = poly.size();
  auto g = [&](std::size_t i) { return dot(dir, poly.vertex(i)); };
  auto consider = [&](std::size_t i) {
    const double v = g(i);
    if (v < ex.min_value) {
      ex.min_value = v;
      ex.min_index = i % n;
    }
    if (v > ex.max_value) {
      ex.max_value = v;
      ex.max_index = i % n;
    }
  };
  consider(b);
  consider(e);
  if (e - b < 2) return;

  const double s_first = g(b + 1) - g(b);
  const double s_last = g(e) - g(e - 1);
  const bool peak = s_first > 0.0 && s_last < 0.0;
  const bool valley = s_first < 0.0 && s_last > 0.0;
  if (!peak && !valley) return;

  std::size_t lo = b;
  std::size_t hi = e - 1;
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const double s = g(mid + 1) - g(mid);
    if (peak ? s <= 0.0 : s >= 0.0) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  consider(lo);
}

Extremes seed_extremes() {
  Extremes ex;
  ex.min_value = std::numeric_limits<double>::infinity();
  ex.max_value = -std::numeric_limits<double>::infinity();
  return ex;
}

}  // namespace

Extremes extreme_vertices(const ConvexPolygon& poly, Point2 direction) {
  Extremes ex = seed_extremes();
  const std::size_t n = poly.size();
  if (n == 0) return ex;
  if (n == 1) {
    scan_chain(poly, direction, 0, 0, ex);
    return ex;
  }
  scan_chain(poly, direction, 0, poly.rightmost(), ex);
  scan_chain(poly, direction, poly.rightmost(), n, ex);
  return ex;
}

Extremes extreme_vertices_linear(const ConvexPolygon& poly, Point2 direction) {
  Extremes ex = seed_extremes();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const double v = dot(direction, poly.vertex(i));
    if (v < ex.min_value) {
      ex.min_value = v;
      ex.min_index = i;
    }
    if (v > ex.max_value) {
      ex.max_value = v;
      ex.max_index = i;
    }
  }
  return ex;
}

LineExtent line_extent(const Line& line, const ConvexPolygon& hull, SearchMethod method) {
  const bool linear = method == SearchMethod::linear ||
                      (method == SearchMethod::automatic && hull.size() <= kLinearScanThreshold);
  const Point2 normal{line.a, line.b};
  const Extremes ex = linear ? extreme_vertices_linear(hull, normal) : extreme_vertices(hull, normal);
  return {ex.min_value - line.c, ex.max_value - line.c};
}

bool line_intersects_interior(const Line& line, const ConvexPolygon& hull, SearchMethod method) {
  if (hull.degeneracy() != Degeneracy::full) return false;
  const LineExtent ext = line_extent(line, hull, method);
  return ext.max_offset > kOrientEps && ext.min_offset < -kOrientEps;
}

Containment point_in_convex_polygon(Point2 p, const ConvexPolygon& poly) {
  const std::size_t n = poly.size();
  if (n == 0) return Containment::outside;
  if (n == 1) {
    return dist2(p, poly.vertex(0)) <= kOrientEps * kOrientEps ? Containment::boundary : Containment::outside;
  }
  if (n == 2) {
    const Point2 a = poly.vertex(0);
    const Point2 b = poly.vertex(1);
    if (orientation(a, b, p) != 0) return Containment::outside;
    const Rect box = Rect::bounding(std::vector<Point2>{a, b}).expanded(kOrientEps);
    return box.contains(p) ? Containment::boundary : Containment::outside;
  }

  // Counterclockwise view of the clockwise storage, fanned from vertex 0.
  auto w = [&](std::size_t i) { return poly.vertex((n - i) % n); };
  const int o_first = orientation(w(0), w(1), p);
  const int o_last = orientation(w(0), w(n - 1), p);
  if (o_first < 0 || o_last > 0) return Containment::outside;

  std::size_t lo = 1;
  std::size_t hi = n - 1;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (orientation(w(0), w(mid), p) >= 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const int o = orientation(w(lo), w(lo + 1), p);
  if (o < 0) return Containment::outside;
  if (o == 0) return Containment::boundary;
  if ((lo == 1 && o_first == 0) || (lo == n - 2 && o_last == 0)) return Containment::boundary;
  return Containment::interior;
}

}  // namespace ssky
