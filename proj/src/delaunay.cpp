#include "delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "predicates.hpp"

namespace ssky::detail {

namespace {

std::uint64_t hilbert_d(std::uint32_t order, std::uint32_t x, std::uint32_t y) {
  std::uint64_t d = 0;
  for (std::uint32_t s = order / 2; s > 0; s /= 2) {
    const std::uint32_t rx = (x & s) > 0 ? 1 : 0;
    const std::uint32_t ry = (y & s) > 0 ? 1 : 0;
    d += static_cast<std::uint64_t>(s) * s * ((3 * rx) ^ ry);
    if (ry == 0) {
      if (rx == 1) {
        x = s - 1 - x;
        y = s - 1 - y;
      }
      std::swap(x, y);
    }
  }
  return d;
}

}  // namespace

std::uint64_t hilbert_key(Point2 p, const Rect& bounds) {
  constexpr std::uint32_t order = 1u << 16;
  auto cell = [&](double v, double lo, double hi) -> std::uint32_t {
    if (!(hi > lo)) return 0;
    const double t = (v - lo) / (hi - lo);
    const double scaled = std::clamp(t, 0.0, 1.0) * (order - 1);
    return static_cast<std::uint32_t>(scaled);
  };
  return hilbert_d(order, cell(p.x, bounds.xmin, bounds.xmax), cell(p.y, bounds.ymin, bounds.ymax));
}

std::vector<std::uint32_t> hilbert_order(std::span<const Point2> pts, const Rect& bounds) {
  std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(pts.size());
  for (std::uint32_t i = 0; i < pts.size(); ++i) keyed[i] = {hilbert_key(pts[i], bounds), i};
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::uint32_t> order(pts.size());
  for (std::size_t i = 0; i < keyed.size(); ++i) order[i] = keyed[i].second;
  return order;
}

Triangulation::Triangulation(std::span<const Point2> sites, const Rect& clip)
    : points_(sites.begin(), sites.end()), site_count_(sites.size()) {
  const Point2 c = clip.center();
  const double half = std::max(0.5 * clip.diagonal(), 1.0);
  const double radius = 64.0 * half;
  for (int k = 0; k < 3; ++k) {
    const double angle = std::numbers::pi / 2.0 + k * 2.0 * std::numbers::pi / 3.0;
    points_.push_back({c.x + radius * std::cos(angle), c.y + radius * std::sin(angle)});
  }
  vertex_tri_.assign(points_.size(), kNoTriangle);

  const auto n = static_cast<std::uint32_t>(site_count_);
  const std::uint32_t t = new_triangle();
  tris_[t].v = {n, n + 1, n + 2};
  tris_[t].n = {kNoTriangle, kNoTriangle, kNoTriangle};
  for (std::uint32_t k = 0; k < 3; ++k) vertex_tri_[n + k] = t;
  last_ = t;

  for (std::uint32_t p : hilbert_order(sites, clip)) insert(p);
  compute_centers();
}

std::uint32_t Triangulation::new_triangle() {
  if (!free_.empty()) {
    const std::uint32_t t = free_.back();
    free_.pop_back();
    tris_[t].alive = true;
    return t;
  }
  tris_.push_back(Triangle{});
  tris_.back().alive = true;
  mark_.push_back(0);
  return static_cast<std::uint32_t>(tris_.size() - 1);
}

// Visibility walk; terminates on Delaunay triangulations.
std::uint32_t Triangulation::locate(Point2 p, std::uint32_t start) const {
  std::uint32_t t = start;
  for (std::size_t steps = 0; steps <= 4 * tris_.size() + 16; ++steps) {
    const Triangle& tri = tris_[t];
    bool moved = false;
    for (int k = 0; k < 3; ++k) {
      const Point2 a = points_[tri.v[(k + 1) % 3]];
      const Point2 b = points_[tri.v[(k + 2) % 3]];
      if (orient2d_exact(a, b, p) < 0) {
        if (tri.n[k] == kNoTriangle) throw std::logic_error("point outside triangulation frame");
        t = tri.n[k];
        moved = true;
        break;
      }
    }
    if (!moved) return t;
  }
  throw std::logic_error("triangulation walk did not terminate");
}

void Triangulation::insert(std::uint32_t p) {
  const Point2 pt = points_[p];
  const std::uint32_t first = locate(pt, last_);

  stamp_ += 2;
  const std::uint32_t in_cavity = stamp_;
  const std::uint32_t rejected = stamp_ + 1;

  struct BoundaryEdge {
    std::uint32_t a, b, outside;
  };
  std::vector<std::uint32_t> cavity{first};
  std::vector<BoundaryEdge> boundary;
  mark_[first] = in_cavity;
  for (std::size_t i = 0; i < cavity.size(); ++i) {
    const std::uint32_t t = cavity[i];
    for (int k = 0; k < 3; ++k) {
      const std::uint32_t nb = tris_[t].n[k];
      const std::uint32_t a = tris_[t].v[(k + 1) % 3];
      const std::uint32_t b = tris_[t].v[(k + 2) % 3];
      if (nb != kNoTriangle && mark_[nb] == in_cavity) continue;
      if (nb != kNoTriangle && mark_[nb] != rejected) {
        const Triangle& o = tris_[nb];
        if (incircle_perturbed(points_[o.v[0]], o.v[0], points_[o.v[1]], o.v[1], points_[o.v[2]], o.v[2], pt,
                               p) > 0) {
          mark_[nb] = in_cavity;
          cavity.push_back(nb);
          continue;
        }
        mark_[nb] = rejected;
      }
      boundary.push_back({a, b, nb});
    }
  }

  for (std::uint32_t t : cavity) {
    tris_[t].alive = false;
    free_.push_back(t);
  }

  std::vector<std::uint32_t> created(boundary.size());
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    const BoundaryEdge& e = boundary[i];
    const std::uint32_t t = new_triangle();
    created[i] = t;
    tris_[t].v = {e.a, e.b, p};
    tris_[t].n = {kNoTriangle, kNoTriangle, e.outside};
    mark_[t] = 0;
    if (e.outside != kNoTriangle) {
      Triangle& o = tris_[e.outside];
      for (int k = 0; k < 3; ++k) {
        if (o.v[k] != e.a && o.v[k] != e.b) o.n[k] = t;
      }
    }
    vertex_tri_[e.a] = t;
    vertex_tri_[e.b] = t;
  }
  // The cavity boundary is a simple cycle: triangle (a, b, p) meets the one
  // starting at b across edge (b, p) and the one ending at a across (p, a).
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    for (std::size_t j = 0; j < boundary.size(); ++j) {
      if (boundary[j].a == boundary[i].b) tris_[created[i]].n[0] = created[j];
      if (boundary[j].b == boundary[i].a) tris_[created[i]].n[1] = created[j];
    }
  }
  vertex_tri_[p] = created.front();
  last_ = created.front();
}

Point2 Triangulation::circumcenter(std::uint32_t t) const {
  const Triangle& tri = tris_[t];
  const Point2 a = points_[tri.v[0]];
  const double bx = points_[tri.v[1]].x - a.x;
  const double by = points_[tri.v[1]].y - a.y;
  const double cx = points_[tri.v[2]].x - a.x;
  const double cy = points_[tri.v[2]].y - a.y;
  const double d = 2.0 * (bx * cy - by * cx);
  const double b2 = bx * bx + by * by;
  const double c2 = cx * cx + cy * cy;
  return {a.x + (cy * b2 - by * c2) / d, a.y + (bx * c2 - cx * b2) / d};
}

void Triangulation::compute_centers() {
  centers_.assign(tris_.size(), Point2{});
  for (std::uint32_t t = 0; t < tris_.size(); ++t) {
    if (tris_[t].alive) centers_[t] = circumcenter(t);
  }
}

std::vector<Triangulation::RingVertex> Triangulation::voronoi_ring(std::uint32_t site) const {
  std::vector<RingVertex> ring;
  const std::uint32_t start = vertex_tri_[site];
  std::uint32_t t = start;
  do {
    const Triangle& tri = tris_[t];
    const int k = tri.v[0] == site ? 0 : (tri.v[1] == site ? 1 : 2);
    // Triangle (site, a, b); the next one counterclockwise shares (site, b).
    const std::uint32_t b = tri.v[(k + 2) % 3];
    ring.push_back({centers_[t], b});
    t = tri.n[(k + 1) % 3];
    if (t == kNoTriangle || ring.size() > tris_.size()) {
      throw std::logic_error("site is not enclosed by the triangulation");
    }
  } while (t != start);
  return ring;
}

std::vector<std::uint32_t> Triangulation::neighbors(std::uint32_t site) const {
  std::vector<std::uint32_t> out;
  for (const RingVertex& rv : voronoi_ring(site)) {
    if (is_site(rv.next_neighbor)) out.push_back(rv.next_neighbor);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ssky::detail
