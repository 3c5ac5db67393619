#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "ssky/geom.hpp"

namespace ssky::detail {

inline constexpr std::uint32_t kNoTriangle = 0xFFFFFFFFu;

// Incremental (Bowyer-Watson) Delaunay triangulation of distinct sites inside
// a large frame triangle. The frame vertices get ids n, n+1, n+2 and sit far
// enough away that they are never the nearest vertex inside `clip`.
class Triangulation {
 public:
  struct Triangle {
    std::array<std::uint32_t, 3> v{};  // counterclockwise
    std::array<std::uint32_t, 3> n{};  // n[k] lies across the edge opposite v[k]
    bool alive = false;
  };

  // A Voronoi vertex of a site's cell and the Delaunay neighbor sharing the
  // Voronoi edge that starts at it (counterclockwise order).
  struct RingVertex {
    Point2 vertex;
    std::uint32_t next_neighbor;
  };

  Triangulation(std::span<const Point2> sites, const Rect& clip);

  std::size_t site_count() const { return site_count_; }
  bool is_site(std::uint32_t v) const { return v < site_count_; }
  std::span<const Triangle> triangles() const { return tris_; }

  // Counterclockwise ring of circumcenters around `site`.
  std::vector<RingVertex> voronoi_ring(std::uint32_t site) const;

  // Sorted ids of sites sharing a Delaunay edge with `site`, frame excluded.
  std::vector<std::uint32_t> neighbors(std::uint32_t site) const;

 private:
  void insert(std::uint32_t p);
  std::uint32_t locate(Point2 p, std::uint32_t start) const;
  std::uint32_t new_triangle();
  Point2 circumcenter(std::uint32_t t) const;
  void compute_centers();

  std::vector<Point2> points_;
  std::size_t site_count_ = 0;
  std::vector<Triangle> tris_;
  std::vector<std::uint32_t> free_;
  std::vector<std::uint32_t> vertex_tri_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t stamp_ = 0;
  std::uint32_t last_ = 0;
  std::vector<Point2> centers_;
};

// Hilbert-curve order of points over `bounds`, used for insertion locality.
std::vector<std::uint32_t> hilbert_order(std::span<const Point2> pts, const Rect& bounds);
std::uint64_t hilbert_key(Point2 p, const Rect& bounds);

}  // namespace ssky::detail
