#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <span>
#include <vector>

#include "ssky/geom.hpp"
#include "ssky/index.hpp"
#include "ssky/voronoi.hpp"

namespace ssky {

// Counters for one algorithm run. Never shared between runs.
struct Metrics {
  std::uint64_t dominance_tests = 0;
  std::uint64_t cell_reads = 0;
  std::uint64_t index_node_reads = 0;
  std::chrono::nanoseconds wall_time{0};
};

// Query points, their hull and the hull vertices used to order candidates.
class QueryContext {
 public:
  // Throws InvalidArgument for an empty or non-finite query set.
  explicit QueryContext(std::vector<Point2> query_points);

  std::span<const Point2> query_points() const { return query_points_; }
  const ConvexPolygon& hull() const { return hull_; }
  // Lexicographically smallest hull vertex first, then up to two more.
  std::span<const Point2> anchors() const { return {anchors_.data(), anchor_count_}; }

 private:
  std::vector<Point2> query_points_;
  ConvexPolygon hull_;
  std::array<Point2, 3> anchors_{};
  std::size_t anchor_count_ = 0;
};

// Definition-level dominance: p1 is no farther than p2 from every point in
// `targets` and strictly closer to at least one (squared distances).
bool dominates_direct(Point2 p1, Point2 p2, std::span<const Point2> targets);

// Hull-based dominance. A bisector crossing the hull interior means neither
// point dominates; otherwise the hull side decides. Lines within kOrientEps
// of a hull vertex, degenerate hulls and coincident points are settled by
// comparing distances to the hull vertices. Counts one dominance test.
bool spatially_dominates(Point2 p1, Point2 p2, const QueryContext& ctx, Metrics* metrics = nullptr,
                         SearchMethod method = SearchMethod::automatic);

// Reference answer: pairwise dominance over the raw query points.
std::vector<std::uint32_t> brute_force_skyline(std::span<const Point2> data, std::span<const Point2> queries);

struct SkylineResult {
  std::vector<std::uint32_t> skyline_ids;  // sorted
  std::vector<std::uint32_t> seed_ids;     // sorted, subset of skyline_ids
  Metrics metrics;
};

// Sort-and-test skyline: candidates in ascending anchor distance, each tested
// only against the skyline points found before it.
SkylineResult spatial_skyline(std::span<const Point2> data, const QueryContext& ctx,
                              SearchMethod method = SearchMethod::automatic);

// Structures shared by the Voronoi-based algorithms. `cells` must describe
// the Voronoi diagram of `points`.
struct SpatialDatabase {
  std::span<const Point2> points;
  const CellSource* cells = nullptr;
  const SpatialIndex* cell_index = nullptr;   // over cell bounding rectangles
  const SpatialIndex* point_index = nullptr;  // over the data points
};

struct SeedResult {
  std::vector<std::uint32_t> seed_ids;      // sorted
  std::vector<std::uint32_t> boundary_ids;  // cells meeting the hull boundary, sorted
  std::vector<std::uint32_t> interior_ids;  // cells inside the hull, sorted
  std::uint64_t walk_cell_reads = 0;
  std::uint64_t flood_cell_reads = 0;
  Metrics metrics;
};

// Sites whose cells meet the closed query hull, found without dominance
// tests: point location of the first hull vertex, a walk along every hull
// edge, then a flood over the cells inside.
SeedResult seed_skyline(const SpatialDatabase& db, const QueryContext& ctx);

// Bounding box of the circles centred at each query point through p.
// Anything outside it is farther than p from every query point.
Rect dominating_region_box(Point2 p, const QueryContext& ctx);

// Seeds first, then the remaining candidates inside the shrinking
// dominating-region box in ascending anchor order.
SkylineResult enhanced_spatial_skyline(const SpatialDatabase& db, const QueryContext& ctx);

struct Vs2Options {
  // Re-enables the original rule that drops a point when every point within
  // two Delaunay hops is dominated. Unsound; kept for regression tests.
  bool original_prune = false;
};

// Voronoi-traversal baseline: best-first over the Delaunay graph from the
// cell nearest the first anchor, keyed by summed distance to the hull
// vertices, with linear-scan dominance tests against the running skyline.
SkylineResult vs2_corrected(const SpatialDatabase& db, const QueryContext& ctx, Vs2Options options = {});

}  // namespace ssky
