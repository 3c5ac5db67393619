#include "ssky/skyline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <unordered_map>
#include <unordered_set>

#include "ssky/errors.hpp"

namespace ssky {

namespace {

using Clock = std::chrono::steady_clock;

struct SortKey {
  std::array<double, 3> d{};
  std::uint32_t id = 0;

  friend bool operator<(const SortKey& a, const SortKey& b) {
    if (a.d != b.d) return a.d < b.d;
    return a.id < b.id;
  }
};

SortKey make_key(Point2 p, std::uint32_t id, const QueryContext& ctx) {
  SortKey key;
  key.id = id;
  const auto anchors = ctx.anchors();
  for (std::size_t k = 0; k < anchors.size(); ++k) key.d[k] = dist2(p, anchors[k]);
  return key;
}

// Box grown by a relative 1e-9 on every side.
Rect loosened(const Rect& box) {
  const double scale = std::max({std::abs(box.xmin), std::abs(box.xmax), std::abs(box.ymin), std::abs(box.ymax), 1.0});
  return box.expanded(1e-9 * scale);
}

Rect whole_plane() {
  const double inf = std::numeric_limits<double>::infinity();
  return {-inf, -inf, inf, inf};
}

// Box around the common part of the hull-vertex disks through p. Only
// points inside it can dominate p.
Rect dominator_box(Point2 p, const QueryContext& ctx) {
  Rect r = whole_plane();
  for (const Point2& q : ctx.hull().vertices()) {
    const double d = std::sqrt(dist2(p, q));
    r = r.intersection({q.x - d, q.y - d, q.x + d, q.y + d});
  }
  return loosened(r);
}

// Uniform bucket grid over a fixed point set, filled incrementally.
class BucketGrid {
 public:
  BucketGrid(const Rect& bounds, std::size_t expected) : bounds_(bounds) {
    side_ = std::clamp<std::size_t>(static_cast<std::size_t>(std::sqrt(expected / 8.0)), 1, 256);
    w_ = std::max(bounds.xmax - bounds.xmin, 1e-300) / side_;
    h_ = std::max(bounds.ymax - bounds.ymin, 1e-300) / side_;
    buckets_.resize(side_ * side_);
  }

  void insert(Point2 p) { buckets_[row(p.y) * side_ + col(p.x)].push_back(p); }

  // True as soon as `pred` holds for a stored point inside r. Buckets are
  // visited in square rings around the one holding `near`.
  template <typename Pred>
  bool any_in(const Rect& r, Point2 near, Pred&& pred) const {
    if (!r.intersects(bounds_)) return false;
    const long c0 = col(r.xmin), c1 = col(r.xmax), r0 = row(r.ymin), r1 = row(r.ymax);
    const long cx = std::clamp(static_cast<long>(col(near.x)), c0, c1);
    const long cy = std::clamp(static_cast<long>(row(near.y)), r0, r1);
    const long rings = std::max({cx - c0, c1 - cx, cy - r0, r1 - cy});
    auto scan = [&](long x, long y) {
      for (const Point2& p : buckets_[static_cast<std::size_t>(y) * side_ + static_cast<std::size_t>(x)]) {
        if (r.contains(p) && pred(p)) return true;
      }
      return false;
    };
    if (scan(cx, cy)) return true;
    for (long k = 1; k <= rings; ++k) {
      const long xa = std::max(c0, cx - k), xb = std::min(c1, cx + k);
      const long ya = std::max(r0, cy - k + 1), yb = std::min(r1, cy + k - 1);
      for (long y : {cy - k, cy + k}) {
        if (y < r0 || y > r1) continue;
        for (long x = xa; x <= xb; ++x) {
          if (scan(x, y)) return true;
        }
      }
      for (long x : {cx - k, cx + k}) {
        if (x < c0 || x > c1) continue;
        for (long y = ya; y <= yb; ++y) {
          if (scan(x, y)) return true;
        }
      }
    }
    return false;
  }

 private:
  std::size_t index(double v, double lo, double step) const {
    const double t = (v - lo) / step;
    if (!(t > 0)) return 0;
    return std::min(side_ - 1, static_cast<std::size_t>(t));
  }
  std::size_t col(double x) const { return index(x, bounds_.xmin, w_); }
  std::size_t row(double y) const { return index(y, bounds_.ymin, h_); }

  Rect bounds_;
  std::size_t side_ = 1;
  double w_ = 1.0, h_ = 1.0;
  std::vector<std::vector<Point2>> buckets_;
};

}  // namespace

QueryContext::QueryContext(std::vector<Point2> query_points) : query_points_(std::move(query_points)) {
  if (query_points_.empty()) {
    throw InvalidArgument("query set is empty");
  }
  hull_ = convex_hull(query_points_);
  anchor_count_ = std::min<std::size_t>(3, hull_.size());
  for (std::size_t k = 0; k < anchor_count_; ++k) anchors_[k] = hull_.vertex(k);
}

bool dominates_direct(Point2 p1, Point2 p2, std::span<const Point2> targets) {
  bool strict = false;
  for (const Point2& q : targets) {
    const double d1 = dist2(p1, q);
    const double d2 = dist2(p2, q);
    if (d1 > d2) return false;
    if (d1 < d2) strict = true;
  }
  return strict;
}

bool spatially_dominates(Point2 p1, Point2 p2, const QueryContext& ctx, Metrics* metrics, SearchMethod method) {
  if (metrics) ++metrics->dominance_tests;
  if (p1 == p2) return false;
  const ConvexPolygon& hull = ctx.hull();
  if (hull.degeneracy() != Degeneracy::full) return dominates_direct(p1, p2, hull.vertices());

  const LineExtent ext = line_extent(perpendicular_bisector(p1, p2), hull, method);
  if (ext.max_offset < -kOrientEps) return true;
  if (ext.min_offset > kOrientEps) return false;
  if (ext.max_offset > kOrientEps && ext.min_offset < -kOrientEps) return false;
  return dominates_direct(p1, p2, hull.vertices());
}

std::vector<std::uint32_t> brute_force_skyline(std::span<const Point2> data, std::span<const Point2> queries) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < data.size(); ++i) {
    bool dominated = false;
    for (std::uint32_t j = 0; j < data.size() && !dominated; ++j) {
      if (j != i && dominates_direct(data[j], data[i], queries)) dominated = true;
    }
    if (!dominated) out.push_back(i);
  }
  return out;
}

SkylineResult spatial_skyline(std::span<const Point2> data, const QueryContext& ctx, SearchMethod method) {
  const auto start = Clock::now();
  SkylineResult result;
  std::vector<SortKey> keys(data.size());
  for (std::uint32_t i = 0; i < data.size(); ++i) keys[i] = make_key(data[i], i, ctx);
  std::sort(keys.begin(), keys.end());

  std::vector<Point2> sky;
  for (const SortKey& key : keys) {
    const Point2 p = data[key.id];
    bool dominated = false;
    for (const Point2& s : sky) {
      if (spatially_dominates(s, p, ctx, &result.metrics, method)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) {
      sky.push_back(p);
      result.skyline_ids.push_back(key.id);
    }
  }
  std::sort(result.skyline_ids.begin(), result.skyline_ids.end());
  result.metrics.wall_time = Clock::now() - start;
  return result;
}

SeedResult seed_skyline(const SpatialDatabase& db, const QueryContext& ctx) {
  if (!db.cells || !db.cell_index) {
    throw InvalidArgument("seed search needs cells and a cell index");
  }
  const auto start = Clock::now();
  SeedResult result;
  CellReader reader(*db.cells);
  const ConvexPolygon& hull = ctx.hull();

  const LocateResult located = locate_cell(*db.cells, *db.cell_index, hull.vertex(0));
  result.metrics.index_node_reads += located.index_node_reads;

  std::vector<SiteId> boundary;
  if (hull.degeneracy() == Degeneracy::point) {
    boundary.push_back(located.site);
  } else {
    const std::size_t edges = hull.degeneracy() == Degeneracy::segment ? 1 : hull.size();
    SiteId cell = located.site;
    for (std::size_t i = 0; i < edges; ++i) {
      WalkResult walk = boundary_walk(reader, cell, hull.vertex(i), hull.vertex(i + 1));
      boundary.insert(boundary.end(), walk.cells.begin(), walk.cells.end());
      cell = walk.end_cell;
    }
  }
  std::sort(boundary.begin(), boundary.end());
  boundary.erase(std::unique(boundary.begin(), boundary.end()), boundary.end());
  result.walk_cell_reads = reader.reads();

  result.interior_ids = interior_flood(reader, boundary, hull);
  result.flood_cell_reads = reader.reads() - result.walk_cell_reads;
  result.boundary_ids = std::move(boundary);

  std::set_union(result.boundary_ids.begin(), result.boundary_ids.end(), result.interior_ids.begin(),
                 result.interior_ids.end(), std::back_inserter(result.seed_ids));
  result.metrics.cell_reads = reader.reads();
  result.metrics.wall_time = Clock::now() - start;
  return result;
}

Rect dominating_region_box(Point2 p, const QueryContext& ctx) {
  Rect box{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const Point2& q : ctx.query_points()) {
    const double r = std::sqrt(dist2(p, q));
    box = box.united({q.x - r, q.y - r, q.x + r, q.y + r});
  }
  return box;
}

SkylineResult enhanced_spatial_skyline(const SpatialDatabase& db, const QueryContext& ctx) {
  if (!db.point_index) {
    throw InvalidArgument("enhanced skyline needs a point index");
  }
  const auto start = Clock::now();
  SeedResult seeds = seed_skyline(db, ctx);
  SkylineResult result;
  result.metrics = seeds.metrics;
  result.seed_ids = seeds.seed_ids;

  Rect box = whole_plane();
  for (SiteId s : seeds.seed_ids) box = box.intersection(dominating_region_box(db.points[s], ctx));

  RangeHits hits = db.point_index->range_query(loosened(box));
  result.metrics.index_node_reads += hits.node_reads;

  std::vector<std::uint32_t> candidates = std::move(hits.ids);
  candidates.insert(candidates.end(), seeds.seed_ids.begin(), seeds.seed_ids.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  std::vector<SortKey> keys(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) keys[i] = make_key(db.points[candidates[i]], candidates[i], ctx);
  std::sort(keys.begin(), keys.end());

  std::vector<Point2> candidate_points(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) candidate_points[i] = db.points[candidates[i]];
  BucketGrid active(Rect::bounding(candidate_points), candidates.size());
  result.skyline_ids = seeds.seed_ids;
  for (const SortKey& key : keys) {
    const Point2 p = db.points[key.id];
    if (std::binary_search(seeds.seed_ids.begin(), seeds.seed_ids.end(), key.id)) {
      active.insert(p);
      continue;
    }
    if (!loosened(box).contains(p)) continue;
    const bool dominated = active.any_in(dominator_box(p, ctx), p, [&](Point2 s) {
      return spatially_dominates(s, p, ctx, &result.metrics);
    });
    if (!dominated) {
      active.insert(p);
      result.skyline_ids.push_back(key.id);
      box = box.intersection(dominating_region_box(p, ctx));
    }
  }
  std::sort(result.skyline_ids.begin(), result.skyline_ids.end());
  result.metrics.wall_time = Clock::now() - start;
  return result;
}

SkylineResult vs2_corrected(const SpatialDatabase& db, const QueryContext& ctx, Vs2Options options) {
  if (!db.cells || !db.cell_index) {
    throw InvalidArgument("traversal needs cells and a cell index");
  }
  const auto start = Clock::now();
  SkylineResult result;
  Metrics& m = result.metrics;
  CellReader reader(*db.cells);
  const auto hull_vertices = ctx.hull().vertices();

  auto key_of = [&](SiteId id) {
    double sum = 0.0;
    for (const Point2& v : hull_vertices) sum += std::sqrt(dist2(db.points[id], v));
    return sum;
  };

  const LocateResult located = locate_cell(*db.cells, *db.cell_index, ctx.anchors()[0]);
  m.index_node_reads += located.index_node_reads;

  using Item = std::pair<double, SiteId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  std::unordered_set<SiteId> discovered{located.site};
  // Outcome for every popped site: true when it was found dominated.
  std::unordered_map<SiteId, bool> dominated_status;
  heap.emplace(key_of(located.site), located.site);

  struct Member {
    SiteId id;
    double key;
    bool alive;
  };
  std::vector<Member> sky;
  Rect box = whole_plane();

  auto dominated_by_sky = [&](SiteId id) {
    for (const Member& s : sky) {
      if (s.alive && spatially_dominates(db.points[s.id], db.points[id], ctx, &m, SearchMethod::linear)) return true;
    }
    return false;
  };

  auto prune_applies = [&](SiteId id, const VoronoiCell& cell) {
    std::vector<SiteId> ring;
    for (SiteId nb : cell.neighbor_ids) {
      if (nb == kClipEdge) continue;
      ring.push_back(nb);
      for (SiteId nb2 : reader.read(nb).neighbor_ids) {
        if (nb2 != kClipEdge && nb2 != id) ring.push_back(nb2);
      }
    }
    std::sort(ring.begin(), ring.end());
    ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
    if (ring.empty()) return false;
    for (SiteId nb : ring) {
      auto it = dominated_status.find(nb);
      if (it != dominated_status.end()) {
        if (!it->second) return false;
      } else if (!dominated_by_sky(nb)) {
        return false;
      }
    }
    return true;
  };

  while (!heap.empty()) {
    const auto [key, id] = heap.top();
    heap.pop();
    const VoronoiCell cell = reader.read(id);

    bool dominated;
    if (options.original_prune && prune_applies(id, cell)) {
      dominated = true;
    } else {
      dominated = dominated_by_sky(id);
      if (!dominated) {
        for (Member& s : sky) {
          if (s.alive && s.key >= key &&
              spatially_dominates(db.points[id], db.points[s.id], ctx, &m, SearchMethod::linear)) {
            s.alive = false;
            dominated_status[s.id] = true;
          }
        }
        sky.push_back({id, key, true});
        box = box.intersection(dominating_region_box(db.points[id], ctx));
      }
    }
    dominated_status[id] = dominated;

    if (!cell.polygon.bounds().intersects(loosened(box))) continue;
    for (SiteId nb : cell.neighbor_ids) {
      if (nb == kClipEdge || !discovered.insert(nb).second) continue;
      heap.emplace(key_of(nb), nb);
    }
  }

  for (const Member& s : sky) {
    if (s.alive) result.skyline_ids.push_back(s.id);
  }
  std::sort(result.skyline_ids.begin(), result.skyline_ids.end());
  m.cell_reads = reader.reads();
  m.wall_time = Clock::now() - start;
  return result;
}

}  // namespace ssky
