#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "ssky/bench.hpp"
#include "ssky/errors.hpp"
#include "ssky/skyline.hpp"

using namespace ssky;
using Ids = std::vector<std::uint32_t>;

namespace {

// Diagram and indexes over an explicit clip box.
struct Built {
  std::vector<Point2> points;
  VoronoiDiagram vd;
  SpatialIndex cell_index;
  SpatialIndex point_index;

  Built(std::vector<Point2> pts, const Rect& clip)
      : points(std::move(pts)),
        vd(build_voronoi(points, clip)),
        cell_index(build_cell_index(vd)),
        point_index(SpatialIndex::build_points(points)) {}
  SpatialDatabase db() const { return {points, &vd, &cell_index, &point_index}; }
};

bool dominates_all_q(Point2 a, Point2 b, std::span<const Point2> q) { return dominates_direct(a, b, q); }

Ids sat_seeds(const VoronoiDiagram& vd, const ConvexPolygon& hull) {
  Ids out;
  for (const VoronoiCell& c : vd.cells()) {
    if (testing::convex_intersect(c.polygon.vertices(), hull.vertices())) out.push_back(c.site_id);
  }
  return out;
}

// Frozen instance: p2 (index 2) is a skyline point whose one- and two-hop
// Delaunay neighbors are all dominated by p0 or p1.
const std::vector<Point2> kDeepPoints{
    {-0.035129, -0.198015}, {0.035129, -0.198015}, {0.000000, -0.500000},  {0.020000, -0.500000},
    {0.016180, -0.488244},  {0.006180, -0.480979}, {-0.006180, -0.480979}, {-0.016180, -0.488244},
    {-0.020000, -0.500000}, {-0.016180, -0.511756}, {-0.006180, -0.519021}, {0.006180, -0.519021},
    {0.016180, -0.511756},  {0.038637, -0.489647}, {0.028284, -0.471716},  {0.010353, -0.461363},
    {-0.010353, -0.461363}, {-0.028284, -0.471716}, {-0.038637, -0.489647}, {-0.038637, -0.510353},
    {-0.028284, -0.528284}, {-0.010353, -0.538637}, {0.010353, -0.538637},  {0.028284, -0.528284},
    {0.038637, -0.510353}};
const std::vector<Point2> kDeepQuery{{-3, 0}, {3, 0}, {0, 3}};

}  // namespace

TEST_CASE("dominance examples") {
  const QueryContext tri({{0, 0}, {2, 0}, {1, 2}});
  Metrics m;
  CHECK(spatially_dominates({1, 0.5}, {10, 10}, tri, &m));
  CHECK_FALSE(spatially_dominates({10, 10}, {1, 0.5}, tri, &m));
  CHECK_FALSE(spatially_dominates({0, 1}, {2, 1}, tri, &m));
  CHECK_FALSE(spatially_dominates({2, 1}, {0, 1}, tri, &m));
  CHECK_FALSE(spatially_dominates({3, 3}, {3, 3}, tri, &m));
  CHECK(m.dominance_tests == 5);
  // Bisector through a hull vertex only.
  CHECK(spatially_dominates({1, 2.5}, {1, 3.5}, tri));
  CHECK_THROWS_AS(QueryContext({}), InvalidArgument);
  CHECK_THROWS_AS(QueryContext({{0, NAN}}), InvalidArgument);
}

TEST_CASE("query context anchors") {
  const QueryContext ctx({{1, 1}, {0, 0}, {2, 0}, {1, 2}, {1, 0.5}});
  REQUIRE(ctx.anchors().size() == 3);
  CHECK(ctx.anchors()[0] == Point2{0, 0});
  for (const Point2& a : ctx.anchors()) {
    CHECK(std::find(ctx.hull().vertices().begin(), ctx.hull().vertices().end(), a) != ctx.hull().vertices().end());
  }
  CHECK(ctx.anchors()[0] != ctx.anchors()[1]);
  CHECK(ctx.anchors()[1] != ctx.anchors()[2]);
  CHECK(QueryContext({{5, 5}, {5, 5}}).anchors().size() == 1);
  CHECK(QueryContext({{0, 0}, {1, 1}, {2, 2}}).anchors().size() == 2);
}

TEST_CASE("oracle examples") {
  const std::vector<Point2> tri{{0, 0}, {2, 0}, {1, 2}};
  CHECK(brute_force_skyline(std::vector<Point2>{{4, 4}}, tri) == Ids{0});
  CHECK(brute_force_skyline(std::vector<Point2>{{1, 0.5}, {10, 10}}, tri) == Ids{0});
  CHECK(brute_force_skyline(std::vector<Point2>{{1, 1}, {7, 3}, {1, 1}}, tri) == Ids{0, 2});
}

TEST_CASE("single query point keeps exactly the nearest points") {
  const std::vector<Point2> pts{{1, 0}, {0, 1}, {2, 2}, {-1, 0}, {0.5, 0.5}};
  const QueryContext ctx({{0, 0}});
  CHECK(spatial_skyline(pts, ctx).skyline_ids == Ids{4});
  const std::vector<Point2> ring{{1, 0}, {0, 1}, {2, 2}, {-1, 0}};
  CHECK(spatial_skyline(ring, ctx).skyline_ids == Ids{0, 1, 3});
}

TEST_CASE("points on a circle around a symmetric query are all skyline") {
  std::vector<Point2> q;
  for (int i = 0; i < 6; ++i) q.push_back({std::cos(i * std::numbers::pi / 3), std::sin(i * std::numbers::pi / 3)});
  std::vector<Point2> pts;
  for (int i = 0; i < 40; ++i) {
    const double t = 2 * std::numbers::pi * (i + 0.25) / 40;
    pts.push_back({5 * std::cos(t), 5 * std::sin(t)});
  }
  const Ids oracle = brute_force_skyline(pts, q);
  CHECK(oracle.size() == pts.size());
  CHECK(spatial_skyline(pts, QueryContext(q)).skyline_ids == oracle);
}

TEST_CASE("sort-and-test skyline on small random instances") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 50; ++trial) {
    const auto pts = testing::random_points(20, rng);
    const auto q = testing::random_points(3, rng);
    const QueryContext ctx(q);
    CHECK(spatial_skyline(pts, ctx).skyline_ids == brute_force_skyline(pts, q));
    CHECK(spatial_skyline(pts, ctx, SearchMethod::linear).skyline_ids == brute_force_skyline(pts, q));
  }
}

TEST_CASE("all algorithms agree with the oracle") {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pts = testing::random_points(500, rng);
    const Workload w(pts);
    const auto q = testing::normal_points(5, {0.5, 0.5}, 0.06, rng);
    const QueryContext ctx(q);
    const Ids oracle = brute_force_skyline(pts, q);
    const SkylineResult alg1 = spatial_skyline(pts, ctx);
    const SkylineResult es = enhanced_spatial_skyline(w.database(), ctx);
    const SkylineResult vs2 = vs2_corrected(w.database(), ctx);
    const SkylineResult pruned = vs2_corrected(w.database(), ctx, {.original_prune = true});
    CHECK(alg1.skyline_ids == oracle);
    CHECK(es.skyline_ids == oracle);
    CHECK(vs2.skyline_ids == oracle);
    CHECK(std::includes(vs2.skyline_ids.begin(), vs2.skyline_ids.end(), pruned.skyline_ids.begin(),
                        pruned.skyline_ids.end()));
    CHECK(es.metrics.dominance_tests <= alg1.metrics.dominance_tests);
    CHECK(std::includes(es.skyline_ids.begin(), es.skyline_ids.end(), es.seed_ids.begin(), es.seed_ids.end()));
    CHECK(es.metrics.cell_reads > 0);
    CHECK(es.metrics.index_node_reads > 0);
    // No member of the result dominates another.
    for (std::uint32_t a : es.skyline_ids) {
      for (std::uint32_t b : es.skyline_ids) CHECK_FALSE(dominates_direct(pts[a], pts[b], q));
    }
  }
}

TEST_CASE("coincident query points and collinear queries") {
  std::mt19937_64 rng(63);
  const auto pts = testing::random_points(300, rng);
  const Workload w(pts);
  const std::vector<std::vector<Point2>> queries{
      {{0.4, 0.4}},
      {{0.4, 0.4}, {0.4, 0.4}, {0.4, 0.4}},
      {{0.2, 0.3}, {0.6, 0.5}},
      {{0.1, 0.1}, {0.3, 0.3}, {0.7, 0.7}},
      {{0.5, 0.1}, {0.5, 0.9}, {0.5, 0.4}},
  };
  for (const auto& q : queries) {
    const QueryContext ctx(q);
    const Ids oracle = brute_force_skyline(pts, q);
    CHECK(spatial_skyline(pts, ctx).skyline_ids == oracle);
    CHECK(enhanced_spatial_skyline(w.database(), ctx).skyline_ids == oracle);
    CHECK(vs2_corrected(w.database(), ctx).skyline_ids == oracle);
  }
  const SeedResult point = seed_skyline(w.database(), QueryContext({{0.4, 0.4}}));
  CHECK(point.seed_ids == Ids{static_cast<std::uint32_t>(testing::nearest_site(pts, {0.4, 0.4}))});
}

TEST_CASE("coincident data points both survive") {
  std::vector<Point2> pts{{0.5, 0.5}, {0.9, 0.9}, {0.1, 0.8}};
  const std::vector<Point2> q{{0.4, 0.4}, {0.6, 0.4}, {0.5, 0.6}};
  const QueryContext ctx(q);
  pts.push_back({0.5, 0.5});
  CHECK(spatial_skyline(pts, ctx).skyline_ids == brute_force_skyline(pts, q));
  CHECK(spatial_skyline(pts, ctx).skyline_ids == Ids{0, 3});
}

TEST_CASE("a hull covering every point needs no dominance tests") {
  std::mt19937_64 rng(64);
  const auto pts = testing::random_points(200, rng, 0.3, 0.7);
  const Workload w(pts);
  const QueryContext ctx({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
  const SkylineResult es = enhanced_spatial_skyline(w.database(), ctx);
  CHECK(es.skyline_ids.size() == pts.size());
  CHECK(es.seed_ids == es.skyline_ids);
  CHECK(es.metrics.dominance_tests == 0);
}

TEST_CASE("seeds are the cells meeting the hull") {
  std::mt19937_64 rng(65);
  for (int trial = 0; trial < 30; ++trial) {
    const auto pts = testing::random_points(200, rng);
    const Workload w(pts);
    const auto q = testing::normal_points(1 + trial % 7, {0.5, 0.5}, 0.1, rng);
    const QueryContext ctx(q);
    const SeedResult seeds = seed_skyline(w.database(), ctx);
    const Ids oracle = brute_force_skyline(pts, q);
    CHECK(std::includes(oracle.begin(), oracle.end(), seeds.seed_ids.begin(), seeds.seed_ids.end()));
    const VoronoiDiagram vd = build_voronoi(pts);
    CHECK(seeds.seed_ids == sat_seeds(vd, ctx.hull()));
    CHECK(seeds.metrics.dominance_tests == 0);
  }
}

TEST_CASE("hull inside one cell gives that single seed") {
  const std::vector<Point2> pts{{0, 0}, {10, 0}, {0, 10}, {10, 10}};
  const Workload w(pts);
  const SeedResult seeds = seed_skyline(w.database(), QueryContext({{1, 1}, {2, 1}, {1, 2}}));
  CHECK(seeds.seed_ids == Ids{0});
  CHECK(seeds.interior_ids.empty());
}

TEST_CASE("dominating region box") {
  CHECK(dominating_region_box({1, 0}, QueryContext({{0, 0}})) == Rect{-1, -1, 1, 1});
  CHECK(dominating_region_box({2, 0}, QueryContext({{0, 0}, {4, 0}})) == Rect{-2, -2, 6, 2});
  std::mt19937_64 rng(66);
  std::uniform_real_distribution<double> u(-3, 4);
  for (int trial = 0; trial < 100; ++trial) {
    const auto q = testing::random_points(4, rng);
    const QueryContext ctx(q);
    const Point2 p{u(rng), u(rng)};
    const Rect box = dominating_region_box(p, ctx);
    for (int k = 0; k < 200; ++k) {
      const Point2 x{u(rng), u(rng)};
      if (!box.contains(x)) CHECK(dominates_direct(p, x, q));
    }
  }
}

TEST_CASE("deep skyline point behind dominated neighbors") {
  const Built b(kDeepPoints, {-4, -4, 4, 4});
  const QueryContext ctx(kDeepQuery);
  const Ids oracle = brute_force_skyline(kDeepPoints, kDeepQuery);
  REQUIRE(oracle == Ids{0, 1, 2});
  for (SiteId n : b.vd.delaunay_neighbors(2)) {
    CHECK((dominates_direct(kDeepPoints[0], kDeepPoints[n], kDeepQuery) ||
           dominates_direct(kDeepPoints[1], kDeepPoints[n], kDeepQuery)));
  }
  CHECK(enhanced_spatial_skyline(b.db(), ctx).skyline_ids == oracle);
  CHECK(spatial_skyline(kDeepPoints, ctx).skyline_ids == oracle);
  CHECK(vs2_corrected(b.db(), ctx).skyline_ids == oracle);
  const Ids pruned = vs2_corrected(b.db(), ctx, {.original_prune = true}).skyline_ids;
  CHECK(pruned == Ids{0, 1});
}

TEST_CASE("property: dominance is asymmetric and agrees with every query point") {
  std::mt19937_64 rng(67);
  std::uniform_int_distribution<int> qn(3, 12);
  int dominated = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const auto q = testing::random_points(static_cast<std::size_t>(qn(rng)), rng, 0.3, 0.7);
    const QueryContext ctx(q);
    const auto pr = testing::random_points(2, rng, -0.5, 1.5);
    const bool ab = spatially_dominates(pr[0], pr[1], ctx);
    const bool ba = spatially_dominates(pr[1], pr[0], ctx);
    CHECK_FALSE((ab && ba));
    CHECK(ab == dominates_all_q(pr[0], pr[1], q));
    CHECK(ba == dominates_all_q(pr[1], pr[0], q));
    dominated += ab || ba;
  }
  CHECK(dominated > 1000);
}

TEST_CASE("property: dominance is transitive") {
  std::mt19937_64 rng(68);
  int checked = 0;
  for (int trial = 0; trial < 20000; ++trial) {
    const QueryContext ctx(testing::random_points(5, rng, 0.4, 0.6));
    const auto p = testing::random_points(3, rng, -1, 2);
    if (spatially_dominates(p[1], p[2], ctx) && !spatially_dominates(p[0], p[2], ctx)) {
      CHECK_FALSE(spatially_dominates(p[0], p[1], ctx));
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("property: every non-skyline point has a skyline dominator") {
  std::mt19937_64 rng(69);
  for (int trial = 0; trial < 40; ++trial) {
    const auto pts = testing::random_points(60, rng);
    const auto q = testing::random_points(1 + trial % 6, rng);
    const Ids sky = brute_force_skyline(pts, q);
    for (std::uint32_t i = 0; i < pts.size(); ++i) {
      if (std::binary_search(sky.begin(), sky.end(), i)) continue;
      const bool found = std::any_of(sky.begin(), sky.end(),
                                     [&](std::uint32_t s) { return dominates_direct(pts[s], pts[i], q); });
      CHECK(found);
    }
  }
}

TEST_CASE("property: points inside the query hull are skyline points") {
  std::mt19937_64 rng(70);
  for (int trial = 0; trial < 30; ++trial) {
    const auto pts = testing::random_points(200, rng);
    const auto q = testing::random_points(6, rng);
    const QueryContext ctx(q);
    const Ids sky = spatial_skyline(pts, ctx).skyline_ids;
    for (std::uint32_t i = 0; i < pts.size(); ++i) {
      if (point_in_convex_polygon(pts[i], ctx.hull()) == Containment::interior) {
        CHECK(std::binary_search(sky.begin(), sky.end(), i));
      }
    }
  }
}

TEST_CASE("property: similarity transforms keep the skyline ids") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> angle(0, 2 * std::numbers::pi), scale(0.5, 3), shift(-5, 5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pts = testing::random_points(300, rng);
    const auto q = testing::normal_points(6, {0.5, 0.5}, 0.1, rng);
    const double t = angle(rng), s = scale(rng), dx = shift(rng), dy = shift(rng);
    auto f = [&](Point2 p) {
      return Point2{s * (std::cos(t) * p.x - std::sin(t) * p.y) + dx, s * (std::sin(t) * p.x + std::cos(t) * p.y) + dy};
    };
    std::vector<Point2> tp, tq;
    std::transform(pts.begin(), pts.end(), std::back_inserter(tp), f);
    std::transform(q.begin(), q.end(), std::back_inserter(tq), f);
    const Ids base = spatial_skyline(pts, QueryContext(q)).skyline_ids;
    CHECK(spatial_skyline(tp, QueryContext(tq)).skyline_ids == base);
    const Workload w(tp);
    CHECK(enhanced_spatial_skyline(w.database(), QueryContext(tq)).skyline_ids == base);
  }
}

TEST_CASE("per-run metrics are independent") {
  std::mt19937_64 rng(72);
  const auto pts = testing::random_points(1000, rng);
  const Workload w(pts);
  const QueryContext ctx(testing::normal_points(8, {0.5, 0.5}, 0.06, rng));
  const SkylineResult a = enhanced_spatial_skyline(w.database(), ctx);
  const SkylineResult b = enhanced_spatial_skyline(w.database(), ctx);
  CHECK(a.skyline_ids == b.skyline_ids);
  CHECK(a.metrics.dominance_tests == b.metrics.dominance_tests);
  CHECK(a.metrics.cell_reads == b.metrics.cell_reads);
  CHECK(a.metrics.index_node_reads == b.metrics.index_node_reads);
}
