// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit when any
// gated criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "helpers.hpp"
#include "ssky/bench.hpp"
#include "ssky/errors.hpp"
#include "ssky/skyline.hpp"
#include "ssky/storage.hpp"

using namespace ssky;
using Ids = std::vector<std::uint32_t>;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail, bool gated = true) {
  const char* verdict = pass ? "PASS" : (gated ? "FAIL" : "INFO");
  std::cout << "criterion " << id << ": " << verdict << "  " << what << "  [" << detail << "]" << std::endl;
  if (!pass && gated) ++failures;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

template <typename T>
double median(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? static_cast<double>(v[n / 2]) : 0.5 * (static_cast<double>(v[n / 2 - 1]) + static_cast<double>(v[n / 2]));
}

struct Instance {
  std::vector<Point2> points;
  std::vector<Point2> queries;
};

std::vector<Instance> oracle_instances() {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<std::size_t> pn(10, 500), qn(1, 10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Instance> out;
  for (int i = 0; i < 200; ++i) {
    Instance inst;
    inst.points = gen_uniform(pn(rng), rng());
    const double sigma = i % 2 ? 0.06 : 0.01;
    inst.queries = gen_query({u(rng), u(rng)}, sigma, qn(rng), rng(), default_clip_box(inst.points));
    out.push_back(std::move(inst));
  }
  return out;
}

void criteria_1_and_2() {
  const auto t0 = Clock::now();
  int wrong1 = 0, wrong_es = 0, wrong_vs2 = 0, unsound = 0, seed_mismatch = 0;
  for (const Instance& inst : oracle_instances()) {
    const Workload w(inst.points);
    const QueryContext ctx(inst.queries);
    const Ids oracle = brute_force_skyline(inst.points, inst.queries);
    wrong1 += spatial_skyline(inst.points, ctx).skyline_ids != oracle;
    wrong_es += enhanced_spatial_skyline(w.database(), ctx).skyline_ids != oracle;
    wrong_vs2 += vs2_corrected(w.database(), ctx).skyline_ids != oracle;

    const SeedResult seeds = seed_skyline(w.database(), ctx);
    unsound += !std::includes(oracle.begin(), oracle.end(), seeds.seed_ids.begin(), seeds.seed_ids.end());
    Ids touching;
    const CellSource& cells = *w.database().cells;
    for (SiteId id = 0; id < cells.cell_count(); ++id) {
      const VoronoiCell c = cells.load_cell(id);
      if (testing::convex_intersect(c.polygon.vertices(), ctx.hull().vertices())) touching.push_back(id);
    }
    seed_mismatch += seeds.seed_ids != touching;
  }
  std::ostringstream d1;
  d1 << "200 instances; mismatches alg1=" << wrong1 << " es=" << wrong_es << " vs2=" << wrong_vs2 << "; "
     << seconds_since(t0) << " s";
  report(1, wrong1 + wrong_es + wrong_vs2 == 0, "oracle equivalence", d1.str());
  std::ostringstream d2;
  d2 << "seeds outside skyline=" << unsound << " seed sets differing from hull-touching cells=" << seed_mismatch;
  report(2, unsound + seed_mismatch == 0, "seed soundness", d2.str());
}

void criterion_3() {
  const std::vector<Point2> pts{
      {-0.035129, -0.198015}, {0.035129, -0.198015}, {0.000000, -0.500000},  {0.020000, -0.500000},
      {0.016180, -0.488244},  {0.006180, -0.480979}, {-0.006180, -0.480979}, {-0.016180, -0.488244},
      {-0.020000, -0.500000}, {-0.016180, -0.511756}, {-0.006180, -0.519021}, {0.006180, -0.519021},
      {0.016180, -0.511756},  {0.038637, -0.489647}, {0.028284, -0.471716},  {0.010353, -0.461363},
      {-0.010353, -0.461363}, {-0.028284, -0.471716}, {-0.038637, -0.489647}, {-0.038637, -0.510353},
      {-0.028284, -0.528284}, {-0.010353, -0.538637}, {0.010353, -0.538637},  {0.028284, -0.528284},
      {0.038637, -0.510353}};
  const std::vector<Point2> q{{-3, 0}, {3, 0}, {0, 3}};
  const VoronoiDiagram vd = build_voronoi(pts, {-4, -4, 4, 4});
  const SpatialIndex cell_index = build_cell_index(vd);
  const SpatialIndex point_index = SpatialIndex::build_points(pts);
  const SpatialDatabase db{pts, &vd, &cell_index, &point_index};
  const QueryContext ctx(q);
  const Ids oracle = brute_force_skyline(pts, q);
  const Ids off = vs2_corrected(db, ctx).skyline_ids;
  const Ids on = vs2_corrected(db, ctx, {.original_prune = true}).skyline_ids;
  const bool strict_subset = on.size() < oracle.size() && std::includes(oracle.begin(), oracle.end(), on.begin(), on.end()) &&
                             !std::binary_search(on.begin(), on.end(), 2u);
  std::ostringstream d;
  d << "oracle |S|=" << oracle.size() << " prune on |S|=" << on.size() << " prune off |S|=" << off.size();
  report(3, oracle == Ids{0, 1, 2} && off == oracle && strict_subset, "two-hop prune loses the deep point", d.str());
}

ExperimentConfig desk_config(std::vector<std::size_t> cardinalities, double sigma, std::vector<Algorithm> algos) {
  ExperimentConfig c;
  c.cardinalities = std::move(cardinalities);
  c.scale = 1.0;
  c.query_sizes = {15};
  c.sigmas = {sigma};
  c.queries = 100;
  c.seed = 1;
  c.algorithms = std::move(algos);
  return c;
}

// Records keyed by query index, one map per algorithm.
std::map<Algorithm, std::map<std::size_t, QueryRecord>> by_query(const Report& r) {
  std::map<Algorithm, std::map<std::size_t, QueryRecord>> out;
  for (const QueryRecord& rec : r.records) out[rec.algorithm][rec.query_index] = rec;
  return out;
}

void criterion_4() {
  const auto t0 = Clock::now();
  const Report r = run_experiment(desk_config({50000}, 0.06, {Algorithm::es, Algorithm::vs2}));
  auto recs = by_query(r);
  std::vector<std::uint64_t> es, vs2;
  int wins = 0;
  for (const auto& [qi, rec] : recs[Algorithm::es]) {
    const QueryRecord& other = recs[Algorithm::vs2].at(qi);
    es.push_back(rec.metrics.dominance_tests);
    vs2.push_back(other.metrics.dominance_tests);
    wins += rec.metrics.dominance_tests < other.metrics.dominance_tests;
  }
  std::ostringstream d;
  d << "median tests es=" << median(es) << " vs2=" << median(vs2) << "; es fewer on " << wins << "/" << es.size()
    << "; " << seconds_since(t0) << " s";
  report(4, es.size() == 100 && median(es) < median(vs2) && wins >= 90, "ES needs fewer dominance tests", d.str());
}

void criterion_5() {
  const Report r = run_experiment(desk_config({50000}, 0.01, {Algorithm::es, Algorithm::vs2, Algorithm::oracle}));
  auto recs = by_query(r);
  std::vector<std::uint64_t> es_io, vs2_io;
  int inverted = 0;
  for (const auto& [qi, rec] : recs[Algorithm::es]) {
    const QueryRecord& other = recs[Algorithm::vs2].at(qi);
    const std::uint64_t a = rec.metrics.cell_reads + rec.metrics.index_node_reads;
    const std::uint64_t b = other.metrics.cell_reads + other.metrics.index_node_reads;
    es_io.push_back(a);
    vs2_io.push_back(b);
    inverted += a > b;
  }
  // run_experiment throws on any disagreement with the oracle, so reaching
  // here means every query matched.
  std::ostringstream d;
  d << "sigma=0.01 oracle-correct on " << es_io.size() << " queries; median I/O es=" << median(es_io)
    << " vs2=" << median(vs2_io) << "; vs2 cheaper on " << inverted << "/" << es_io.size() << " (recorded, not gated)";
  report(5, es_io.size() == 100, "small-hull crossover", d.str());
}

void criterion_6() {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<std::size_t> qn(1, 64);
  int disagreements = 0;
  for (int i = 0; i < 100000; ++i) {
    const QueryContext ctx(testing::random_points(qn(rng), rng, 0.3, 0.7));
    const auto p = testing::random_points(2, rng, -0.5, 1.5);
    disagreements += spatially_dominates(p[0], p[1], ctx, nullptr, SearchMethod::binary) !=
                     spatially_dominates(p[0], p[1], ctx, nullptr, SearchMethod::linear);
    disagreements += spatially_dominates(p[1], p[0], ctx, nullptr, SearchMethod::binary) !=
                     spatially_dominates(p[1], p[0], ctx, nullptr, SearchMethod::linear);
  }

  // Timing on hulls with 32..64 vertices (query points on a circle).
  std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi);
  std::vector<QueryContext> contexts;
  for (std::size_t h = 32; h <= 64; h += 8) {
    std::vector<Point2> q;
    const double phase = ang(rng);
    for (std::size_t k = 0; k < h; ++k) {
      const double t = phase + 2 * std::numbers::pi * k / h;
      q.push_back({0.5 + 0.2 * std::cos(t), 0.5 + 0.2 * std::sin(t)});
    }
    contexts.emplace_back(q);
  }
  const auto pairs = testing::random_points(20000, rng, -0.5, 1.5);
  auto time_method = [&](SearchMethod m) {
    std::size_t sink = 0;
    const auto t0 = Clock::now();
    for (int rep = 0; rep < 5; ++rep) {
      for (const QueryContext& ctx : contexts) {
        for (std::size_t i = 0; i + 1 < pairs.size(); i += 2) sink += spatially_dominates(pairs[i], pairs[i + 1], ctx, nullptr, m);
      }
    }
    const double ns = std::chrono::duration<double, std::nano>(Clock::now() - t0).count();
    return std::pair{ns / (5.0 * contexts.size() * (pairs.size() / 2)), sink};
  };
  time_method(SearchMethod::linear);
  const auto [linear_ns, s1] = time_method(SearchMethod::linear);
  const auto [binary_ns, s2] = time_method(SearchMethod::binary);
  bool large_hulls = true;
  for (const QueryContext& ctx : contexts) large_hulls = large_hulls && ctx.hull().size() >= 32;
  std::ostringstream d;
  d << "disagreements=" << disagreements << " over 2x10^5 ordered pairs; |CH|>=32 mean ns binary=" << binary_ns
    << " linear=" << linear_ns;
  report(6, disagreements == 0 && large_hulls && s1 == s2 && binary_ns < linear_ns, "binary vs linear dominance",
         d.str());
}

void criterion_7() {
  const Report r = run_experiment(desk_config({50000, 100000}, 0.06, {Algorithm::es}));
  std::map<std::size_t, std::vector<double>> times;
  for (const QueryRecord& rec : r.records) {
    times[rec.cardinality].push_back(std::chrono::duration<double, std::milli>(rec.metrics.wall_time).count());
  }
  const double m50 = median(times[50000]), m100 = median(times[100000]);
  const double ratio = m100 / m50;
  std::ostringstream d;
  d << "median ES ms at 50K=" << m50 << " 100K=" << m100 << " ratio=" << ratio;
  report(7, times[50000].size() == 100 && times[100000].size() == 100 && ratio <= 3.0, "ES scaling", d.str());
}

void criterion_8() {
  testing::TempDir dir("acceptance");
  const auto pts = gen_uniform(10000, 8);
  const VoronoiDiagram vd = build_voronoi(pts);
  CellFile::write(dir / "cells.vd", vd);
  const CellFile file = CellFile::open(dir / "cells.vd");
  std::size_t mismatched = 0;
  std::uint64_t calls = 0;
  auto bits_equal = [](const VoronoiCell& a, const VoronoiCell& b) {
    if (a.site_id != b.site_id || a.neighbor_ids != b.neighbor_ids || a.polygon.size() != b.polygon.size()) return false;
    if (std::memcmp(&a.site, &b.site, sizeof(Point2)) != 0) return false;
    return std::memcmp(a.polygon.vertices().data(), b.polygon.vertices().data(), a.polygon.size() * sizeof(Point2)) == 0;
  };
  for (SiteId id = 0; id < vd.cell_count(); ++id) {
    mismatched += !bits_equal(file.read_cell(id), vd.cell(id));
    ++calls;
  }
  std::mt19937_64 rng(88);
  std::uniform_int_distribution<SiteId> pick(0, 9999);
  for (int i = 0; i < 5000; ++i) {
    file.read_cell(pick(rng));
    ++calls;
  }
  std::ostringstream d;
  d << "cells=" << vd.cell_count() << " mismatched=" << mismatched << " reads counted=" << file.cell_reads()
    << " invoked=" << calls;
  report(8, mismatched == 0 && file.cell_reads() == calls && vd.cell_count() == 10000, "cell file round trip", d.str());
}

template <typename F>
void guarded(int id, F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    report(id, false, "raised", e.what());
  }
}

}  // namespace

int main() {
  guarded(1, criteria_1_and_2);
  guarded(3, criterion_3);
  guarded(4, criterion_4);
  guarded(5, criterion_5);
  guarded(6, criterion_6);
  guarded(7, criterion_7);
  guarded(8, criterion_8);
  std::cout << (failures == 0 ? "acceptance: all gated criteria passed" : "acceptance: gated failures present")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
