#include "ssky/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "delaunay.hpp"
#include "ssky/errors.hpp"
#include "ssky/index.hpp"

namespace ssky {

VoronoiDiagram::VoronoiDiagram(std::vector<Point2> sites, Rect clip_box, std::vector<VoronoiCell> cells,
                               std::vector<std::vector<SiteId>> delaunay)
    : sites_(std::move(sites)), clip_box_(clip_box), cells_(std::move(cells)), delaunay_(std::move(delaunay)) {}

VoronoiCell VoronoiDiagram::load_cell(SiteId id) const {
  if (id >= cells_.size()) {
    throw OutOfRange("cell id " + std::to_string(id) + " out of range");
  }
  return cells_[id];
}

double contact_tolerance(const Rect& clip_box) { return 1e-10 * std::max(clip_box.diagonal(), 1e-6); }

Rect default_clip_box(std::span<const Point2> sites) {
  const Rect box = Rect::bounding(sites);
  const double diag = box.diagonal();
  return box.expanded(3.0 * (diag > 0.0 ? diag : 1.0));
}

namespace {

struct LabeledVertex {
  Point2 vertex;
  SiteId next;  // neighbor across the edge leaving this vertex
};

// Sutherland-Hodgman against one closed half-plane. Intersections are
// computed from lexicographically ordered endpoints.
template <typename Inside, typename Cut>
std::vector<LabeledVertex> clip_side(const std::vector<LabeledVertex>& ring, Inside inside, Cut cut) {
  std::vector<LabeledVertex> out;
  const std::size_t m = ring.size();
  for (std::size_t i = 0; i < m; ++i) {
    const LabeledVertex& cur = ring[i];
    const LabeledVertex& nxt = ring[(i + 1) % m];
    const bool cin = inside(cur.vertex);
    const bool nin = inside(nxt.vertex);
    if (cin) out.push_back(cur);
    if (cin != nin) {
      Point2 s = cur.vertex;
      Point2 e = nxt.vertex;
      if (lex_less(e, s)) std::swap(s, e);
      const Point2 hit = cut(s, e);
      out.push_back({hit, cin ? kClipEdge : cur.next});
    }
  }
  return out;
}

std::vector<LabeledVertex> clip_to_box(std::vector<LabeledVertex> ring, const Rect& box) {
  ring = clip_side(
      ring, [&](Point2 p) { return p.x >= box.xmin; },
      [&](Point2 s, Point2 e) {
        return Point2{box.xmin, s.y + (box.xmin - s.x) / (e.x - s.x) * (e.y - s.y)};
      });
  ring = clip_side(
      ring, [&](Point2 p) { return p.x <= box.xmax; },
      [&](Point2 s, Point2 e) {
        return Point2{box.xmax, s.y + (box.xmax - s.x) / (e.x - s.x) * (e.y - s.y)};
      });
  ring = clip_side(
      ring, [&](Point2 p) { return p.y >= box.ymin; },
      [&](Point2 s, Point2 e) {
        return Point2{s.x + (box.ymin - s.y) / (e.y - s.y) * (e.x - s.x), box.ymin};
      });
  ring = clip_side(
      ring, [&](Point2 p) { return p.y <= box.ymax; },
      [&](Point2 s, Point2 e) {
        return Point2{s.x + (box.ymax - s.y) / (e.y - s.y) * (e.x - s.x), box.ymax};
      });
  return ring;
}

// Drops edges shorter than tol.
std::vector<LabeledVertex> drop_short_edges(const std::vector<LabeledVertex>& ring, double tol) {
  std::vector<LabeledVertex> out;
  const double tol2 = tol * tol;
  for (const LabeledVertex& lv : ring) {
    if (!out.empty() && dist2(out.back().vertex, lv.vertex) <= tol2) {
      out.back().next = lv.next;
    } else {
      out.push_back(lv);
    }
  }
  while (out.size() > 1 && dist2(out.back().vertex, out.front().vertex) <= tol2) out.pop_back();
  return out;
}

VoronoiCell make_cell(SiteId id, Point2 site, const std::vector<LabeledVertex>& ccw) {
  const std::size_t m = ccw.size();
  std::vector<Point2> cw(m);
  std::vector<SiteId> labels(m);
  for (std::size_t j = 0; j < m; ++j) {
    cw[j] = ccw[(m - j) % m].vertex;
    labels[j] = ccw[(m - j - 1) % m].next;
  }
  std::size_t rot = 0;
  VoronoiCell cell;
  cell.site_id = id;
  cell.site = site;
  cell.polygon = ConvexPolygon::from_clockwise(std::move(cw), &rot);
  cell.neighbor_ids.resize(m);
  for (std::size_t i = 0; i < m; ++i) cell.neighbor_ids[i] = labels[(i + rot) % m];
  return cell;
}

void validate_sites(std::span<const Point2> sites, const Rect& clip_box) {
  if (sites.empty()) {
    throw InvalidArgument("Voronoi diagram needs at least one site");
  }
  if (sites.size() >= kClipEdge) {
    throw InvalidArgument("too many sites");
  }
  for (const Point2& p : sites) {
    make_point(p.x, p.y);
    if (!clip_box.contains(p)) {
      throw InvalidArgument("site lies outside the clip box");
    }
  }
  std::vector<SiteId> order(sites.size());
  for (SiteId i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](SiteId a, SiteId b) {
    return lex_less(sites[a], sites[b]) || (sites[a] == sites[b] && a < b);
  });
  std::ostringstream offenders;
  std::size_t found = 0;
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (sites[order[i]] == sites[order[i - 1]]) {
      if (found < 16) offenders << (found ? ", " : "") << order[i - 1] << "=" << order[i];
      ++found;
    }
  }
  if (found > 0) {
    throw DuplicateSite("duplicate sites (" + std::to_string(found) + "): " + offenders.str());
  }
}

}  // namespace

VoronoiDiagram build_voronoi(std::span<const Point2> sites, const Rect& clip_box) {
  validate_sites(sites, clip_box);
  const std::size_t n = sites.size();
  std::vector<VoronoiCell> cells(n);
  std::vector<std::vector<SiteId>> delaunay(n);

  if (n == 1) {
    const std::vector<LabeledVertex> box{{{clip_box.xmin, clip_box.ymin}, kClipEdge},
                                         {{clip_box.xmax, clip_box.ymin}, kClipEdge},
                                         {{clip_box.xmax, clip_box.ymax}, kClipEdge},
                                         {{clip_box.xmin, clip_box.ymax}, kClipEdge}};
    cells[0] = make_cell(0, sites[0], box);
    return {std::vector<Point2>(sites.begin(), sites.end()), clip_box, std::move(cells), std::move(delaunay)};
  }

  const detail::Triangulation tri(sites, clip_box);
  const double tol = 1e-12 * std::max(clip_box.diagonal(), 1e-6);
  for (SiteId s = 0; s < n; ++s) {
    std::vector<LabeledVertex> ring;
    for (const auto& rv : tri.voronoi_ring(s)) {
      ring.push_back({rv.vertex, tri.is_site(rv.next_neighbor) ? rv.next_neighbor : kClipEdge});
    }
    ring = drop_short_edges(clip_to_box(std::move(ring), clip_box), tol);
    if (ring.size() < 3) {
      throw std::logic_error("degenerate Voronoi cell for site " + std::to_string(s));
    }
    cells[s] = make_cell(s, sites[s], ring);
    delaunay[s] = tri.neighbors(s);
  }
  return {std::vector<Point2>(sites.begin(), sites.end()), clip_box, std::move(cells), std::move(delaunay)};
}

VoronoiDiagram build_voronoi(std::span<const Point2> sites) {
  if (sites.empty()) {
    throw InvalidArgument("Voronoi diagram needs at least one site");
  }
  return build_voronoi(sites, default_clip_box(sites));
}

SpatialIndex build_cell_index(const CellSource& cells, std::size_t fanout) {
  const double pad = contact_tolerance(cells.clip_box());
  std::vector<IndexEntry> entries(cells.cell_count());
  for (SiteId i = 0; i < entries.size(); ++i) {
    entries[i] = {cells.load_cell(i).polygon.bounds().expanded(pad), i};
  }
  return SpatialIndex::build(std::move(entries), fanout);
}

LocateResult locate_cell(const CellSource& cells, const SpatialIndex& cell_index, Point2 q) {
  if (!cells.clip_box().contains(q)) {
    throw OutOfDomain("query point lies outside the clip box");
  }
  const RangeHits hits = cell_index.range_query(Rect::of_point(q));
  LocateResult result;
  result.index_node_reads = hits.node_reads;
  std::optional<double> best;
  auto consider = [&](SiteId id) {
    const double d = dist2(cells.site(id), q);
    if (!best || d < *best || (d == *best && id < result.site)) {
      best = d;
      result.site = id;
    }
  };
  for (std::uint32_t id : hits.ids) consider(id);
  if (!best) {
    for (SiteId id = 0; id < cells.cell_count(); ++id) consider(id);
  }
  return result;
}

namespace {

struct Crossing {
  double t_in = 0.0;
  double t_out = 0.0;
  std::size_t exit_edge = 0;
};

// Parameter range over which the line through a and b meets the cell, with
// the edge where it leaves. Both boundary crossings are found by binary
// search on the monotone arcs between the extreme vertices.
std::optional<Crossing> cross_cell(const ConvexPolygon& poly, Point2 a, Point2 b, double tol) {
  const Point2 d{b.x - a.x, b.y - a.y};
  const double len2 = dot(d, d);
  const Point2 normal{-d.y, d.x};
  const double c = dot(normal, a);
  const double slack = tol * std::sqrt(len2);
  const Extremes ex = extreme_vertices(poly, normal);
  if (ex.max_value - c < -slack || ex.min_value - c > slack) return std::nullopt;

  const std::size_t n = poly.size();
  auto g = [&](std::size_t i) { return dot(normal, poly.vertex(i)) - c; };

  Crossing out;
  out.t_in = std::numeric_limits<double>::infinity();
  out.t_out = -std::numeric_limits<double>::infinity();
  auto record = [&](Point2 p, std::size_t edge) {
    const double t = dot({p.x - a.x, p.y - a.y}, d) / len2;
    out.t_in = std::min(out.t_in, t);
    if (t > out.t_out) {
      out.t_out = t;
      out.exit_edge = edge % n;
    }
  };
  auto cross_edge = [&](std::size_t u) {
    const double gu = g(u);
    const double gv = g(u + 1);
    const Point2 pu = poly.vertex(u);
    const Point2 pv = poly.vertex(u + 1);
    if (gu == gv) {
      record(pu, u);
      record(pv, u);
      return;
    }
    const double s = std::clamp(gu / (gu - gv), 0.0, 1.0);
    record({pu.x + s * (pv.x - pu.x), pu.y + s * (pv.y - pu.y)}, u);
  };
  auto search_arc = [&](std::size_t from, std::size_t len, bool descending) {
    if (len == 0) {
      record(poly.vertex(from), from);
      return;
    }
    std::size_t lo = 0;
    std::size_t hi = len;
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      const double v = g(from + mid);
      if (descending ? v >= 0.0 : v <= 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    cross_edge(from + lo);
  };
  search_arc(ex.max_index, (ex.min_index + n - ex.max_index) % n, true);
  search_arc(ex.min_index, (ex.max_index + n - ex.min_index) % n, false);
  return out;
}

double segment_dist2(Point2 p, Point2 a, Point2 b) {
  const Point2 d{b.x - a.x, b.y - a.y};
  const double len2 = dot(d, d);
  double t = len2 > 0.0 ? dot({p.x - a.x, p.y - a.y}, d) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return dist2(p, {a.x + t * d.x, a.y + t * d.y});
}

bool has_vertex_near(const VoronoiCell& cell, Point2 v, double tol2) {
  for (const Point2& w : cell.polygon.vertices()) {
    if (dist2(w, v) <= tol2) return true;
  }
  return false;
}

class WalkState {
 public:
  WalkState(CellReader& reader, double tol) : reader_(reader), tol_(tol), tol2_(tol * tol) {}

  void add(SiteId id) {
    if (seen_.insert(id).second) order_.push_back(id);
  }
  bool contains(SiteId id) const { return seen_.count(id) > 0; }
  std::vector<SiteId> take() { return std::move(order_); }

  // Cells other than `cell` that have a vertex at v, reached through edges
  // incident to v.
  std::vector<VoronoiCell> around_vertex(const VoronoiCell& cell, Point2 v) {
    std::vector<VoronoiCell> found;
    std::unordered_set<SiteId> visited{cell.site_id};
    const VoronoiCell* c = &cell;
    for (std::size_t k = 0;; ++k) {
      std::vector<SiteId> incident;
      const std::size_t m = c->polygon.size();
      for (std::size_t i = 0; i < m; ++i) {
        if (dist2(c->polygon.vertex(i), v) > tol2_ && dist2(c->polygon.vertex(i + 1), v) > tol2_) continue;
        const SiteId nb = c->neighbor_ids[i];
        if (nb != kClipEdge && visited.insert(nb).second) incident.push_back(nb);
      }
      for (SiteId nb : incident) {
        VoronoiCell next = reader_.read(nb);
        if (has_vertex_near(next, v, tol2_)) found.push_back(std::move(next));
      }
      if (k >= found.size()) break;
      c = &found[k];
    }
    return found;
  }

  // Records every neighbor whose closed cell contains p, assuming p lies in
  // or on `cell`.
  void add_touching(const VoronoiCell& cell, Point2 p) {
    const std::size_t m = cell.polygon.size();
    for (std::size_t i = 0; i < m; ++i) {
      const Point2 u = cell.polygon.vertex(i);
      const Point2 w = cell.polygon.vertex(i + 1);
      if (segment_dist2(p, u, w) > tol2_) continue;
      if (cell.neighbor_ids[i] != kClipEdge) add(cell.neighbor_ids[i]);
      for (const Point2 corner : {u, w}) {
        if (dist2(p, corner) <= tol2_) {
          for (const VoronoiCell& c : around_vertex(cell, corner)) add(c.site_id);
        }
      }
    }
  }

  CellReader& reader() { return reader_; }
  double tol() const { return tol_; }
  double tol2() const { return tol2_; }

 private:
  CellReader& reader_;
  double tol_;
  double tol2_;
  std::vector<SiteId> order_;
  std::unordered_set<SiteId> seen_;
};

}  // namespace

WalkResult boundary_walk(CellReader& reader, SiteId start_cell, Point2 a, Point2 b) {
  const double tol = contact_tolerance(reader.source().clip_box());
  WalkState state(reader, tol);
  VoronoiCell cur = reader.read(start_cell);
  state.add(start_cell);
  state.add_touching(cur, a);

  const double len = std::sqrt(dist2(a, b));
  if (len > tol) {
    const double eps_t = tol / len;
    double t_cur = 0.0;
    const std::size_t max_steps = 2 * reader.source().cell_count() + 16;
    for (std::size_t step = 0;; ++step) {
      if (step > max_steps) throw std::logic_error("boundary walk did not terminate");
      const std::optional<Crossing> cr = cross_cell(cur.polygon, a, b, tol);
      if (!cr || cr->t_out >= 1.0 - eps_t) break;

      const Point2 exit{a.x + cr->t_out * (b.x - a.x), a.y + cr->t_out * (b.y - a.y)};
      const std::size_t e = cr->exit_edge;
      std::vector<VoronoiCell> candidates;
      bool at_vertex = false;
      for (const Point2 corner : {cur.polygon.vertex(e), cur.polygon.vertex(e + 1)}) {
        if (!at_vertex && dist2(exit, corner) <= state.tol2()) {
          at_vertex = true;
          candidates = state.around_vertex(cur, corner);
          for (const VoronoiCell& c : candidates) state.add(c.site_id);
        }
      }
      const SiteId across = cur.neighbor_ids[e];
      if (!at_vertex) {
        if (across == kClipEdge) throw ClipEscape("boundary walk left the clip box");
        candidates.push_back(reader.read(across));
      }

      std::optional<std::size_t> best;
      double best_t = t_cur + eps_t;
      for (std::size_t i = 0; i < candidates.size(); ++i) {
        const std::optional<Crossing> c = cross_cell(candidates[i].polygon, a, b, tol);
        if (c && c->t_out > best_t) {
          best_t = c->t_out;
          best = i;
        }
      }
      if (!best) {
        if (across == kClipEdge) throw ClipEscape("boundary walk left the clip box");
        throw std::logic_error("boundary walk stalled");
      }
      cur = std::move(candidates[*best]);
      state.add(cur.site_id);
      t_cur = cr->t_out;
    }
  }
  state.add_touching(cur, b);
  WalkResult result;
  result.end_cell = cur.site_id;
  result.cells = state.take();
  return result;
}

std::vector<SiteId> interior_flood(CellReader& reader, std::span<const SiteId> boundary_cells,
                                   const ConvexPolygon& hull) {
  std::vector<SiteId> result;
  if (hull.degeneracy() != Degeneracy::full) return result;
  const CellSource& source = reader.source();
  std::unordered_set<SiteId> visited(boundary_cells.begin(), boundary_cells.end());
  std::vector<SiteId> expand(boundary_cells.begin(), boundary_cells.end());
  // A cell that does not meet the hull boundary is inside the hull exactly
  // when its site is.
  while (!expand.empty()) {
    const SiteId id = expand.back();
    expand.pop_back();
    const VoronoiCell cell = reader.read(id);
    for (SiteId nb : cell.neighbor_ids) {
      if (nb == kClipEdge || !visited.insert(nb).second) continue;
      if (point_in_convex_polygon(source.site(nb), hull) == Containment::outside) continue;
      result.push_back(nb);
      expand.push_back(nb);
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

}  // namespace ssky
