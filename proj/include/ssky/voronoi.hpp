#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ssky/geom.hpp"

namespace ssky {

class SpatialIndex;

using SiteId = std::uint32_t;

// Neighbor id recorded for cell edges that lie on the clip box.
inline constexpr SiteId kClipEdge = 0xFFFFFFFFu;

struct VoronoiCell {
  SiteId site_id = 0;
  Point2 site;
  ConvexPolygon polygon;
  // neighbor_ids[i] shares edge (vertex i, vertex i + 1) of `polygon`.
  std::vector<SiteId> neighbor_ids;

  friend bool operator==(const VoronoiCell&, const VoronoiCell&) = default;
};

// Read-only access to the cells of a diagram, whether resident or on disk.
class CellSource {
 public:
  virtual ~CellSource() = default;
  virtual std::size_t cell_count() const = 0;
  virtual Point2 site(SiteId id) const = 0;
  virtual Rect clip_box() const = 0;
  virtual VoronoiCell load_cell(SiteId id) const = 0;
};

// Per-run cell access. Every read is counted; the caller owns the returned
// cell and drops it once it has moved on.
class CellReader {
 public:
  explicit CellReader(const CellSource& source) : source_(&source) {}

  VoronoiCell read(SiteId id) {
    ++reads_;
    return source_->load_cell(id);
  }
  const CellSource& source() const { return *source_; }
  std::uint64_t reads() const { return reads_; }

 private:
  const CellSource* source_;
  std::uint64_t reads_ = 0;
};

class VoronoiDiagram : public CellSource {
 public:
  VoronoiDiagram() = default;
  VoronoiDiagram(std::vector<Point2> sites, Rect clip_box, std::vector<VoronoiCell> cells,
                 std::vector<std::vector<SiteId>> delaunay);

  std::size_t cell_count() const override { return cells_.size(); }
  Point2 site(SiteId id) const override { return sites_[id]; }
  Rect clip_box() const override { return clip_box_; }
  VoronoiCell load_cell(SiteId id) const override;

  std::span<const Point2> sites() const { return sites_; }
  std::span<const VoronoiCell> cells() const { return cells_; }
  const VoronoiCell& cell(SiteId id) const { return cells_.at(id); }
  // Sorted Delaunay neighbors of a site, including pairs whose shared
  // Voronoi edge has zero length (cocircular sites).
  std::span<const SiteId> delaunay_neighbors(SiteId id) const { return delaunay_.at(id); }

  friend bool operator==(const VoronoiDiagram& a, const VoronoiDiagram& b) {
    return a.sites_ == b.sites_ && a.clip_box_ == b.clip_box_ && a.cells_ == b.cells_ && a.delaunay_ == b.delaunay_;
  }

 private:
  std::vector<Point2> sites_;
  Rect clip_box_;
  std::vector<VoronoiCell> cells_;
  std::vector<std::vector<SiteId>> delaunay_;
};

// Bounding box of the sites grown by three times its diagonal on every side
// (by 3 when all sites coincide in a single point).
Rect default_clip_box(std::span<const Point2> sites);

// Throws InvalidArgument for empty input, non-finite coordinates or sites
// outside the clip box, and DuplicateSite when two sites coincide.
VoronoiDiagram build_voronoi(std::span<const Point2> sites, const Rect& clip_box);
VoronoiDiagram build_voronoi(std::span<const Point2> sites);

// Index entries for every cell: its bounding rectangle padded by a small
// tolerance, keyed by site id.
SpatialIndex build_cell_index(const CellSource& cells, std::size_t fanout = 32);

struct LocateResult {
  SiteId site = 0;
  std::uint64_t index_node_reads = 0;
};

// Site whose cell contains q; ties go to the lowest id. Throws OutOfDomain
// when q lies outside the clip box.
LocateResult locate_cell(const CellSource& cells, const SpatialIndex& cell_index, Point2 q);

struct WalkResult {
  std::vector<SiteId> cells;  // traversal order, no repeats
  SiteId end_cell = 0;        // cell containing the segment end point
};

// Every cell meeting the closed segment (a, b), found by hopping across cell
// edges from `start_cell`, which must contain a. Throws ClipEscape if the
// walk would leave the clip box.
WalkResult boundary_walk(CellReader& reader, SiteId start_cell, Point2 a, Point2 b);

// Cells lying inside `hull` that are not in `boundary_cells`, found by a
// Delaunay-graph traversal seeded from the boundary cells. `boundary_cells`
// must be sorted.
std::vector<SiteId> interior_flood(CellReader& reader, std::span<const SiteId> boundary_cells,
                                   const ConvexPolygon& hull);

// Cell-local tolerance used for vertex snapping and boundary contact.
double contact_tolerance(const Rect& clip_box);

}  // namespace ssky
