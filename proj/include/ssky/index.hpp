#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ssky/geom.hpp"

namespace ssky {

struct IndexEntry {
  Rect rect;
  std::uint32_t id = 0;
};

struct NearestHit {
  std::uint32_t id = 0;
  double distance2 = 0.0;
  std::uint64_t node_reads = 0;
};

struct RangeHits {
  std::vector<std::uint32_t> ids;
  std::uint64_t node_reads = 0;
};

// Static bounding-rectangle hierarchy, bulk-loaded in Hilbert order of the
// entry centers. Immutable once built; each query reports the number of
// nodes it visited instead of touching shared counters.
class SpatialIndex {
 public:
  struct Node {
    Rect box;
    bool leaf = false;
    std::uint32_t first = 0;  // first child node, or first entry for leaves
    std::uint32_t count = 0;
  };

  static constexpr std::size_t kDefaultFanout = 32;

  SpatialIndex() = default;

  // Throws InvalidArgument when fanout < 4.
  static SpatialIndex build(std::vector<IndexEntry> entries, std::size_t fanout = kDefaultFanout);
  static SpatialIndex build_points(std::span<const Point2> points, std::size_t fanout = kDefaultFanout);

  // Entry with the smallest rectangle distance to q, lowest id on ties.
  // Throws EmptyIndex when there are no entries.
  NearestHit nearest(Point2 q) const;

  // Ids of all entries whose rectangles intersect `rect` (closed).
  RangeHits range_query(const Rect& rect) const;

  std::size_t size() const { return entries_.size(); }
  std::size_t fanout() const { return fanout_; }
  std::size_t height() const { return height_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::span<const Node> nodes() const { return nodes_; }
  std::span<const IndexEntry> entries() const { return entries_; }
  std::uint32_t root() const { return static_cast<std::uint32_t>(nodes_.size() - 1); }

 private:
  std::vector<IndexEntry> entries_;
  std::vector<Node> nodes_;
  std::size_t fanout_ = kDefaultFanout;
  std::size_t height_ = 0;
};

}  // namespace ssky
