#include "ssky/index.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <tuple>

#include "delaunay.hpp"
#include "ssky/errors.hpp"

namespace ssky {

namespace {

// Split `count` items into ceil(count / fanout) groups whose sizes differ by
// at most one, which keeps every non-root node at least 40% full.
std::vector<std::uint32_t> group_sizes(std::size_t count, std::size_t fanout) {
  const std::size_t groups = (count + fanout - 1) / fanout;
  std::vector<std::uint32_t> sizes(groups, static_cast<std::uint32_t>(count / groups));
  for (std::size_t i = 0; i < count % groups; ++i) ++sizes[i];
  return sizes;
}

}  // namespace

SpatialIndex SpatialIndex::build(std::vector<IndexEntry> entries, std::size_t fanout) {
  if (fanout < 4) {
    throw InvalidArgument("index fanout must be at least 4");
  }
  SpatialIndex index;
  index.fanout_ = fanout;
  if (entries.empty()) return index;

  Rect all = entries.front().rect;
  for (const IndexEntry& e : entries) all = all.united(e.rect);
  std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(entries.size());
  for (std::uint32_t i = 0; i < entries.size(); ++i) {
    keyed[i] = {detail::hilbert_key(entries[i].rect.center(), all), i};
  }
  std::sort(keyed.begin(), keyed.end());
  index.entries_.reserve(entries.size());
  for (const auto& [key, i] : keyed) index.entries_.push_back(entries[i]);

  std::uint32_t pos = 0;
  for (std::uint32_t size : group_sizes(index.entries_.size(), fanout)) {
    Node node{index.entries_[pos].rect, true, pos, size};
    for (std::uint32_t k = pos; k < pos + size; ++k) node.box = node.box.united(index.entries_[k].rect);
    index.nodes_.push_back(node);
    pos += size;
  }
  index.height_ = 1;

  std::size_t level_begin = 0;
  std::size_t level_end = index.nodes_.size();
  while (level_end - level_begin > 1) {
    auto child = static_cast<std::uint32_t>(level_begin);
    for (std::uint32_t size : group_sizes(level_end - level_begin, fanout)) {
      Node node{index.nodes_[child].box, false, child, size};
      for (std::uint32_t k = child; k < child + size; ++k) node.box = node.box.united(index.nodes_[k].box);
      index.nodes_.push_back(node);
      child += size;
    }
    level_begin = level_end;
    level_end = index.nodes_.size();
    ++index.height_;
  }
  return index;
}

SpatialIndex SpatialIndex::build_points(std::span<const Point2> points, std::size_t fanout) {
  std::vector<IndexEntry> entries(points.size());
  for (std::uint32_t i = 0; i < points.size(); ++i) entries[i] = {Rect::of_point(points[i]), i};
  return build(std::move(entries), fanout);
}

NearestHit SpatialIndex::nearest(Point2 q) const {
  if (entries_.empty()) {
    throw EmptyIndex("nearest query on an empty index");
  }
  // (distance, kind, id): nodes (kind 0) are expanded before entries at the
  // same distance, so the first entry popped has the lowest id among ties.
  using Item = std::tuple<double, int, std::uint32_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  queue.emplace(nodes_.back().box.mindist2(q), 0, root());

  NearestHit hit;
  while (!queue.empty()) {
    const auto [d, kind, id] = queue.top();
    queue.pop();
    if (kind == 1) {
      hit.id = id;
      hit.distance2 = d;
      return hit;
    }
    ++hit.node_reads;
    const Node& node = nodes_[id];
    for (std::uint32_t k = node.first; k < node.first + node.count; ++k) {
      if (node.leaf) {
        queue.emplace(entries_[k].rect.mindist2(q), 1, entries_[k].id);
      } else {
        queue.emplace(nodes_[k].box.mindist2(q), 0, k);
      }
    }
  }
  throw EmptyIndex("nearest query found no entry");
}

RangeHits SpatialIndex::range_query(const Rect& rect) const {
  RangeHits hits;
  if (nodes_.empty() || rect.empty()) return hits;
  std::vector<std::uint32_t> stack{root()};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    ++hits.node_reads;
    if (!node.box.intersects(rect)) continue;
    for (std::uint32_t k = node.first; k < node.first + node.count; ++k) {
      if (node.leaf) {
        if (entries_[k].rect.intersects(rect)) hits.ids.push_back(entries_[k].id);
      } else if (nodes_[k].box.intersects(rect)) {
        stack.push_back(k);
      }
    }
  }
  return hits;
}

}  // namespace ssky
