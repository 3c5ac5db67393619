#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <list>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "ssky/voronoi.hpp"

namespace ssky {

// On-disk Voronoi diagram, one block per cell, addressed through an offset
// table so a single cell can be fetched without touching the others.
//
//   header   magic "SSKYVD1\0", u32 cell count, u32 precision tag (64),
//            clip box as 4 x f64
//   offsets  u64 per cell, absolute file position of its block
//   sites    2 x f64 per cell
//   blocks   u32 site id, u32 vertex count v, u32 delaunay count d,
//            2 x f64 site, v x (2 x f64) clockwise vertices,
//            v x u32 edge neighbors (0xFFFFFFFF on the clip box),
//            d x u32 delaunay neighbors
//
// All integers and doubles are little-endian.
class CellFile : public CellSource {
 public:
  static constexpr char kMagic[8] = {'S', 'S', 'K', 'Y', 'V', 'D', '1', '\0'};
  static constexpr std::uint32_t kPrecisionTag = 64;

  // Throws InvalidArgument for a diagram without cells and IoError when the
  // file cannot be written.
  static void write(const std::filesystem::path& path, const VoronoiDiagram& diagram);

  // Reads and checks the header, offset table and site table. Throws IoError
  // when the file cannot be opened and FormatError on a malformed header.
  static CellFile open(const std::filesystem::path& path);

  CellFile(CellFile&&) noexcept;
  CellFile& operator=(CellFile&&) noexcept;
  ~CellFile() override;

  std::size_t cell_count() const override { return sites_.size(); }
  Point2 site(SiteId id) const override;
  Rect clip_box() const override { return clip_box_; }
  // Same as read_cell.
  VoronoiCell load_cell(SiteId id) const override { return read_cell(id); }

  // Fetches one block. Throws OutOfRange for an unknown id and FormatError
  // when the block is malformed; the message names the file offset.
  VoronoiCell read_cell(SiteId id) const;
  std::vector<SiteId> read_delaunay(SiteId id) const;

  // Whole diagram, for round-trip checks.
  VoronoiDiagram read_all() const;

  // read_cell and read_delaunay calls since open or the last reset.
  std::uint64_t cell_reads() const { return counters_->cell_reads.load(); }
  // Blocks actually fetched from disk; differs from cell_reads only when the
  // cache is enabled.
  std::uint64_t disk_reads() const { return counters_->disk_reads.load(); }
  void reset_counters() {
    counters_->cell_reads.store(0);
    counters_->disk_reads.store(0);
  }

  // Keeps up to `capacity` decoded cells in memory; 0 disables the cache.
  void set_cache_capacity(std::size_t capacity);

 private:
  struct Block {
    VoronoiCell cell;
    std::vector<SiteId> delaunay;
  };
  struct Counters {
    std::atomic<std::uint64_t> cell_reads{0};
    std::atomic<std::uint64_t> disk_reads{0};
  };
  struct Cache {
    std::mutex mutex;
    std::size_t capacity = 0;
    std::list<SiteId> order;  // most recent first
    std::unordered_map<SiteId, std::pair<std::list<SiteId>::iterator, std::shared_ptr<const Block>>> entries;
  };

  CellFile() = default;
  std::shared_ptr<const Block> fetch(SiteId id) const;
  Block read_block(SiteId id) const;

  int fd_ = -1;
  std::filesystem::path path_;
  std::uint64_t file_size_ = 0;
  Rect clip_box_;
  std::vector<std::uint64_t> offsets_;
  std::vector<Point2> sites_;
  std::unique_ptr<Counters> counters_ = std::make_unique<Counters>();
  std::unique_ptr<Cache> cache_ = std::make_unique<Cache>();
};

}  // namespace ssky
