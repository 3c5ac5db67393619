#include "ssky/storage.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <bit>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>
#include <utility>

#include "ssky/errors.hpp"

namespace ssky {

namespace {

constexpr std::size_t kHeaderSize = 8 + 4 + 4 + 4 * 8;

class Writer {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void raw(const char* data, std::size_t n) { bytes_.insert(bytes_.end(), data, data + n); }
  void patch_u64(std::size_t at, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_[at + i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  }
  std::size_t size() const { return bytes_.size(); }
  const std::vector<char>& bytes() const { return bytes_; }

 private:
  std::vector<char> bytes_;
};

// Bounds-checked little-endian decoding of a buffer read at `base`.
class Reader {
 public:
  Reader(const std::vector<unsigned char>& buf, std::uint64_t base, const std::filesystem::path& path)
      : buf_(buf), base_(base), path_(path) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(buf_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf_[pos_ + i]) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  Point2 point() {
    const double x = f64();
    const double y = f64();
    return {x, y};
  }
  std::uint64_t offset() const { return base_ + pos_; }

  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream msg;
    msg << path_.string() << ": " << what << " at offset " << offset();
    throw FormatError(msg.str());
  }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > buf_.size()) fail("truncated data");
  }

  const std::vector<unsigned char>& buf_;
  std::uint64_t base_;
  const std::filesystem::path& path_;
  std::size_t pos_ = 0;
};

}  // namespace

void CellFile::write(const std::filesystem::path& path, const VoronoiDiagram& diagram) {
  const std::size_t n = diagram.cell_count();
  if (n == 0) {
    throw InvalidArgument("cannot write a diagram without cells");
  }
  Writer w;
  w.raw(kMagic, sizeof kMagic);
  w.u32(static_cast<std::uint32_t>(n));
  w.u32(kPrecisionTag);
  const Rect clip = diagram.clip_box();
  w.f64(clip.xmin);
  w.f64(clip.ymin);
  w.f64(clip.xmax);
  w.f64(clip.ymax);
  const std::size_t table = w.size();
  for (std::size_t i = 0; i < n; ++i) w.u64(0);
  for (const Point2& s : diagram.sites()) {
    w.f64(s.x);
    w.f64(s.y);
  }
  for (SiteId id = 0; id < n; ++id) {
    w.patch_u64(table + 8 * id, w.size());
    const VoronoiCell& cell = diagram.cell(id);
    const auto delaunay = diagram.delaunay_neighbors(id);
    w.u32(cell.site_id);
    w.u32(static_cast<std::uint32_t>(cell.polygon.size()));
    w.u32(static_cast<std::uint32_t>(delaunay.size()));
    w.f64(cell.site.x);
    w.f64(cell.site.y);
    for (const Point2& v : cell.polygon.vertices()) {
      w.f64(v.x);
      w.f64(v.y);
    }
    for (SiteId nb : cell.neighbor_ids) w.u32(nb);
    for (SiteId nb : delaunay) w.u32(nb);
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.size()));
  out.close();
  if (!out) {
    throw IoError("failed writing " + path.string());
  }
}

CellFile CellFile::open(const std::filesystem::path& path) {
  CellFile file;
  file.path_ = path;
  file.fd_ = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
  if (file.fd_ < 0) {
    throw IoError("cannot open " + path.string() + ": " + std::strerror(errno));
  }
  const off_t end = ::lseek(file.fd_, 0, SEEK_END);
  if (end < 0) {
    throw IoError("cannot size " + path.string());
  }
  file.file_size_ = static_cast<std::uint64_t>(end);

  auto load = [&](std::uint64_t at, std::size_t len) {
    std::vector<unsigned char> buf(len);
    if (at + len > file.file_size_) {
      std::ostringstream msg;
      msg << path.string() << ": file ends before offset " << at + len;
      throw FormatError(msg.str());
    }
    std::size_t got = 0;
    while (got < len) {
      const ssize_t r = ::pread(file.fd_, buf.data() + got, len - got, static_cast<off_t>(at + got));
      if (r <= 0) throw IoError("read failed on " + path.string());
      got += static_cast<std::size_t>(r);
    }
    return buf;
  };

  const auto header = load(0, kHeaderSize);
  if (std::memcmp(header.data(), kMagic, sizeof kMagic) != 0) {
    throw FormatError(path.string() + ": bad magic at offset 0");
  }
  Reader h(header, 0, path);
  h.u64();  // magic, already checked
  const std::uint32_t n = h.u32();
  const std::uint64_t tag_at = h.offset();
  if (h.u32() != kPrecisionTag) {
    std::ostringstream msg;
    msg << path.string() << ": unsupported precision tag at offset " << tag_at;
    throw FormatError(msg.str());
  }
  file.clip_box_.xmin = h.f64();
  file.clip_box_.ymin = h.f64();
  file.clip_box_.xmax = h.f64();
  file.clip_box_.ymax = h.f64();

  const std::uint64_t table_at = kHeaderSize;
  const auto table = load(table_at, static_cast<std::size_t>(n) * 8);
  Reader t(table, table_at, path);
  const std::uint64_t sites_at = table_at + static_cast<std::uint64_t>(n) * 8;
  const std::uint64_t blocks_at = sites_at + static_cast<std::uint64_t>(n) * 16;
  file.offsets_.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint64_t off = t.u64();
    if (off < blocks_at || off >= file.file_size_) {
      std::ostringstream msg;
      msg << path.string() << ": offset table entry " << i << " out of bounds at offset " << table_at + 8ull * i;
      throw FormatError(msg.str());
    }
    file.offsets_[i] = off;
  }
  const auto site_bytes = load(sites_at, static_cast<std::size_t>(n) * 16);
  Reader s(site_bytes, sites_at, path);
  file.sites_.resize(n);
  for (auto& p : file.sites_) p = s.point();
  return file;
}

CellFile::CellFile(CellFile&& other) noexcept
    : fd_(std::exchange(other.fd_, -1)),
      path_(std::move(other.path_)),
      file_size_(other.file_size_),
      clip_box_(other.clip_box_),
      offsets_(std::move(other.offsets_)),
      sites_(std::move(other.sites_)),
      counters_(std::move(other.counters_)),
      cache_(std::move(other.cache_)) {}

CellFile& CellFile::operator=(CellFile&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = std::exchange(other.fd_, -1);
    path_ = std::move(other.path_);
    file_size_ = other.file_size_;
    clip_box_ = other.clip_box_;
    offsets_ = std::move(other.offsets_);
    sites_ = std::move(other.sites_);
    counters_ = std::move(other.counters_);
    cache_ = std::move(other.cache_);
  }
  return *this;
}

CellFile::~CellFile() {
  if (fd_ >= 0) ::close(fd_);
}

Point2 CellFile::site(SiteId id) const {
  if (id >= sites_.size()) {
    throw OutOfRange("site id " + std::to_string(id) + " out of range");
  }
  return sites_[id];
}

CellFile::Block CellFile::read_block(SiteId id) const {
  if (id >= offsets_.size()) {
    throw OutOfRange("cell id " + std::to_string(id) + " out of range");
  }
  const std::uint64_t at = offsets_[id];
  const std::uint64_t end = id + 1 < offsets_.size() ? offsets_[id + 1] : file_size_;
  if (end <= at) {
    std::ostringstream msg;
    msg << path_.string() << ": empty cell block at offset " << at;
    throw FormatError(msg.str());
  }
  std::vector<unsigned char> buf(end - at);
  std::size_t got = 0;
  while (got < buf.size()) {
    const ssize_t r = ::pread(fd_, buf.data() + got, buf.size() - got, static_cast<off_t>(at + got));
    if (r <= 0) throw IoError("read failed on " + path_.string());
    got += static_cast<std::size_t>(r);
  }
  counters_->disk_reads.fetch_add(1);

  Reader r(buf, at, path_);
  Block block;
  block.cell.site_id = r.u32();
  if (block.cell.site_id != id) r.fail("cell block holds the wrong site id");
  const std::uint32_t vcount = r.u32();
  const std::uint32_t dcount = r.u32();
  if (static_cast<std::uint64_t>(vcount) * 20 + static_cast<std::uint64_t>(dcount) * 4 + 16 > buf.size()) {
    r.fail("cell block counts exceed block size");
  }
  block.cell.site = r.point();
  std::vector<Point2> ring(vcount);
  for (auto& v : ring) v = r.point();
  block.cell.neighbor_ids.resize(vcount);
  for (auto& nb : block.cell.neighbor_ids) {
    nb = r.u32();
    if (nb != kClipEdge && nb >= offsets_.size()) r.fail("edge neighbor id out of range");
  }
  block.delaunay.resize(dcount);
  for (auto& nb : block.delaunay) {
    nb = r.u32();
    if (nb >= offsets_.size()) r.fail("delaunay neighbor id out of range");
  }
  std::size_t rotation = 0;
  block.cell.polygon = ConvexPolygon::from_clockwise(std::move(ring), &rotation);
  if (rotation != 0) r.fail("cell polygon does not start at its smallest vertex");
  return block;
}

std::shared_ptr<const CellFile::Block> CellFile::fetch(SiteId id) const {
  counters_->cell_reads.fetch_add(1);
  {
    std::lock_guard lock(cache_->mutex);
    if (cache_->capacity > 0) {
      auto it = cache_->entries.find(id);
      if (it != cache_->entries.end()) {
        cache_->order.splice(cache_->order.begin(), cache_->order, it->second.first);
        return it->second.second;
      }
    }
  }
  auto block = std::make_shared<const Block>(read_block(id));
  std::lock_guard lock(cache_->mutex);
  if (cache_->capacity > 0 && !cache_->entries.contains(id)) {
    cache_->order.push_front(id);
    cache_->entries.emplace(id, std::make_pair(cache_->order.begin(), block));
    while (cache_->entries.size() > cache_->capacity) {
      cache_->entries.erase(cache_->order.back());
      cache_->order.pop_back();
    }
  }
  return block;
}

VoronoiCell CellFile::read_cell(SiteId id) const { return fetch(id)->cell; }

std::vector<SiteId> CellFile::read_delaunay(SiteId id) const { return fetch(id)->delaunay; }

VoronoiDiagram CellFile::read_all() const {
  std::vector<VoronoiCell> cells;
  std::vector<std::vector<SiteId>> delaunay;
  cells.reserve(sites_.size());
  delaunay.reserve(sites_.size());
  for (SiteId id = 0; id < sites_.size(); ++id) {
    Block block = read_block(id);
    cells.push_back(std::move(block.cell));
    delaunay.push_back(std::move(block.delaunay));
  }
  return VoronoiDiagram(sites_, clip_box_, std::move(cells), std::move(delaunay));
}

void CellFile::set_cache_capacity(std::size_t capacity) {
  std::lock_guard lock(cache_->mutex);
  cache_->capacity = capacity;
  while (cache_->entries.size() > capacity) {
    cache_->entries.erase(cache_->order.back());
    cache_->order.pop_back();
  }
}

}  // namespace ssky
