#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ssky/geom.hpp"
#include "ssky/skyline.hpp"

namespace ssky {

// n points uniform in [0,1]^2. Throws InvalidArgument when n == 0.
std::vector<Point2> gen_uniform(std::size_t n, std::uint64_t seed);

// k points with each coordinate normal around `center`, clamped to `clip`.
// `clamped` receives the number of coordinates that had to be clamped.
std::vector<Point2> gen_query(Point2 center, double sigma, std::size_t k, std::uint64_t seed, const Rect& clip,
                              std::size_t* clamped = nullptr);

struct PoiLoad {
  std::vector<Point2> points;         // min-max normalized to [0,1]^2
  std::vector<std::string> warnings;  // one per malformed row, "line N: ..."
};

// Rows of "x y" or "x,y", optionally followed by a category column. Throws
// IoError when unreadable and FormatError when no row parses.
PoiLoad load_poi(const std::filesystem::path& path);

// Plain point files: one "x,y" row per point, optional "x,y" header.
std::vector<Point2> load_points(const std::filesystem::path& path);
void save_points(const std::filesystem::path& path, std::span<const Point2> points);

// Query files: "query_id,x,y" rows, grouped by id in ascending order.
std::vector<std::vector<Point2>> load_queries(const std::filesystem::path& path);
void save_queries(const std::filesystem::path& path, const std::vector<std::vector<Point2>>& queries);

// Drops exact duplicate coordinates, keeping first occurrences in order.
std::vector<Point2> dedupe_points(std::span<const Point2> points);

enum class Algorithm { es, vs2, alg1, oracle };

std::string to_string(Algorithm a);
// Throws InvalidArgument for an unknown name.
Algorithm parse_algorithm(const std::string& name);

struct ExperimentConfig {
  // Nominal cardinalities, multiplied by `scale` to get the generated size.
  std::vector<std::size_t> cardinalities{500000};
  double scale = 0.1;
  std::vector<std::size_t> query_sizes{15};
  std::vector<double> sigmas{0.06};
  std::size_t queries = 100;
  std::uint64_t seed = 1;
  std::vector<Algorithm> algorithms{Algorithm::es, Algorithm::vs2, Algorithm::alg1};
  // Empty for synthetic uniform data; otherwise a POI file, and query centers
  // are drawn from the data points.
  std::filesystem::path poi_path;
  std::size_t fanout = 32;
  // Serve cells from a CellFile written into this directory instead of memory.
  std::filesystem::path cell_dir;

  // Flat "key = value" text; '#' starts a comment, lists are comma separated.
  // Throws FormatError naming the line for unknown keys or bad values.
  static ExperimentConfig parse(std::istream& in);
  static ExperimentConfig load(const std::filesystem::path& path);
};

struct QueryRecord {
  std::size_t cardinality = 0;  // generated size
  std::size_t query_size = 0;
  double sigma = 0.0;
  std::size_t query_index = 0;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::es;
  Metrics metrics;
  std::size_t skyline_size = 0;
};

struct ReportRow {
  std::size_t cardinality = 0;
  std::size_t query_size = 0;
  double sigma = 0.0;
  Algorithm algorithm = Algorithm::es;
  std::string statistic;  // "mean" or "median"
  double response_time_ms = 0.0;
  double cell_reads = 0.0;
  double index_node_reads = 0.0;
  double dominance_tests = 0.0;
  double skyline_size = 0.0;
  std::size_t queries = 0;
  std::size_t regenerated = 0;
  std::string status = "ok";  // or "failed: <reason>"
};

struct Report {
  std::vector<ReportRow> rows;
  std::vector<QueryRecord> records;

  // Header line then one row per ReportRow.
  void write_csv(std::ostream& out) const;
  void write_summary(std::ostream& out) const;
};

// Runs every algorithm on every query of every sweep point and checks that
// they agree. Throws ConsistencyFailure naming the query seed on any
// disagreement.
Report run_experiment(const ExperimentConfig& config);

// Prepared data and structures for running queries against one dataset.
class Workload {
 public:
  // Builds the Voronoi diagram, its cell index and a point index. When
  // `cell_dir` is non-empty the cells are written there and read back from
  // the file.
  Workload(std::vector<Point2> points, std::size_t fanout = 32, const std::filesystem::path& cell_dir = {});
  // Uses an existing CellFile, which must hold exactly `points` as sites.
  static Workload open(std::vector<Point2> points, const std::filesystem::path& cell_file, std::size_t fanout = 32);
  ~Workload();
  Workload(Workload&&) noexcept;
  Workload& operator=(Workload&&) noexcept;

  std::span<const Point2> points() const { return points_; }
  Rect clip_box() const;
  SpatialDatabase database() const;

  SkylineResult run(Algorithm algorithm, const QueryContext& ctx) const;

 private:
  struct Impl;
  Workload() = default;
  std::vector<Point2> points_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ssky
