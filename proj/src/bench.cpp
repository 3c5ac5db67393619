#include "ssky/bench.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "ssky/errors.hpp"
#include "ssky/index.hpp"
#include "ssky/storage.hpp"
#include "ssky/voronoi.hpp"

namespace ssky {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> parts) {
  std::uint64_t h = splitmix(base);
  for (std::uint64_t p : parts) h = splitmix(h ^ p);
  return h;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// Splits on commas, or on whitespace when the line has no comma.
std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  if (line.find(',') != std::string::npos) {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(trim(field));
  } else {
    std::stringstream ss(line);
    std::string field;
    while (ss >> field) out.push_back(field);
  }
  return out;
}

std::optional<double> parse_double(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) return std::nullopt;
  return v;
}

template <typename T>
std::optional<T> parse_unsigned(const std::string& s) {
  T v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot read " + path.string());
  }
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << std::setprecision(17);
  return out;
}

[[noreturn]] void bad_line(const std::filesystem::path& path, std::size_t line, const std::string& what) {
  throw FormatError(path.string() + ":" + std::to_string(line) + ": " + what);
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

}  // namespace

std::vector<Point2> gen_uniform(std::size_t n, std::uint64_t seed) {
  if (n == 0) {
    throw InvalidArgument("gen_uniform needs n >= 1");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Point2> points(n);
  for (auto& p : points) {
    p.x = unit(rng);
    p.y = unit(rng);
  }
  return points;
}

std::vector<Point2> gen_query(Point2 center, double sigma, std::size_t k, std::uint64_t seed, const Rect& clip,
                              std::size_t* clamped) {
  if (k == 0 || !(sigma > 0.0)) {
    throw InvalidArgument("gen_query needs k >= 1 and sigma > 0");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nx(center.x, sigma);
  std::normal_distribution<double> ny(center.y, sigma);
  std::size_t count = 0;
  auto clamp = [&](double v, double lo, double hi) {
    if (v < lo || v > hi) ++count;
    return std::clamp(v, lo, hi);
  };
  std::vector<Point2> points(k);
  for (auto& p : points) {
    p.x = clamp(nx(rng), clip.xmin, clip.xmax);
    p.y = clamp(ny(rng), clip.ymin, clip.ymax);
  }
  if (clamped) *clamped = count;
  return points;
}

PoiLoad load_poi(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  PoiLoad load;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto fields = split_fields(t);
    std::optional<double> x, y;
    if (fields.size() >= 2 && fields.size() <= 3) {
      x = parse_double(fields[0]);
      y = parse_double(fields[1]);
    }
    if (!x || !y) {
      load.warnings.push_back("line " + std::to_string(number) + ": malformed row '" + t + "'");
      continue;
    }
    load.points.push_back({*x, *y});
  }
  if (load.points.empty()) {
    throw FormatError(path.string() + ": no valid coordinate rows");
  }
  const Rect box = Rect::bounding(load.points);
  const double w = box.xmax - box.xmin;
  const double h = box.ymax - box.ymin;
  for (auto& p : load.points) {
    p.x = w > 0.0 ? (p.x - box.xmin) / w : 0.0;
    p.y = h > 0.0 ? (p.y - box.ymin) / h : 0.0;
  }
  return load;
}

std::vector<Point2> load_points(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::vector<Point2> points;
  std::string line;
  std::size_t number = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto fields = split_fields(t);
    const bool header = first && fields.size() == 2 && fields[0] == "x" && fields[1] == "y";
    first = false;
    if (header) continue;
    std::optional<double> x, y;
    if (fields.size() == 2) {
      x = parse_double(fields[0]);
      y = parse_double(fields[1]);
    }
    if (!x || !y) bad_line(path, number, "expected x,y");
    points.push_back({*x, *y});
  }
  return points;
}

void save_points(const std::filesystem::path& path, std::span<const Point2> points) {
  std::ofstream out = open_output(path);
  out << "x,y\n";
  for (const Point2& p : points) out << p.x << ',' << p.y << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<std::vector<Point2>> load_queries(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  std::map<std::uint64_t, std::vector<Point2>> groups;
  std::string line;
  std::size_t number = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto fields = split_fields(t);
    const bool header = first && fields.size() == 3 && fields[0] == "query_id";
    first = false;
    if (header) continue;
    if (fields.size() != 3) bad_line(path, number, "expected query_id,x,y");
    const auto id = parse_unsigned<std::uint64_t>(fields[0]);
    const auto x = parse_double(fields[1]);
    const auto y = parse_double(fields[2]);
    if (!id || !x || !y) bad_line(path, number, "expected query_id,x,y");
    groups[*id].push_back({*x, *y});
  }
  std::vector<std::vector<Point2>> out;
  for (auto& [id, pts] : groups) out.push_back(std::move(pts));
  return out;
}

void save_queries(const std::filesystem::path& path, const std::vector<std::vector<Point2>>& queries) {
  std::ofstream out = open_output(path);
  out << "query_id,x,y\n";
  for (std::size_t i = 0; i < queries.size(); ++i) {
    for (const Point2& p : queries[i]) out << i << ',' << p.x << ',' << p.y << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<Point2> dedupe_points(std::span<const Point2> points) {
  std::set<std::pair<double, double>> seen;
  std::vector<Point2> out;
  out.reserve(points.size());
  for (const Point2& p : points) {
    if (seen.emplace(p.x, p.y).second) out.push_back(p);
  }
  return out;
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::es:
      return "es";
    case Algorithm::vs2:
      return "vs2";
    case Algorithm::alg1:
      return "alg1";
    case Algorithm::oracle:
      return "oracle";
  }
  return "unknown";
}

Algorithm parse_algorithm(const std::string& name) {
  for (Algorithm a : {Algorithm::es, Algorithm::vs2, Algorithm::alg1, Algorithm::oracle}) {
    if (to_string(a) == name) return a;
  }
  throw InvalidArgument("unknown algorithm '" + name + "'");
}

ExperimentConfig ExperimentConfig::parse(std::istream& in) {
  ExperimentConfig config;
  std::string line;
  std::size_t number = 0;
  auto fail = [&](const std::string& what) {
    throw FormatError("config line " + std::to_string(number) + ": " + what);
  };
  auto list = [](const std::string& value) {
    std::vector<std::string> items;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) items.push_back(trim(item));
    return items;
  };
  auto count = [&](const std::string& v) {
    const auto n = parse_unsigned<std::size_t>(v);
    if (!n) fail("expected a non-negative integer, got '" + v + "'");
    return *n;
  };
  auto real = [&](const std::string& v) {
    const auto x = parse_double(v);
    if (!x) fail("expected a number, got '" + v + "'");
    return *x;
  };

  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    const std::string t = trim(line.substr(0, hash));
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key == "cardinalities") {
      config.cardinalities.clear();
      for (const auto& v : list(value)) config.cardinalities.push_back(count(v));
    } else if (key == "scale") {
      config.scale = real(value);
      if (!(config.scale > 0.0)) fail("scale must be positive");
    } else if (key == "query_sizes") {
      config.query_sizes.clear();
      for (const auto& v : list(value)) config.query_sizes.push_back(count(v));
    } else if (key == "sigmas") {
      config.sigmas.clear();
      for (const auto& v : list(value)) config.sigmas.push_back(real(v));
    } else if (key == "queries") {
      config.queries = count(value);
    } else if (key == "seed") {
      const auto s = parse_unsigned<std::uint64_t>(value);
      if (!s) fail("expected an unsigned seed, got '" + value + "'");
      config.seed = *s;
    } else if (key == "algorithms") {
      config.algorithms.clear();
      for (const auto& v : list(value)) {
        try {
          config.algorithms.push_back(parse_algorithm(v));
        } catch (const InvalidArgument& e) {
          fail(e.what());
        }
      }
    } else if (key == "poi_path") {
      config.poi_path = value;
    } else if (key == "fanout") {
      config.fanout = count(value);
    } else if (key == "cell_dir") {
      config.cell_dir = value;
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (config.cardinalities.empty() || config.query_sizes.empty() || config.sigmas.empty() ||
      config.algorithms.empty()) {
    throw FormatError("config lists must not be empty");
  }
  for (std::size_t k : config.query_sizes) {
    if (k == 0) throw FormatError("query sizes must be at least 1");
  }
  for (double s : config.sigmas) {
    if (!(s > 0.0)) throw FormatError("sigmas must be positive");
  }
  return config;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in = open_input(path);
  return parse(in);
}

struct Workload::Impl {
  std::optional<VoronoiDiagram> diagram;
  std::optional<CellFile> file;
  SpatialIndex cell_index;
  SpatialIndex point_index;

  const CellSource& cells() const {
    if (file) return *file;
    return *diagram;
  }
};

Workload::Workload(std::vector<Point2> points, std::size_t fanout, const std::filesystem::path& cell_dir)
    : points_(std::move(points)), impl_(std::make_unique<Impl>()) {
  impl_->diagram = build_voronoi(points_);
  if (!cell_dir.empty()) {
    std::filesystem::create_directories(cell_dir);
    const auto path = cell_dir / ("cells_" + std::to_string(points_.size()) + ".ssvd");
    CellFile::write(path, *impl_->diagram);
    impl_->diagram.reset();
    impl_->file = CellFile::open(path);
  }
  impl_->cell_index = build_cell_index(impl_->cells(), fanout);
  impl_->point_index = SpatialIndex::build_points(points_, fanout);
}

Workload Workload::open(std::vector<Point2> points, const std::filesystem::path& cell_file, std::size_t fanout) {
  Workload w;
  w.points_ = std::move(points);
  w.impl_ = std::make_unique<Impl>();
  w.impl_->file = CellFile::open(cell_file);
  const CellFile& file = *w.impl_->file;
  if (file.cell_count() != w.points_.size()) {
    throw InvalidArgument(cell_file.string() + " holds " + std::to_string(file.cell_count()) + " cells for " +
                          std::to_string(w.points_.size()) + " points");
  }
  for (SiteId id = 0; id < w.points_.size(); ++id) {
    if (!(file.site(id) == w.points_[id])) {
      throw InvalidArgument(cell_file.string() + " site " + std::to_string(id) + " does not match the data");
    }
  }
  w.impl_->cell_index = build_cell_index(file, fanout);
  w.impl_->point_index = SpatialIndex::build_points(w.points_, fanout);
  return w;
}

Workload::~Workload() = default;
Workload::Workload(Workload&&) noexcept = default;
Workload& Workload::operator=(Workload&&) noexcept = default;

Rect Workload::clip_box() const { return impl_->cells().clip_box(); }

SpatialDatabase Workload::database() const {
  return {points_, &impl_->cells(), &impl_->cell_index, &impl_->point_index};
}

SkylineResult Workload::run(Algorithm algorithm, const QueryContext& ctx) const {
  switch (algorithm) {
    case Algorithm::es:
      return enhanced_spatial_skyline(database(), ctx);
    case Algorithm::vs2:
      return vs2_corrected(database(), ctx);
    case Algorithm::alg1:
      return spatial_skyline(points_, ctx);
    case Algorithm::oracle: {
      const auto start = std::chrono::steady_clock::now();
      SkylineResult result;
      result.skyline_ids = brute_force_skyline(points_, ctx.query_points());
      result.metrics.wall_time = std::chrono::steady_clock::now() - start;
      return result;
    }
  }
  throw InvalidArgument("unknown algorithm");
}

Report run_experiment(const ExperimentConfig& config) {
  Report report;
  std::vector<Point2> poi;
  if (!config.poi_path.empty()) poi = dedupe_points(load_poi(config.poi_path).points);

  for (std::size_t nominal : config.cardinalities) {
    std::vector<Point2> points;
    if (!poi.empty()) {
      points = poi;
    } else {
      const auto n = static_cast<std::size_t>(std::max<long long>(1, std::llround(nominal * config.scale)));
      points = dedupe_points(gen_uniform(n, derive_seed(config.seed, {0xDA7Aull, nominal})));
    }
    const Workload workload(points, config.fanout, config.cell_dir);
    const std::size_t n = workload.points().size();

    for (std::size_t k : config.query_sizes) {
      for (double sigma : config.sigmas) {
        std::map<Algorithm, std::vector<QueryRecord>> records;
        std::map<Algorithm, std::string> failures;
        std::size_t regenerated = 0;

        for (std::size_t qi = 0; qi < config.queries; ++qi) {
          const std::uint64_t qseed = derive_seed(config.seed, {nominal, k, std::bit_cast<std::uint64_t>(sigma), qi});
          std::vector<Point2> q;
          for (std::uint64_t attempt = 0;; ++attempt) {
            std::mt19937_64 rng(qseed + attempt);
            Point2 center;
            if (!poi.empty()) {
              center = points[std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)];
            } else {
              std::uniform_real_distribution<double> unit(0.0, 1.0);
              center.x = unit(rng);
              center.y = unit(rng);
            }
            std::size_t clamped = 0;
            q = gen_query(center, sigma, k, rng(), workload.clip_box(), &clamped);
            if (clamped == 0) break;
            ++regenerated;
          }
          const QueryContext ctx(q);

          std::optional<std::vector<std::uint32_t>> reference;
          Algorithm reference_algo = Algorithm::es;
          for (Algorithm a : config.algorithms) {
            SkylineResult r;
            try {
              r = workload.run(a, ctx);
            } catch (const ConsistencyFailure&) {
              throw;
            } catch (const Error& e) {
              if (!failures.contains(a)) failures[a] = e.what();
              continue;
            }
            if (!reference) {
              reference = r.skyline_ids;
              reference_algo = a;
            } else if (*reference != r.skyline_ids) {
              std::ostringstream msg;
              msg << to_string(a) << " and " << to_string(reference_algo) << " disagree (" << r.skyline_ids.size()
                  << " vs " << reference->size() << " points) on query " << qi << " of |P|=" << n << " |Q|=" << k
                  << " sigma=" << sigma << ", seed " << qseed;
              throw ConsistencyFailure(msg.str());
            }
            records[a].push_back({n, k, sigma, qi, qseed, a, r.metrics, r.skyline_ids.size()});
          }
        }

        for (Algorithm a : config.algorithms) {
          const auto& recs = records[a];
          std::vector<double> time, cells, nodes, tests, sizes;
          for (const QueryRecord& r : recs) {
            time.push_back(std::chrono::duration<double, std::milli>(r.metrics.wall_time).count());
            cells.push_back(static_cast<double>(r.metrics.cell_reads));
            nodes.push_back(static_cast<double>(r.metrics.index_node_reads));
            tests.push_back(static_cast<double>(r.metrics.dominance_tests));
            sizes.push_back(static_cast<double>(r.skyline_size));
          }
          const std::string status = failures.contains(a) ? "failed: " + failures[a] : "ok";
          report.rows.push_back({n, k, sigma, a, "mean", mean(time), mean(cells), mean(nodes), mean(tests), mean(sizes),
                                 recs.size(), regenerated, status});
          report.rows.push_back({n, k, sigma, a, "median", median(time), median(cells), median(nodes), median(tests),
                                 median(sizes), recs.size(), regenerated, status});
          report.records.insert(report.records.end(), recs.begin(), recs.end());
        }
      }
    }
  }
  return report;
}

void Report::write_csv(std::ostream& out) const {
  out << "cardinality,query_size,sigma,algorithm,statistic,response_time_ms,cell_reads,index_node_reads,"
         "dominance_tests,skyline_size,queries,regenerated,status\n";
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::setprecision(10);
  for (const ReportRow& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    out << r.cardinality << ',' << r.query_size << ',' << r.sigma << ',' << to_string(r.algorithm) << ','
        << r.statistic << ',' << r.response_time_ms << ',' << r.cell_reads << ',' << r.index_node_reads << ','
        << r.dominance_tests << ',' << r.skyline_size << ',' << r.queries << ',' << r.regenerated << ',' << status
        << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

void Report::write_summary(std::ostream& out) const {
  const auto flags = out.flags();
  out << std::left << std::setw(9) << "|P|" << std::setw(5) << "|Q|" << std::setw(7) << "sigma" << std::setw(8)
      << "algo" << std::right << std::setw(12) << "time ms" << std::setw(12) << "cells" << std::setw(12)
      << "index" << std::setw(12) << "tests" << std::setw(9) << "|S|" << "  status\n";
  out << "(medians over each sweep point)\n";
  for (const ReportRow& r : rows) {
    if (r.statistic != "median") continue;
    out << std::left << std::setw(9) << r.cardinality << std::setw(5) << r.query_size << std::setw(7) << r.sigma
        << std::setw(8) << to_string(r.algorithm) << std::right << std::fixed << std::setprecision(3)
        << std::setw(12) << r.response_time_ms << std::setprecision(1) << std::setw(12) << r.cell_reads
        << std::setw(12) << r.index_node_reads << std::setw(12) << r.dominance_tests << std::setw(9)
        << r.skyline_size << "  " << r.status << '\n';
    out.unsetf(std::ios::fixed);
  }
  out.flags(flags);
}

}  // namespace ssky
