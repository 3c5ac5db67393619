// ssky: data generation, Voronoi file building, skyline queries and sweeps.

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>

#include "ssky/bench.hpp"
#include "ssky/errors.hpp"
#include "ssky/storage.hpp"
#include "ssky/voronoi.hpp"

namespace {

using namespace ssky;

int gen_data(std::size_t n, std::uint64_t seed, const std::string& out) {
  save_points(out, gen_uniform(n, seed));
  std::cout << "wrote " << n << " points to " << out << "\n";
  return 0;
}

struct GenQueryArgs {
  std::vector<double> center;
  std::string from_data;
  double sigma = 0.06;
  std::size_t k = 15;
  std::size_t count = 1;
  std::uint64_t seed = 1;
  std::string out;
};

int gen_queries(const GenQueryArgs& a) {
  std::vector<Point2> data;
  Rect clip;
  if (!a.from_data.empty()) {
    data = load_points(a.from_data);
    if (data.empty()) throw InvalidArgument(a.from_data + " holds no points");
    clip = default_clip_box(data);
  } else {
    const Point2 unit[] = {{0.0, 0.0}, {1.0, 1.0}};
    clip = default_clip_box(unit);
  }

  std::vector<std::vector<Point2>> queries;
  std::size_t regenerated = 0;
  for (std::size_t i = 0; i < a.count; ++i) {
    for (std::uint64_t attempt = 0;; ++attempt) {
      std::mt19937_64 rng(a.seed + 1000003ull * i + attempt);
      Point2 center{a.center.empty() ? 0.5 : a.center[0], a.center.empty() ? 0.5 : a.center[1]};
      if (!data.empty()) center = data[std::uniform_int_distribution<std::size_t>(0, data.size() - 1)(rng)];
      std::size_t clamped = 0;
      auto q = gen_query(center, a.sigma, a.k, rng(), clip, &clamped);
      if (clamped == 0) {
        queries.push_back(std::move(q));
        break;
      }
      ++regenerated;
    }
  }
  save_queries(a.out, queries);
  std::cout << "wrote " << queries.size() << " queries to " << a.out << " (" << regenerated << " regenerated)\n";
  return 0;
}

int vd_build(const std::string& data_path, const std::string& out) {
  const auto points = load_points(data_path);
  const VoronoiDiagram diagram = build_voronoi(points);
  CellFile::write(out, diagram);
  std::cout << "wrote " << diagram.cell_count() << " cells to " << out << "\n";
  return 0;
}

int query(const std::string& data_path, const std::string& vd_path, const std::string& query_path,
          const std::vector<std::string>& algos, const std::string& report_path) {
  auto points = load_points(data_path);
  const Workload workload = vd_path.empty() ? Workload(std::move(points)) : Workload::open(std::move(points), vd_path);
  const auto queries = load_queries(query_path);

  std::ofstream report;
  if (!report_path.empty()) {
    report.open(report_path, std::ios::trunc);
    if (!report) throw IoError("cannot write " + report_path);
    report << "query_id,algorithm,response_time_ms,cell_reads,index_node_reads,dominance_tests,skyline_size,"
              "skyline_ids\n";
  }

  for (std::size_t qi = 0; qi < queries.size(); ++qi) {
    const QueryContext ctx(queries[qi]);
    for (const std::string& name : algos) {
      const SkylineResult r = workload.run(parse_algorithm(name), ctx);
      const double ms = std::chrono::duration<double, std::milli>(r.metrics.wall_time).count();
      std::cout << "query " << qi << " " << name << ": |S|=" << r.skyline_ids.size() << " tests="
                << r.metrics.dominance_tests << " cells=" << r.metrics.cell_reads
                << " index=" << r.metrics.index_node_reads << " time_ms=" << std::fixed << std::setprecision(3) << ms
                << std::defaultfloat << "\n";
      if (report) {
        report << qi << ',' << name << ',' << ms << ',' << r.metrics.cell_reads << ',' << r.metrics.index_node_reads
               << ',' << r.metrics.dominance_tests << ',' << r.skyline_ids.size() << ',';
        for (std::size_t i = 0; i < r.skyline_ids.size(); ++i) report << (i ? " " : "") << r.skyline_ids[i];
        report << '\n';
      }
    }
  }
  return 0;
}

int sweep(const std::string& config_path, const std::string& report_path) {
  const ExperimentConfig config = ExperimentConfig::load(config_path);
  const Report report = run_experiment(config);
  if (!report_path.empty()) {
    std::ofstream out(report_path, std::ios::trunc);
    if (!out) throw IoError("cannot write " + report_path);
    report.write_csv(out);
  }
  report.write_summary(std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spatial skyline engine"};
  app.require_subcommand(1);

  std::size_t n = 0;
  std::uint64_t seed = 1;
  std::string out;
  auto* gd = app.add_subcommand("gen-data", "Uniform points in the unit square");
  gd->add_option("--n", n, "Number of points")->required()->check(CLI::PositiveNumber);
  gd->add_option("--seed", seed, "Random seed");
  gd->add_option("--out", out, "Output CSV")->required();

  GenQueryArgs gq;
  auto* gqc = app.add_subcommand("gen-queries", "Normally distributed query sets");
  auto* center = gqc->add_option("--center", gq.center, "Center x y")->expected(2);
  auto* from = gqc->add_option("--from-data", gq.from_data, "Draw centers from this point file");
  center->excludes(from);
  from->excludes(center);
  gqc->add_option("--sigma", gq.sigma, "Standard deviation per coordinate")->check(CLI::PositiveNumber);
  gqc->add_option("--k", gq.k, "Points per query")->check(CLI::PositiveNumber);
  gqc->add_option("--count", gq.count, "Number of queries")->check(CLI::PositiveNumber);
  gqc->add_option("--seed", gq.seed, "Random seed");
  gqc->add_option("--out", gq.out, "Output CSV")->required();

  std::string data, vd;
  auto* vb = app.add_subcommand("vd-build", "Build a Voronoi cell file");
  vb->add_option("--data", data, "Point CSV")->required();
  vb->add_option("--out", out, "Cell file")->required();

  std::string queries, report;
  std::vector<std::string> algos{"es"};
  auto* qc = app.add_subcommand("query", "Run skyline queries");
  qc->add_option("--data", data, "Point CSV")->required();
  qc->add_option("--vd", vd, "Cell file (built in memory when omitted)");
  qc->add_option("--queries", queries, "Query CSV")->required();
  qc->add_option("--algo", algos, "es, vs2, alg1 or oracle; repeatable")
      ->check(CLI::IsMember({"es", "vs2", "alg1", "oracle"}));
  qc->add_option("--report", report, "Per-query CSV");

  std::string config;
  auto* sw = app.add_subcommand("sweep", "Run an experiment sweep");
  sw->add_option("--config", config, "key = value config file")->required();
  sw->add_option("--report", report, "Report CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gd) return gen_data(n, seed, out);
    if (*gqc) return gen_queries(gq);
    if (*vb) return vd_build(data, out);
    if (*qc) return query(data, vd, queries, algos, report);
    if (*sw) return sweep(config, report);
  } catch (const ssky::ConsistencyFailure& e) {
    std::cerr << "consistency failure: " << e.what() << "\n";
    return 3;
  } catch (const ssky::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
