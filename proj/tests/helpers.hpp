#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "ssky/geom.hpp"

namespace testing {

using ssky::Point2;

inline std::vector<Point2> random_points(std::size_t n, std::mt19937_64& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<Point2> pts(n);
  for (auto& p : pts) {
    p.x = u(rng);
    p.y = u(rng);
  }
  return pts;
}

inline std::vector<Point2> normal_points(std::size_t n, Point2 c, double sigma, std::mt19937_64& rng) {
  std::normal_distribution<double> nx(c.x, sigma), ny(c.y, sigma);
  std::vector<Point2> pts(n);
  for (auto& p : pts) {
    p.x = nx(rng);
    p.y = ny(rng);
  }
  return pts;
}

// Brute-force hull membership: on or left of every directed edge of the
// counterclockwise reading of a clockwise polygon.
inline bool inside_or_on_cw(Point2 p, std::span<const Point2> cw, double eps = 1e-9) {
  const std::size_t n = cw.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 a = cw[i];
    const Point2 b = cw[(i + 1) % n];
    if (ssky::cross(a, b, p) > eps) return false;
  }
  return true;
}

// Per-test scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("ssky_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing

namespace testing {

// Closed convex polygons (or segments/points) intersect iff no edge normal of
// either separates them; `eps` widens contact.
inline bool convex_intersect(std::span<const Point2> a, std::span<const Point2> b, double eps = 1e-12) {
  auto separated_by = [&](Point2 axis) {
    double amin = INFINITY, amax = -INFINITY, bmin = INFINITY, bmax = -INFINITY;
    for (const Point2& p : a) {
      amin = std::min(amin, ssky::dot(axis, p));
      amax = std::max(amax, ssky::dot(axis, p));
    }
    for (const Point2& p : b) {
      bmin = std::min(bmin, ssky::dot(axis, p));
      bmax = std::max(bmax, ssky::dot(axis, p));
    }
    return amax < bmin - eps || bmax < amin - eps;
  };
  auto axes = [&](std::span<const Point2> poly, bool& found) {
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n && !found; ++i) {
      const Point2 d{poly[(i + 1) % n].x - poly[i].x, poly[(i + 1) % n].y - poly[i].y};
      const double len = std::hypot(d.x, d.y);
      if (len == 0.0) continue;
      if (separated_by({-d.y / len, d.x / len}) || separated_by({d.x / len, d.y / len})) found = true;
    }
  };
  bool found = separated_by({1, 0}) || separated_by({0, 1});
  axes(a, found);
  axes(b, found);
  return !found;
}

// Index of the nearest site, lowest index on ties.
inline std::size_t nearest_site(std::span<const Point2> sites, Point2 q) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < sites.size(); ++i) {
    if (ssky::dist2(sites[i], q) < ssky::dist2(sites[best], q)) best = i;
  }
  return best;
}

// Closed parameter interval of segment a->b on which `s` is a nearest site,
// from the linear constraints |x(t)-s|^2 <= |x(t)-j|^2 + slack. Empty when lo > hi.
inline std::pair<double, double> nearest_interval(std::span<const Point2> sites, std::size_t s, Point2 a, Point2 b,
                                                  double slack) {
  double lo = 0.0, hi = 1.0;
  const Point2 d{b.x - a.x, b.y - a.y};
  for (std::size_t j = 0; j < sites.size() && lo <= hi; ++j) {
    if (j == s) continue;
    // |x-s|^2 - |x-j|^2 = 2 x.(j - s) + |s|^2 - |j|^2, with x = a + t d.
    const Point2 js{sites[j].x - sites[s].x, sites[j].y - sites[s].y};
    const double c0 = 2.0 * ssky::dot(a, js) + ssky::dot(sites[s], sites[s]) - ssky::dot(sites[j], sites[j]) - slack;
    const double c1 = 2.0 * ssky::dot(d, js);
    // c0 + c1 t <= 0
    if (c1 == 0.0) {
      if (c0 > 0.0) lo = 2.0;
    } else if (c1 > 0.0) {
      hi = std::min(hi, -c0 / c1);
    } else {
      lo = std::max(lo, -c0 / c1);
    }
  }
  return {lo, hi};
}

}  // namespace testing
