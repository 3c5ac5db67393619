#include "predicates.hpp"

#include <array>
#include <cmath>
#include <limits>

#include <boost/multiprecision/cpp_int.hpp>

namespace ssky::detail {

namespace {

using Rational = boost::multiprecision::cpp_rational;

// Shewchuk's error-bound constants for the non-adaptive stage.
constexpr double kEps = std::numeric_limits<double>::epsilon() / 2.0;
constexpr double kOrientBound = (3.0 + 16.0 * kEps) * kEps;
constexpr double kIncircleBound = (10.0 + 96.0 * kEps) * kEps;

template <typename T>
int sign_of(const T& v) {
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

int orient_rational(Point2 a, Point2 b, Point2 c) {
  const Rational ax(a.x), ay(a.y), bx(b.x), by(b.y), cx(c.x), cy(c.y);
  const Rational det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
  return sign_of(det);
}

int incircle_rational(Point2 a, Point2 b, Point2 c, Point2 d) {
  const Rational dx(d.x), dy(d.y);
  const Rational adx = Rational(a.x) - dx, ady = Rational(a.y) - dy;
  const Rational bdx = Rational(b.x) - dx, bdy = Rational(b.y) - dy;
  const Rational cdx = Rational(c.x) - dx, cdy = Rational(c.y) - dy;
  const Rational alift = adx * adx + ady * ady;
  const Rational blift = bdx * bdx + bdy * bdy;
  const Rational clift = cdx * cdx + cdy * cdy;
  const Rational det = alift * (bdx * cdy - cdx * bdy) + blift * (cdx * ady - adx * cdy) +
                       clift * (adx * bdy - bdx * ady);
  return sign_of(det);
}

}  // namespace

int orient2d_exact(Point2 a, Point2 b, Point2 c) {
  const double left = (a.x - c.x) * (b.y - c.y);
  const double right = (a.y - c.y) * (b.x - c.x);
  const double det = left - right;
  const double bound = kOrientBound * (std::fabs(left) + std::fabs(right));
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return orient_rational(a, b, c);
}

int incircle_exact(Point2 a, Point2 b, Point2 c, Point2 d) {
  const double adx = a.x - d.x, ady = a.y - d.y;
  const double bdx = b.x - d.x, bdy = b.y - d.y;
  const double cdx = c.x - d.x, cdy = c.y - d.y;

  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;
  const double alift = adx * adx + ady * ady;
  const double blift = bdx * bdx + bdy * bdy;
  const double clift = cdx * cdx + cdy * cdy;

  const double det = alift * (bdxcdy - cdxbdy) + blift * (cdxady - adxcdy) + clift * (adxbdy - bdxady);
  const double permanent = (std::fabs(bdxcdy) + std::fabs(cdxbdy)) * alift +
                           (std::fabs(cdxady) + std::fabs(adxcdy)) * blift +
                           (std::fabs(adxbdy) + std::fabs(bdxady)) * clift;
  const double bound = kIncircleBound * permanent;
  if (det > bound) return 1;
  if (-det > bound) return -1;
  return incircle_rational(a, b, c, d);
}

int incircle_perturbed(Point2 a, unsigned ia, Point2 b, unsigned ib, Point2 c, unsigned ic, Point2 d,
                       unsigned id) {
  const int s = incircle_exact(a, b, c, d);
  if (s != 0) return s;

  // Lowering the lifted coordinate of one row changes the 4x4 determinant by
  // minus its cofactor, a signed orientation of the other three points. The
  // dominant infinitesimal belongs to the smallest id.
  struct Term {
    unsigned id;
    int sign;
  };
  std::array<Term, 4> terms{{
      {ia, -orient2d_exact(b, c, d)},
      {ib, orient2d_exact(a, c, d)},
      {ic, -orient2d_exact(a, b, d)},
      {id, orient2d_exact(a, b, c)},
  }};
  const Term* best = &terms[0];
  for (const Term& t : terms) {
    if (t.id < best->id) best = &t;
  }
  return best->sign;
}

}  // namespace ssky::detail
