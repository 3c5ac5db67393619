#pragma once

#include "ssky/geom.hpp"

// Exact-sign predicates used by the triangulator. A floating-point filter
// answers most calls; the rest fall back to exact rational arithmetic.
namespace ssky::detail {

// Sign of cross(a, b, c): +1 counterclockwise, -1 clockwise, 0 collinear.
int orient2d_exact(Point2 a, Point2 b, Point2 c);

// Sign of the in-circle determinant: +1 when d lies inside the circle through
// counterclockwise a, b, c, -1 outside, 0 cocircular.
int incircle_exact(Point2 a, Point2 b, Point2 c, Point2 d);

// In-circle with symbolic perturbation: the lifted coordinate of each point is
// lowered by an infinitesimal that is larger for smaller ids, so four distinct
// cocircular points never report 0. Ids must be distinct.
int incircle_perturbed(Point2 a, unsigned ia, Point2 b, unsigned ib, Point2 c, unsigned ic, Point2 d,
                       unsigned id);

}  // namespace ssky::detail
