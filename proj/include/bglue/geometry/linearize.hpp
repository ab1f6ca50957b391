#pragma once

#include <functional>

#include "bglue/geometry/point.hpp"

namespace bglue::geometry {

/// Sub-range threshold at the working precision: log2 of the smallest
/// transverse magnitude that is materialized as a BigScalar (-4 * bits).
long tiny_log2();

/// Surrogate magnitude 2^tiny_log2() used in place of sub-range coordinates.
BigScalar tiny_surrogate();

/// Apply `fn` to a point that may carry one sub-range (log-form) coordinate u.
///
/// fn is evaluated at the same point with u replaced by 0 and by the
/// surrogate u* (same sign). An output coordinate that vanishes at 0 is
/// returned in log form as (fn(p*) / u*) * u; any other output keeps its
/// value at 0 plus the (negligible) linear correction. The relative error is
/// O(u*), far below working precision.
Point linearized_apply(const std::function<Point(const Point&)>& fn, const Point& p);

}  // namespace bglue::geometry
