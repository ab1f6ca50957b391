#include "bglue/geometry/linearize.hpp"

#include "bglue/errors.hpp"

namespace bglue::geometry {

long tiny_log2() { return -4L * numeric::working_precision(); }

BigScalar tiny_surrogate() { return BigScalar::pow2(tiny_log2()); }

Point linearized_apply(const std::function<Point(const Point&)>& fn, const Point& p) {
  const int t = p.tiny_index(tiny_log2());
  if (t < 0) return fn(p);

  const LogScalar u = p.x[t].log();
  const BigScalar ustar = tiny_surrogate();
  Point p0 = p;
  p0.x[t] = BigScalar(0);
  Point ps = p;
  ps.x[t] = u.sign() > 0 ? ustar : -ustar;

  // The surrogate sits 4 bits-widths below 1; chart changes (1 - s and the like)
  // only resolve it with a wider mantissa.
  const int bits = numeric::working_precision();
  Point q0, qs;
  {
    numeric::PrecisionScope wide(6 * bits);
    q0 = fn(p0);
    qs = fn(ps);
  }
  if (q0.chart != qs.chart || q0.dim() != qs.dim()) {
    throw DomainError("linearized evaluation at " + p.to_string() + " changed chart between the boundary (" +
                      q0.chart + ") and the surrogate point (" + qs.chart + ")");
  }
  // u / u* as a log-magnitude; its decoded value is far below working precision.
  const BigScalar log_ratio = u.logmag() - log(ustar);
  Point out = q0;
  for (size_t i = 0; i < q0.dim(); ++i) {
    BigScalar v0 = q0.x[i].big();
    BigScalar vs = qs.x[i].big();
    BigScalar d = vs - v0;
    // Roundoff of the wide evaluation on a boundary value counts as zero.
    if (abs(v0) < ustar * BigScalar::pow2(-bits)) v0 = BigScalar(0), d = vs;
    if (v0.is_zero()) {
      if (d.is_zero()) {
        out.x[i] = BigScalar(0);
      } else {
        // Relative to u, sign carried by the surrogate difference.
        int s = d.sign() > 0 ? 1 : -1;
        out.x[i] = LogScalar(s, log(abs(d)) - log(ustar) + u.logmag());
      }
    } else {
      out.x[i] = v0 + d * exp(log_ratio);
    }
  }
  return out;
}

}  // namespace bglue::geometry
