#include "phir/geometry.hpp"

#include <algorithm>

namespace phir {

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Closest-point regions (Ericson, Real-Time Collision Detection 5.1.5).
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return norm(ap);
  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return norm(bp);
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    return distance(p, a + ab * v);
  }
  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return norm(cp);
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    return distance(p, a + ac * w);
  }
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return distance(p, b + (c - b) * w);
  }
  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom, w = vc * denom;
  return distance(p, a + ab * v + ac * w);
}

bool ray_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
                  const Vec3& c, RayHit& hit, double edge_eps) {
  const Vec3 e1 = b - a, e2 = c - a;
  const Vec3 pvec = cross(dir, e2);
  const double det = dot(e1, pvec);
  if (det == 0.0) return false;
  const double inv = 1.0 / det;
  const Vec3 tvec = origin - a;
  const double u = dot(tvec, pvec) * inv;
  if (u < -edge_eps || u > 1.0 + edge_eps) return false;
  const Vec3 qvec = cross(tvec, e1);
  const double v = dot(dir, qvec) * inv;
  if (v < -edge_eps || u + v > 1.0 + edge_eps) return false;
  hit.t = dot(e2, qvec) * inv;
  hit.degenerate = u <= edge_eps || v <= edge_eps || u + v >= 1.0 - edge_eps;
  return true;
}

}  // namespace phir
