#include <algorithm>
#include <cmath>
#include <limits>

#include "phir/simd/kernels.hpp"

namespace phir::simd {

namespace {

void polygon_row(const Polygon& poly, double x0, double y, int n, double* sd, int* edge) {
  for (int j = 0; j < n; ++j) {
    const double px = x0 + static_cast<double>(j);
    double best = std::numeric_limits<double>::infinity();
    int best_edge = 0;
    bool inside = poly.orientation != 0.0;
    for (int i = 0; i < poly.count; ++i) {
      const int k = i + 1 == poly.count ? 0 : i + 1;
      const double ex = poly.x[k] - poly.x[i];
      const double ey = poly.y[k] - poly.y[i];
      const double rx = px - poly.x[i];
      const double ry = y - poly.y[i];
      const double len2 = ex * ex + ey * ey;
      const double num = rx * ex + ry * ey;
      double t = len2 > 0.0 ? num / len2 : 0.0;
      t = std::min(std::max(t, 0.0), 1.0);
      const double dx = rx - t * ex;
      const double dy = ry - t * ey;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best) {
        best = d2;
        best_edge = i;
      }
      const double c = (ex * ry - ey * rx) * poly.orientation;
      if (!(c >= 0.0)) inside = false;
    }
    const double d = std::sqrt(best);
    sd[j] = inside ? d : -d;
    edge[j] = best_edge;
  }
}

double nearest(const double* xs, const double* ys, const double* zs, std::size_t n, double px,
               double py, double pz, std::size_t* index) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = static_cast<std::size_t>(-1);
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = px - xs[i];
    const double dy = py - ys[i];
    const double dz = pz - zs[i];
    const double d2 = dx * dx + dy * dy + dz * dz;
    if (d2 < best) {
      best = d2;
      arg = i;
    }
  }
  if (index) *index = arg;
  return best;
}

void adam(const AdamParams& p, const double* grad, double* m, double* v, double* params,
          std::size_t n) {
  const double a1 = 1.0 - p.beta1, a2 = 1.0 - p.beta2;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    m[i] = p.beta1 * m[i] + a1 * g;
    v[i] = p.beta2 * v[i] + a2 * (g * g);
    const double mh = m[i] / p.bias1;
    const double vh = v[i] / p.bias2;
    params[i] = params[i] - p.lr * mh / (std::sqrt(vh) + p.eps);
  }
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k{"scalar", polygon_row, nearest, adam};
  return k;
}

}  // namespace phir::simd
