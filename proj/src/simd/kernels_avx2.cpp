#include <cmath>
#include <limits>

#include "phir/simd/kernels.hpp"

#if defined(__AVX2__)
#include <immintrin.h>

namespace phir::simd {

namespace {

void polygon_row(const Polygon& poly, double x0, double y, int n, double* sd, int* edge) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d inf = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  const __m256d vy = _mm256_set1_pd(y);
  const __m256d orient = _mm256_set1_pd(poly.orientation);
  const __m256d lane = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  int j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d px = _mm256_add_pd(_mm256_set1_pd(x0), _mm256_add_pd(_mm256_set1_pd(static_cast<double>(j)), lane));
    __m256d best = inf;
    __m256d best_edge = zero;
    __m256d inside = poly.orientation != 0.0 ? _mm256_cmp_pd(zero, zero, _CMP_EQ_OQ) : zero;
    for (int i = 0; i < poly.count; ++i) {
      const int k = i + 1 == poly.count ? 0 : i + 1;
      const double exs = poly.x[k] - poly.x[i];
      const double eys = poly.y[k] - poly.y[i];
      const double len2s = exs * exs + eys * eys;
      const __m256d ex = _mm256_set1_pd(exs);
      const __m256d ey = _mm256_set1_pd(eys);
      const __m256d rx = _mm256_sub_pd(px, _mm256_set1_pd(poly.x[i]));
      const __m256d ry = _mm256_sub_pd(vy, _mm256_set1_pd(poly.y[i]));
      const __m256d num = _mm256_add_pd(_mm256_mul_pd(rx, ex), _mm256_mul_pd(ry, ey));
      __m256d t = len2s > 0.0 ? _mm256_div_pd(num, _mm256_set1_pd(len2s)) : zero;
      t = _mm256_min_pd(one, _mm256_max_pd(zero, t));
      const __m256d dx = _mm256_sub_pd(rx, _mm256_mul_pd(t, ex));
      const __m256d dy = _mm256_sub_pd(ry, _mm256_mul_pd(t, ey));
      const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
      const __m256d closer = _mm256_cmp_pd(d2, best, _CMP_LT_OQ);
      best = _mm256_blendv_pd(best, d2, closer);
      best_edge = _mm256_blendv_pd(best_edge, _mm256_set1_pd(static_cast<double>(i)), closer);
      const __m256d c = _mm256_mul_pd(_mm256_sub_pd(_mm256_mul_pd(ex, ry), _mm256_mul_pd(ey, rx)), orient);
      inside = _mm256_and_pd(inside, _mm256_cmp_pd(c, zero, _CMP_GE_OQ));
    }
    const __m256d d = _mm256_sqrt_pd(best);
    const __m256d neg = _mm256_xor_pd(d, sign_mask);
    _mm256_storeu_pd(sd + j, _mm256_blendv_pd(neg, d, inside));
    const __m128i e = _mm256_cvtpd_epi32(best_edge);
    _mm_storeu_si128(reinterpret_cast<__m128i*>(edge + j), e);
  }
  if (j < n) scalar_kernels().polygon_row(poly, x0 + static_cast<double>(j), y, n - j, sd + j, edge + j);
}

double nearest(const double* xs, const double* ys, const double* zs, std::size_t n, double px,
               double py, double pz, std::size_t* index) {
  const __m256d qx = _mm256_set1_pd(px), qy = _mm256_set1_pd(py), qz = _mm256_set1_pd(pz);
  __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  __m256d arg = _mm256_set1_pd(-1.0);
  __m256d idx = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
  const __m256d four = _mm256_set1_pd(4.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(qx, _mm256_loadu_pd(xs + i));
    const __m256d dy = _mm256_sub_pd(qy, _mm256_loadu_pd(ys + i));
    const __m256d dz = _mm256_sub_pd(qz, _mm256_loadu_pd(zs + i));
    const __m256d d2 = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
                                     _mm256_mul_pd(dz, dz));
    const __m256d closer = _mm256_cmp_pd(d2, best, _CMP_LT_OQ);
    best = _mm256_blendv_pd(best, d2, closer);
    arg = _mm256_blendv_pd(arg, idx, closer);
    idx = _mm256_add_pd(idx, four);
  }
  alignas(32) double b[4], a[4];
  _mm256_store_pd(b, best);
  _mm256_store_pd(a, arg);
  double value = std::numeric_limits<double>::infinity();
  double where = -1.0;
  for (int l = 0; l < 4; ++l)
    if (a[l] >= 0.0 && (b[l] < value || (b[l] == value && a[l] < where))) {
      value = b[l];
      where = a[l];
    }
  std::size_t result = where < 0.0 ? static_cast<std::size_t>(-1) : static_cast<std::size_t>(where);
  for (; i < n; ++i) {
    const double dx = px - xs[i];
    const double dy = py - ys[i];
    const double dz = pz - zs[i];
    const double d2 = dx * dx + dy * dy + dz * dz;
    if (d2 < value) {
      value = d2;
      result = i;
    }
  }
  if (index) *index = result;
  return value;
}

void adam(const AdamParams& p, const double* grad, double* m, double* v, double* params,
          std::size_t n) {
  const __m256d b1 = _mm256_set1_pd(p.beta1), b2 = _mm256_set1_pd(p.beta2);
  const __m256d a1 = _mm256_set1_pd(1.0 - p.beta1), a2 = _mm256_set1_pd(1.0 - p.beta2);
  const __m256d c1 = _mm256_set1_pd(p.bias1), c2 = _mm256_set1_pd(p.bias2);
  const __m256d lr = _mm256_set1_pd(p.lr), eps = _mm256_set1_pd(p.eps);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g = _mm256_loadu_pd(grad + i);
    const __m256d mi = _mm256_add_pd(_mm256_mul_pd(b1, _mm256_loadu_pd(m + i)), _mm256_mul_pd(a1, g));
    const __m256d vi = _mm256_add_pd(_mm256_mul_pd(b2, _mm256_loadu_pd(v + i)),
                                     _mm256_mul_pd(a2, _mm256_mul_pd(g, g)));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    const __m256d mh = _mm256_div_pd(mi, c1);
    const __m256d vh = _mm256_div_pd(vi, c2);
    const __m256d step = _mm256_div_pd(_mm256_mul_pd(lr, mh), _mm256_add_pd(_mm256_sqrt_pd(vh), eps));
    _mm256_storeu_pd(params + i, _mm256_sub_pd(_mm256_loadu_pd(params + i), step));
  }
  if (i < n) scalar_kernels().adam(p, grad + i, m + i, v + i, params + i, n - i);
}

}  // namespace

const Kernels* avx2_kernels() {
  static const Kernels k{"avx2", polygon_row, nearest, adam};
  static const bool ok = __builtin_cpu_supports("avx2");
  return ok ? &k : nullptr;
}

}  // namespace phir::simd

#else

namespace phir::simd {
const Kernels* avx2_kernels() { return nullptr; }
}  // namespace phir::simd

#endif
