#pragma once

#include <cstddef>

namespace phir::simd {

// Screen-space convex polygon with up to 4 vertices.
struct Polygon {
  int count = 0;
  double x[4] = {0, 0, 0, 0};
  double y[4] = {0, 0, 0, 0};
  // +1 counter-clockwise, -1 clockwise, 0 degenerate (never inside).
  double orientation = 0.0;
};

// Signed distance (positive inside) from pixel centers (x0 + j, y), j < n,
// to the polygon boundary, plus the nearest edge (lowest index on ties).
// Edge i runs from vertex i to vertex i+1 (mod count).
using PolygonRowFn = void (*)(const Polygon& poly, double x0, double y, int n, double* sd,
                              int* edge);

// Smallest squared distance from (px, py, pz) to points [0, n) of an SoA
// array and the lowest index attaining it. n == 0 returns +inf, index -1.
using NearestFn = double (*)(const double* xs, const double* ys, const double* zs, std::size_t n,
                             double px, double py, double pz, std::size_t* index);

struct AdamParams {
  double lr, beta1, beta2, eps;
  double bias1, bias2;  // 1 - beta^t
};

// m, v, params updated in place from grad.
using AdamFn = void (*)(const AdamParams& p, const double* grad, double* m, double* v,
                        double* params, std::size_t n);

struct Kernels {
  const char* name;
  PolygonRowFn polygon_row;
  NearestFn nearest;
  AdamFn adam;
};

const Kernels& scalar_kernels();
// nullptr when the CPU or the build lacks AVX2.
const Kernels* avx2_kernels();

// Kernel set in use: AVX2 when available unless PHIR_FORCE_SCALAR is set to
// a non-empty value other than "0".
const Kernels& active();

}  // namespace phir::simd
