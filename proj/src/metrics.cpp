#include "phir/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "phir/errors.hpp"
#include "phir/simd/kernels.hpp"

namespace phir {

PointGrid::PointGrid(std::span<const Vec3> points) {
  if (points.empty()) throw ArgumentError("PointGrid: no points");
  Aabb box;
  for (const auto& p : points) box.expand(p);
  origin_ = box.lo;
  const Vec3 ext = box.extent();
  const double longest = std::max({ext.x, ext.y, ext.z});
  const double per_axis = std::max(1.0, std::cbrt(static_cast<double>(points.size()) / 2.0));
  cell_ = longest > 0.0 ? longest / per_axis : 1.0;
  for (int k = 0; k < 3; ++k)
    dims_[k] = std::clamp(static_cast<int>(std::floor(ext[k] / cell_)) + 1, 1, 512);
  const std::size_t cells = static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
  std::vector<int> cell_of(points.size());
  start_.assign(cells + 1, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    int c[3];
    for (int k = 0; k < 3; ++k)
      c[k] = std::clamp(static_cast<int>(std::floor((points[i][k] - origin_[k]) / cell_)), 0, dims_[k] - 1);
    cell_of[i] = (c[2] * dims_[1] + c[1]) * dims_[0] + c[0];
    ++start_[cell_of[i] + 1];
  }
  std::partial_sum(start_.begin(), start_.end(), start_.begin());
  std::vector<int> fill(start_.begin(), start_.end() - 1);
  xs_.resize(points.size());
  ys_.resize(points.size());
  zs_.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int slot = fill[cell_of[i]]++;
    xs_[slot] = points[i].x;
    ys_[slot] = points[i].y;
    zs_[slot] = points[i].z;
  }
}

double PointGrid::nearest_sq(const Vec3& q) const {
  const auto& k = simd::active();
  int c[3];
  for (int a = 0; a < 3; ++a)
    c[a] = std::clamp(static_cast<int>(std::floor((q[a] - origin_[a]) / cell_)), 0, dims_[a] - 1);
  double best = HUGE_VAL;
  for (int r = 0;; ++r) {
    for (int z = c[2] - r; z <= c[2] + r; ++z) {
      if (z < 0 || z >= dims_[2]) continue;
      for (int y = c[1] - r; y <= c[1] + r; ++y) {
        if (y < 0 || y >= dims_[1]) continue;
        const bool face_zy = std::abs(z - c[2]) == r || std::abs(y - c[1]) == r;
        for (int x = c[0] - r; x <= c[0] + r; x += (face_zy || r == 0) ? 1 : 2 * r) {
          if (x < 0 || x >= dims_[0]) continue;
          const int cell = (z * dims_[1] + y) * dims_[0] + x;
          const int b = start_[cell], e = start_[cell + 1];
          if (b == e) continue;
          const double d2 = k.nearest(xs_.data() + b, ys_.data() + b, zs_.data() + b,
                                      static_cast<std::size_t>(e - b), q.x, q.y, q.z, nullptr);
          best = std::min(best, d2);
        }
      }
    }
    // Distance from q to the nearest unsearched region.
    double bound = HUGE_VAL;
    bool covered = true;
    for (int a = 0; a < 3; ++a) {
      if (c[a] - r > 0) {
        covered = false;
        bound = std::min(bound, q[a] - (origin_[a] + (c[a] - r) * cell_));
      }
      if (c[a] + r < dims_[a] - 1) {
        covered = false;
        bound = std::min(bound, origin_[a] + (c[a] + r + 1) * cell_ - q[a]);
      }
    }
    if (covered) return best;
    if (bound > 0.0 && best <= bound * bound) return best;
  }
}

double chamfer(const TriMesh& a, const TriMesh& b, std::size_t n, std::uint64_t seed) {
  if (a.faces.empty() || b.faces.empty()) throw ArgumentError("chamfer: empty mesh");
  if (n < 1) throw ArgumentError("chamfer: n must be >= 1");
  const auto pa = sample_surface(a, n, seed);
  const auto pb = sample_surface(b, n, seed);
  const PointGrid ga(pa), gb(pb);
  double sa = 0.0, sb = 0.0;
  for (const auto& p : pa) sa += std::sqrt(gb.nearest_sq(p));
  for (const auto& p : pb) sb += std::sqrt(ga.nearest_sq(p));
  return 0.5 * (sa / static_cast<double>(n) + sb / static_cast<double>(n));
}

namespace {

enum class RowHit { miss, hit, degenerate };

RowHit row_crossing(const Vec3& A, const Vec3& B, const Vec3& C, double y, double z, double eps,
                    double& x) {
  auto orient = [&](const Vec3& u, const Vec3& v) {
    return (v.y - u.y) * (z - u.z) - (v.z - u.z) * (y - u.y);
  };
  const double w0 = orient(B, C), w1 = orient(C, A), w2 = orient(A, B);
  const double area = w0 + w1 + w2;
  const double scale = std::abs(w0) + std::abs(w1) + std::abs(w2);
  const double tol = eps * std::max(scale, 1e-300);
  if (std::abs(area) <= tol) {
    // Edge-on in projection: degenerate only when the ray touches it.
    const bool near_line = std::abs(w0) <= tol || std::abs(w1) <= tol || std::abs(w2) <= tol;
    const double ylo = std::min({A.y, B.y, C.y}), yhi = std::max({A.y, B.y, C.y});
    const double zlo = std::min({A.z, B.z, C.z}), zhi = std::max({A.z, B.z, C.z});
    if (near_line && y >= ylo && y <= yhi && z >= zlo && z <= zhi) return RowHit::degenerate;
    return RowHit::miss;
  }
  const double s = area > 0.0 ? 1.0 : -1.0;
  const double a0 = w0 * s, a1 = w1 * s, a2 = w2 * s;
  if (a0 < -tol || a1 < -tol || a2 < -tol) return RowHit::miss;
  if (a0 <= tol || a1 <= tol || a2 <= tol) return RowHit::degenerate;
  x = (w0 * A.x + w1 * B.x + w2 * C.x) / area;
  return RowHit::hit;
}

}  // namespace

std::vector<char> voxelize(const TriMesh& mesh, const Aabb& box, int grid_res) {
  if (grid_res < 1) throw ArgumentError("voxelize: grid_res must be >= 1");
  const Vec3 ext = box.extent();
  const Vec3 h = ext / static_cast<double>(grid_res);
  std::vector<char> inside(static_cast<std::size_t>(grid_res) * grid_res * grid_res, 0);
  struct FaceBox {
    double ylo, yhi, zlo, zhi;
  };
  std::vector<FaceBox> fb(mesh.faces.size());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& t = mesh.faces[f];
    const Vec3 &A = mesh.vertices[t[0]], &B = mesh.vertices[t[1]], &C = mesh.vertices[t[2]];
    fb[f] = {std::min({A.y, B.y, C.y}), std::max({A.y, B.y, C.y}), std::min({A.z, B.z, C.z}),
             std::max({A.z, B.z, C.z})};
  }
  std::vector<double> xs;
  const double cell = std::max({h.x, h.y, h.z});
  for (int k = 0; k < grid_res; ++k)
    for (int j = 0; j < grid_res; ++j) {
      double y = box.lo.y + (j + 0.5) * h.y;
      double z = box.lo.z + (k + 0.5) * h.z;
      for (int attempt = 0; attempt < 32; ++attempt) {
        xs.clear();
        bool degenerate = false;
        for (std::size_t f = 0; f < mesh.faces.size() && !degenerate; ++f) {
          if (y < fb[f].ylo || y > fb[f].yhi || z < fb[f].zlo || z > fb[f].zhi) continue;
          const auto& t = mesh.faces[f];
          double x;
          switch (row_crossing(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]], y, z,
                               1e-12, x)) {
            case RowHit::hit: xs.push_back(x); break;
            case RowHit::degenerate: degenerate = true; break;
            case RowHit::miss: break;
          }
        }
        if (!degenerate) break;
        const double s = 1e-7 * cell * (attempt + 1);
        y += s * 0.7548776662466927;
        z += s * 0.5698402909980532;
      }
      std::sort(xs.begin(), xs.end());
      std::size_t above = 0;  // crossings with x > voxel center
      for (int i = grid_res - 1; i >= 0; --i) {
        const double xc = box.lo.x + (i + 0.5) * h.x;
        while (above < xs.size() && xs[xs.size() - 1 - above] > xc) ++above;
        inside[(static_cast<std::size_t>(k) * grid_res + j) * grid_res + i] = above % 2 == 1;
      }
    }
  return inside;
}

double volume_iou(const TriMesh& a, const TriMesh& b, int grid_res) {
  if (!is_closed_manifold(a) || !is_closed_manifold(b))
    throw TopologyError("volume_iou: both meshes must be closed and watertight");
  Aabb box = a.bounds();
  const Aabb bb = b.bounds();
  box.expand(bb.lo);
  box.expand(bb.hi);
  const auto va = voxelize(a, box, grid_res);
  const auto vb = voxelize(b, box, grid_res);
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    inter += va[i] && vb[i];
    uni += va[i] || vb[i];
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace phir
