#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "phir/complex.hpp"
#include "phir/mesh.hpp"
#include "phir/render.hpp"

namespace testing {

using namespace phir;

// n x n grid torus in a flat layout, both diagonals of each quad going the
// same way. A simplicial complex for n >= 3.
inline TriMesh grid_torus(int n, double R = 2.0, double r = 0.7) {
  TriMesh m;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double u = 2.0 * M_PI * i / n, v = 2.0 * M_PI * j / n;
      m.vertices.push_back({(R + r * std::cos(u)) * std::cos(v), (R + r * std::cos(u)) * std::sin(v),
                            r * std::sin(u)});
    }
  auto id = [n](int i, int j) { return ((j + n) % n) * n + (i + n) % n; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      m.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      m.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  return m;
}

// Closed axis-aligned box [lo, lo + size], outward-oriented, 12 faces.
inline TriMesh box_mesh(Vec3 lo, Vec3 size) {
  TriMesh m;
  for (int i = 0; i < 8; ++i)
    m.vertices.push_back({lo.x + (i & 1 ? size.x : 0.0), lo.y + (i & 2 ? size.y : 0.0),
                          lo.z + (i & 4 ? size.z : 0.0)});
  const int quads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4},
                           {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  for (const auto& q : quads) {
    m.faces.push_back({q[0], q[1], q[2]});
    m.faces.push_back({q[0], q[2], q[3]});
  }
  return m;
}

// Connected sum of two 3x3 grid tori: one face removed from each and the
// boundaries glued. 15 vertices, 51 edges, 34 faces.
inline TriMesh genus2_connected_sum() {
  TriMesh a = grid_torus(3);
  TriMesh b = grid_torus(3);
  const Face cut = a.faces.front();
  a.faces.erase(a.faces.begin());
  b.faces.erase(b.faces.begin());
  TriMesh out = a;
  std::map<int, int> remap;
  for (int k = 0; k < 3; ++k) remap[cut[k]] = cut[k];
  for (int v = 0; v < static_cast<int>(b.vertices.size()); ++v) {
    if (remap.count(v)) continue;
    remap[v] = static_cast<int>(out.vertices.size());
    out.vertices.push_back(b.vertices[v] + Vec3{6.0, 0.0, 0.0});
  }
  for (const auto& f : b.faces) out.faces.push_back({remap[f[0]], remap[f[2]], remap[f[1]]});
  return out;
}

// Independent Z/2 test of whether `chain` (edge ids of `cx`) is a sum of
// triangle boundaries: dense bitset columns reduced by highest set bit.
class BoundarySpan {
 public:
  explicit BoundarySpan(const SimplicialComplex& cx) : cx_(cx) {
    for (std::size_t id = 0; id < cx.size(); ++id)
      if (cx.simplex(static_cast<int>(id)).dim() == 1) {
        row_[static_cast<int>(id)] = rows_++;
      }
    words_ = (rows_ + 63) / 64;
    for (std::size_t id = 0; id < cx.size(); ++id) {
      const Simplex& s = cx.simplex(static_cast<int>(id));
      if (s.dim() != 2) continue;
      Bits col(words_, 0);
      for (int k = 0; k < 3; ++k) {
        std::vector<int> e;
        for (int j = 0; j < 3; ++j)
          if (j != k) e.push_back(s[j]);
        flip(col, row_.at(cx.find(Simplex{e[0], e[1]})));
      }
      insert(std::move(col));
    }
  }

  bool contains(const std::vector<int>& edge_ids) const {
    Bits col(words_, 0);
    for (int id : edge_ids) flip(col, row_.at(id));
    reduce(col);
    return high(col) < 0;
  }

  int rank() const { return static_cast<int>(pivots_.size()); }

 private:
  using Bits = std::vector<std::uint64_t>;
  static void flip(Bits& b, int r) { b[r / 64] ^= std::uint64_t{1} << (r % 64); }
  static int high(const Bits& b) {
    for (int w = static_cast<int>(b.size()) - 1; w >= 0; --w)
      if (b[w]) return w * 64 + 63 - __builtin_clzll(b[w]);
    return -1;
  }
  void reduce(Bits& col) const {
    for (int h = high(col); h >= 0; h = high(col)) {
      auto it = pivots_.find(h);
      if (it == pivots_.end()) return;
      const Bits& p = it->second;
      for (int w = 0; w <= h / 64; ++w) col[w] ^= p[w];
    }
  }
  void insert(Bits col) {
    reduce(col);
    const int h = high(col);
    if (h >= 0) pivots_.emplace(h, std::move(col));
  }

  const SimplicialComplex& cx_;
  std::map<int, int> row_;
  int rows_ = 0;
  int words_ = 0;
  std::map<int, Bits> pivots_;
};

// |analytic - central difference| / |analytic| for every vertex coordinate
// whose analytic derivative exceeds `floor` in magnitude.
inline std::vector<double> render_fd_errors(const TriMesh& mesh, const std::vector<Camera>& cams,
                                            const std::vector<ImageBuffer>& targets,
                                            const RenderConfig& cfg, double h = 1e-4,
                                            double floor = 1e-6) {
  const RenderLoss base = render_loss_and_grad(mesh, cams, targets, cfg);
  std::vector<double> errs;
  TriMesh m = mesh;
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v)
    for (int k = 0; k < 3; ++k) {
      const double a = base.grad[v][k];
      if (std::abs(a) <= floor) continue;
      const double x = mesh.vertices[v][k];
      m.vertices[v][k] = x + h;
      const double up = render_loss_and_grad(m, cams, targets, cfg).loss;
      m.vertices[v][k] = x - h;
      const double dn = render_loss_and_grad(m, cams, targets, cfg).loss;
      m.vertices[v][k] = x;
      errs.push_back(std::abs(a - (up - dn) / (2.0 * h)) / std::abs(a));
    }
  return errs;
}

inline double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace testing
