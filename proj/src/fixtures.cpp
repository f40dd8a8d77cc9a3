#include "phir/fixtures.hpp"

#include <algorithm>
#include <map>
#include <numbers>

#include "phir/errors.hpp"

namespace phir {

TriMesh make_icosahedron() {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriMesh m;
  m.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  for (auto& v : m.vertices) v = normalize(v);
  m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
             {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
             {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  return m;
}

TriMesh make_icosphere(int levels) {
  if (levels < 0) throw ArgumentError("icosphere levels must be >= 0");
  TriMesh m = make_icosahedron();
  for (int l = 0; l < levels; ++l) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      int id = static_cast<int>(m.vertices.size());
      m.vertices.push_back(normalize((m.vertices[a] + m.vertices[b]) * 0.5));
      mid.emplace(key, id);
      return id;
    };
    std::vector<Face> faces;
    for (const auto& f : m.faces) {
      int ab = midpoint(f[0], f[1]), bc = midpoint(f[1], f[2]), ca = midpoint(f[2], f[0]);
      faces.push_back({f[0], ab, ca});
      faces.push_back({f[1], bc, ab});
      faces.push_back({f[2], ca, bc});
      faces.push_back({ab, bc, ca});
    }
    m.faces = std::move(faces);
  }
  return m;
}

SolidFixture make_sphere_solid(int levels) {
  SolidFixture fx;
  fx.name = "sphere";
  fx.surface = make_icosphere(levels);
  std::vector<Vec3> verts = fx.surface.vertices;
  const int center = static_cast<int>(verts.size());
  verts.push_back({0, 0, 0});
  std::vector<Tet> tets;
  for (const auto& f : fx.surface.faces) tets.push_back({center, f[0], f[1], f[2]});
  fx.interior = TetComplex(std::move(verts), std::move(tets));
  return fx;
}

TriMesh make_torus(double R, double r, int nu, int nv) {
  if (!(r > 0.0) || !(R > r)) throw ArgumentError("make_torus: need R > r > 0");
  if (nu < 3 || nv < 3) throw ArgumentError("make_torus: need nu, nv >= 3");
  TriMesh m;
  m.vertices.resize(static_cast<std::size_t>(nu) * nv);
  for (int j = 0; j < nv; ++j) {
    const double v = 2.0 * std::numbers::pi * j / nv;
    for (int i = 0; i < nu; ++i) {
      const double u = 2.0 * std::numbers::pi * i / nu;
      const double ring = R + r * std::cos(u);
      m.vertices[j * nu + i] = {ring * std::cos(v), ring * std::sin(v), r * std::sin(u)};
    }
  }
  auto id = [nu, nv](int i, int j) { return ((j % nv + nv) % nv) * nu + ((i % nu + nu) % nu); };
  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < nu; ++i) {
      // Counter-clockwise seen from outside: (u,v) -> (u,v+1) -> (u+1,v+1) -> (u+1,v).
      const int a = id(i, j), b = id(i, j + 1), c = id(i + 1, j + 1), d = id(i + 1, j);
      const int lo = std::min({a, b, c, d});
      if (lo == a || lo == c) {
        m.faces.push_back({a, b, c});
        m.faces.push_back({a, c, d});
      } else {
        m.faces.push_back({a, b, d});
        m.faces.push_back({b, c, d});
      }
    }
  return m;
}

namespace {

// Splits a triangular prism (bottom v[0..2], top v[3..5], v[k+3] above v[k])
// into 3 tets such that each quad face is cut through its smallest vertex.
void split_prism(std::array<int, 6> v, std::vector<Tet>& out) {
  static constexpr int kRotate[6][6] = {{0, 1, 2, 3, 4, 5}, {1, 2, 0, 4, 5, 3},
                                        {2, 0, 1, 5, 3, 4}, {3, 5, 4, 0, 2, 1},
                                        {4, 3, 5, 1, 0, 2}, {5, 4, 3, 2, 1, 0}};
  const int lo = static_cast<int>(std::min_element(v.begin(), v.end()) - v.begin());
  std::array<int, 6> w{};
  for (int k = 0; k < 6; ++k) w[k] = v[kRotate[lo][k]];
  if (std::min(w[1], w[5]) < std::min(w[2], w[4])) {
    out.push_back({w[0], w[1], w[2], w[5]});
    out.push_back({w[0], w[1], w[5], w[4]});
    out.push_back({w[0], w[4], w[5], w[3]});
  } else {
    out.push_back({w[0], w[1], w[2], w[4]});
    out.push_back({w[0], w[4], w[2], w[5]});
    out.push_back({w[0], w[4], w[5], w[3]});
  }
}

}  // namespace

SolidFixture make_torus_solid(double R, double r, int nu, int nv) {
  SolidFixture fx;
  fx.name = "torus";
  fx.surface = make_torus(R, r, nu, nv);
  std::vector<Vec3> verts = fx.surface.vertices;
  const int axis0 = static_cast<int>(verts.size());
  for (int j = 0; j < nv; ++j) {
    const double v = 2.0 * std::numbers::pi * j / nv;
    verts.push_back({R * std::cos(v), R * std::sin(v), 0.0});
  }
  auto id = [nu](int i, int j) { return j * nu + i; };
  std::vector<Tet> tets;
  for (int j = 0; j < nv; ++j) {
    const int j1 = (j + 1) % nv;
    for (int i = 0; i < nu; ++i) {
      const int i1 = (i + 1) % nu;
      split_prism({axis0 + j, id(i, j), id(i1, j), axis0 + j1, id(i, j1), id(i1, j1)}, tets);
    }
  }
  fx.interior = TetComplex(std::move(verts), std::move(tets));
  return fx;
}

VoxelSolid make_holed_plate(int hole_count, int resolution) {
  if (hole_count < 0) throw ArgumentError("hole_count must be >= 0");
  if (resolution < 4 * hole_count + 4)
    throw ArgumentError("resolution " + std::to_string(resolution) + " cannot separate " +
                        std::to_string(hole_count) + " holes (need >= " +
                        std::to_string(4 * hole_count + 4) + ")");
  VoxelSolid s;
  s.nx = resolution;
  s.ny = 6;
  s.nz = 2;
  s.occupied.assign(static_cast<std::size_t>(s.nx) * s.ny * s.nz, 1);
  for (int h = 0; h < hole_count; ++h)
    for (int k = 0; k < s.nz; ++k)
      for (int j = 2; j < 4; ++j)
        for (int i = 2 + 4 * h; i < 4 + 4 * h; ++i)
          s.occupied[(static_cast<std::size_t>(k) * s.ny + j) * s.nx + i] = 0;
  return s;
}

SolidFixture voxel_fixture(const VoxelSolid& solid, int padding) {
  const int lo = -padding;
  const int hx = solid.nx + padding, hy = solid.ny + padding, hz = solid.nz + padding;
  // Grid vertices span [lo, h] on each axis.
  const int vx = hx - lo + 1, vy = hy - lo + 1, vz = hz - lo + 1;
  auto gkey = [&](int i, int j, int k) {
    return (static_cast<std::size_t>(k - lo) * vy + (j - lo)) * vx + (i - lo);
  };
  std::vector<int> ids(static_cast<std::size_t>(vx) * vy * vz, -1);
  std::vector<Vec3> verts;
  auto pos = [&](int i, int j, int k) {
    return solid.origin + Vec3{double(i), double(j), double(k)} * solid.cell_size;
  };
  auto assign = [&](int i, int j, int k) {
    int& slot = ids[gkey(i, j, k)];
    if (slot < 0) {
      slot = static_cast<int>(verts.size());
      verts.push_back(pos(i, j, k));
    }
    return slot;
  };

  static constexpr int kAxis[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  struct Square {
    std::array<int, 3> base;
    int axis;
    bool positive;
  };
  std::vector<Square> squares;
  for (int k = 0; k < solid.nz; ++k)
    for (int j = 0; j < solid.ny; ++j)
      for (int i = 0; i < solid.nx; ++i) {
        if (!solid.at(i, j, k)) continue;
        for (int a = 0; a < 3; ++a)
          for (int s : {-1, 1}) {
            const int ni = i + s * kAxis[a][0], nj = j + s * kAxis[a][1], nk = k + s * kAxis[a][2];
            if (solid.at(ni, nj, nk)) continue;
            std::array<int, 3> base{i, j, k};
            if (s > 0) base[a] += 1;
            squares.push_back({base, a, s > 0});
          }
      }

  // Surface vertices first, in lexicographic (z, y, x) order.
  std::vector<std::array<int, 3>> corners;
  for (const auto& sq : squares) {
    const int b = (sq.axis + 1) % 3, c = (sq.axis + 2) % 3;
    for (int db = 0; db < 2; ++db)
      for (int dc = 0; dc < 2; ++dc) {
        auto p = sq.base;
        p[b] += db;
        p[c] += dc;
        corners.push_back(p);
      }
  }
  std::sort(corners.begin(), corners.end(), [](const auto& x, const auto& y) {
    return std::tie(x[2], x[1], x[0]) < std::tie(y[2], y[1], y[0]);
  });
  for (const auto& p : corners) assign(p[0], p[1], p[2]);
  const std::size_t surface_vertices = verts.size();

  TriMesh surface;
  for (const auto& sq : squares) {
    const int b = (sq.axis + 1) % 3, c = (sq.axis + 2) % 3;
    auto corner = [&](int db, int dc) {
      auto p = sq.base;
      p[b] += db;
      p[c] += dc;
      return ids[gkey(p[0], p[1], p[2])];
    };
    const int p00 = corner(0, 0), p10 = corner(1, 0), p11 = corner(1, 1), p01 = corner(0, 1);
    // e_b x e_c = +e_axis.
    if (sq.positive) {
      surface.faces.push_back({p00, p10, p11});
      surface.faces.push_back({p00, p11, p01});
    } else {
      surface.faces.push_back({p00, p11, p10});
      surface.faces.push_back({p00, p01, p11});
    }
  }

  static constexpr int kPerm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                      {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  auto kuhn = [&](int i, int j, int k, std::vector<Tet>& out) {
    for (const auto& perm : kPerm) {
      std::array<int, 3> p{i, j, k};
      Tet t{};
      t[0] = assign(p[0], p[1], p[2]);
      for (int step = 0; step < 3; ++step) {
        p[perm[step]] += 1;
        t[step + 1] = assign(p[0], p[1], p[2]);
      }
      out.push_back(t);
    }
  };
  std::vector<Tet> inner, outer;
  for (int k = 0; k < solid.nz; ++k)
    for (int j = 0; j < solid.ny; ++j)
      for (int i = 0; i < solid.nx; ++i)
        if (solid.at(i, j, k)) kuhn(i, j, k, inner);
  for (int k = lo; k < hz; ++k)
    for (int j = lo; j < hy; ++j)
      for (int i = lo; i < hx; ++i)
        if (!solid.at(i, j, k)) kuhn(i, j, k, outer);

  SolidFixture fx;
  fx.name = "voxel";
  surface.vertices.assign(verts.begin(), verts.begin() + static_cast<long>(surface_vertices));
  fx.surface = std::move(surface);
  fx.interior = TetComplex(verts, std::move(inner));
  fx.exterior = TetComplex(std::move(verts), std::move(outer));
  return fx;
}

SolidFixture make_voxel_genus_solid(int hole_count, int resolution) {
  SolidFixture fx = voxel_fixture(make_holed_plate(hole_count, resolution));
  fx.name = "voxel-genus" + std::to_string(hole_count);
  return fx;
}

SolidFixture transform_fixture(const SolidFixture& fx, const SimilarityTransform& t) {
  SolidFixture out;
  out.name = fx.name;
  out.surface = transform_mesh(fx.surface, t);
  out.interior = transform_tets(fx.interior, t);
  if (fx.exterior) out.exterior = transform_tets(*fx.exterior, t);
  return out;
}

}  // namespace phir
