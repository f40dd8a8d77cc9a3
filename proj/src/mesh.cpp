#include "phir/mesh.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <string>

#include "phir/errors.hpp"

namespace phir {

Aabb TriMesh::bounds() const {
  Aabb box;
  for (const auto& v : vertices) box.expand(v);
  return box;
}

void TriMesh::validate() const {
  const int n = static_cast<int>(vertices.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto& t = faces[f];
    for (int k = 0; k < 3; ++k)
      if (t[k] < 0 || t[k] >= n)
        throw ArgumentError("face " + std::to_string(f) + " references vertex " +
                            std::to_string(t[k]) + " out of range");
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
      throw ArgumentError("face " + std::to_string(f) + " repeats a vertex");
  }
}

EdgeTopology::EdgeTopology(const TriMesh& mesh) {
  mesh.validate();
  const std::size_t n = mesh.vertices.size();
  vertex_faces.assign(n, {});
  vertex_neighbors.assign(n, {});
  std::vector<std::tuple<int, int, int>> half;  // (lo, hi, face)
  half.reserve(mesh.faces.size() * 3);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    const auto& t = mesh.faces[f];
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      half.emplace_back(std::min(a, b), std::max(a, b), static_cast<int>(f));
      vertex_faces[t[k]].push_back(static_cast<int>(f));
    }
  }
  std::sort(half.begin(), half.end());
  for (std::size_t i = 0; i < half.size();) {
    auto [a, b, f] = half[i];
    edges.push_back({a, b});
    edge_faces.emplace_back();
    while (i < half.size() && std::get<0>(half[i]) == a && std::get<1>(half[i]) == b) {
      edge_faces.back().push_back(std::get<2>(half[i]));
      ++i;
    }
    vertex_neighbors[a].push_back(b);
    vertex_neighbors[b].push_back(a);
  }
  for (auto& nb : vertex_neighbors) std::sort(nb.begin(), nb.end());
}

int EdgeTopology::find_edge(int a, int b) const {
  if (a > b) std::swap(a, b);
  std::array<int, 2> key{a, b};
  auto it = std::lower_bound(edges.begin(), edges.end(), key);
  if (it == edges.end() || *it != key) return -1;
  return static_cast<int>(it - edges.begin());
}

bool is_closed_manifold(const TriMesh& mesh) {
  if (mesh.faces.empty()) return false;
  EdgeTopology topo(mesh);
  return std::all_of(topo.edge_faces.begin(), topo.edge_faces.end(),
                     [](const auto& f) { return f.size() == 2; });
}

bool is_connected(const TriMesh& mesh) {
  if (mesh.faces.empty()) return false;
  EdgeTopology topo(mesh);
  std::vector<char> seen(mesh.vertices.size(), 0);
  std::queue<int> q;
  q.push(mesh.faces[0][0]);
  seen[mesh.faces[0][0]] = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    for (int w : topo.vertex_neighbors[v])
      if (!seen[w]) {
        seen[w] = 1;
        q.push(w);
      }
  }
  for (const auto& f : mesh.faces)
    for (int v : f)
      if (!seen[v]) return false;
  return true;
}

int genus(const TriMesh& mesh) {
  if (!is_closed_manifold(mesh)) throw TopologyError("genus: mesh is not a closed edge-manifold");
  if (!is_connected(mesh)) throw TopologyError("genus: mesh is not connected");
  EdgeTopology topo(mesh);
  std::size_t v = 0;
  for (const auto& vf : topo.vertex_faces)
    if (!vf.empty()) ++v;
  const long chi = static_cast<long>(v) - static_cast<long>(topo.edges.size()) +
                   static_cast<long>(mesh.faces.size());
  if ((2 - chi) % 2 != 0 || chi > 2)
    throw TopologyError("genus: inconsistent Euler characteristic " + std::to_string(chi));
  return static_cast<int>((2 - chi) / 2);
}

SimplicialComplex surface_complex(const TriMesh& mesh) {
  mesh.validate();
  std::vector<Simplex> s;
  s.reserve(mesh.faces.size());
  for (const auto& f : mesh.faces) s.push_back(Simplex{f[0], f[1], f[2]});
  return SimplicialComplex::from_simplices(s);
}

TetComplex::TetComplex(std::vector<Vec3> vertices, std::vector<Tet> tets)
    : vertices_(std::move(vertices)), tets_(std::move(tets)) {
  const int n = static_cast<int>(vertices_.size());
  std::vector<Simplex> s;
  s.reserve(tets_.size());
  for (const auto& t : tets_) {
    for (int v : t)
      if (v < 0 || v >= n) throw ArgumentError("tet references vertex out of range");
    s.push_back(Simplex{t[0], t[1], t[2], t[3]});
  }
  complex_ = std::make_shared<const SimplicialComplex>(SimplicialComplex::from_simplices(s));
}

bool TetComplex::conforms_to(const TriMesh& surface) const {
  for (const auto& f : surface.faces) {
    if (!complex_->contains(Simplex{f[0], f[1], f[2]})) return false;
    for (int k = 0; k < 3; ++k) {
      if (!complex_->contains(Simplex{f[k], f[(k + 1) % 3]})) return false;
      if (!complex_->contains(Simplex{f[k]})) return false;
    }
  }
  return true;
}

std::pair<TriMesh, SimilarityTransform> normalize_unit_box(const TriMesh& mesh) {
  Aabb box = mesh.bounds();
  if (box.empty()) throw ArgumentError("normalize_unit_box: empty mesh");
  const Vec3 ext = box.extent();
  const double longest = std::max({ext.x, ext.y, ext.z});
  if (!(longest > 0.0)) throw ArgumentError("normalize_unit_box: zero-extent mesh");
  SimilarityTransform t;
  t.scale = 1.0 / longest;
  t.translation = Vec3{0.5, 0.5, 0.5} - box.center() * t.scale;
  return {transform_mesh(mesh, t), t};
}

TriMesh transform_mesh(const TriMesh& mesh, const SimilarityTransform& t) {
  TriMesh out = mesh;
  for (auto& v : out.vertices) v = t.apply(v);
  return out;
}

TetComplex transform_tets(const TetComplex& tets, const SimilarityTransform& t) {
  std::vector<Vec3> v = tets.vertices();
  for (auto& p : v) p = t.apply(p);
  return TetComplex(std::move(v), tets.tets());
}

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double face_area(const TriMesh& mesh, int f) {
  const auto& t = mesh.faces[f];
  const auto& p = mesh.vertices;
  return 0.5 * norm(cross(p[t[1]] - p[t[0]], p[t[2]] - p[t[0]]));
}

double surface_area(const TriMesh& mesh) {
  double a = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) a += face_area(mesh, static_cast<int>(f));
  return a;
}

std::vector<Vec3> sample_surface(const TriMesh& mesh, std::size_t n, std::uint64_t seed,
                                 std::vector<int>* face_of_sample) {
  if (mesh.faces.empty()) throw ArgumentError("sample_surface: mesh has no faces");
  std::vector<double> cdf(mesh.faces.size());
  double acc = 0.0;
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    acc += face_area(mesh, static_cast<int>(f));
    cdf[f] = acc;
  }
  if (!(acc > 0.0)) throw ArgumentError("sample_surface: mesh has zero area");
  SplitMix64 rng(seed);
  std::vector<Vec3> out;
  out.reserve(n);
  if (face_of_sample) face_of_sample->clear();
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    const int f = static_cast<int>(it - cdf.begin());
    const double r1 = std::sqrt(rng.uniform()), r2 = rng.uniform();
    const auto& t = mesh.faces[f];
    const Vec3& a = mesh.vertices[t[0]];
    const Vec3& b = mesh.vertices[t[1]];
    const Vec3& c = mesh.vertices[t[2]];
    out.push_back(a * (1.0 - r1) + b * (r1 * (1.0 - r2)) + c * (r1 * r2));
    if (face_of_sample) face_of_sample->push_back(f);
  }
  return out;
}

namespace {

// Crossing count along dir; false when any hit is degenerate.
bool count_crossings(const TriMesh& mesh, const Vec3& origin, const Vec3& dir, int& count) {
  count = 0;
  for (const auto& f : mesh.faces) {
    RayHit hit;
    if (!ray_triangle(origin, dir, mesh.vertices[f[0]], mesh.vertices[f[1]], mesh.vertices[f[2]],
                      hit, 1e-10))
      continue;
    if (hit.t <= 0.0) continue;
    if (hit.degenerate) return false;
    ++count;
  }
  return true;
}

}  // namespace

int ray_crossings(const TriMesh& mesh, const Vec3& origin, const Vec3& dir) {
  int count = 0;
  Vec3 d = dir;
  for (int attempt = 0; attempt < 16; ++attempt) {
    if (count_crossings(mesh, origin, d, count)) return count;
    // Fixed, deterministic perturbation sequence.
    const double s = 1e-7 * (attempt + 1);
    d = normalize(dir + Vec3{0.0, s * 0.7548776662, s * 0.5698402910});
  }
  return count;
}

bool point_inside(const TriMesh& mesh, const Vec3& p) {
  return ray_crossings(mesh, p, Vec3{1.0, 0.0, 0.0}) % 2 == 1;
}

TriMesh laplacian_smooth(const TriMesh& mesh, int rounds, double step) {
  EdgeTopology topo(mesh);
  TriMesh out = mesh;
  std::vector<Vec3> next(out.vertices.size());
  for (int r = 0; r < rounds; ++r) {
    for (std::size_t v = 0; v < out.vertices.size(); ++v) {
      const auto& nb = topo.vertex_neighbors[v];
      if (nb.empty()) {
        next[v] = out.vertices[v];
        continue;
      }
      Vec3 sum;
      for (int w : nb) sum += out.vertices[w];
      const Vec3 mean = sum / static_cast<double>(nb.size());
      next[v] = out.vertices[v] + (mean - out.vertices[v]) * step;
    }
    out.vertices.swap(next);
  }
  return out;
}

}  // namespace phir
