#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "phir/complex.hpp"
#include "phir/geometry.hpp"

namespace phir {

using Face = std::array<int, 3>;
using Tet = std::array<int, 4>;

// Triangle mesh; faces are consistently oriented vertex-id triples.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t face_count() const { return faces.size(); }
  Aabb bounds() const;
  // Throws ArgumentError when a face index is out of range or repeated.
  void validate() const;
};

// Undirected edges of a mesh, sorted, with their incident faces.
struct EdgeTopology {
  std::vector<std::array<int, 2>> edges;
  std::vector<std::vector<int>> edge_faces;  // faces incident to each edge
  std::vector<std::vector<int>> vertex_faces;
  std::vector<std::vector<int>> vertex_neighbors;  // sorted

  explicit EdgeTopology(const TriMesh& mesh);
  // Index of edge (a, b) or -1.
  int find_edge(int a, int b) const;
};

// Every edge shared by exactly two faces.
bool is_closed_manifold(const TriMesh& mesh);
bool is_connected(const TriMesh& mesh);

// g = (2 - V + E - F) / 2 over referenced vertices. Throws TopologyError for
// open, non-manifold, or disconnected input.
int genus(const TriMesh& mesh);

// Complex of all vertices, edges, and faces of the mesh.
SimplicialComplex surface_complex(const TriMesh& mesh);

// Tetrahedral complex over a vertex array shared with a surface mesh.
class TetComplex {
 public:
  TetComplex() = default;
  TetComplex(std::vector<Vec3> vertices, std::vector<Tet> tets);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  const std::vector<Tet>& tets() const { return tets_; }
  // Face closure of the tets.
  const SimplicialComplex& complex() const { return *complex_; }
  std::shared_ptr<const SimplicialComplex> complex_ptr() const { return complex_; }

  // True when every vertex, edge, and face of the surface is an induced simplex.
  bool conforms_to(const TriMesh& surface) const;

 private:
  std::vector<Vec3> vertices_;
  std::vector<Tet> tets_;
  std::shared_ptr<const SimplicialComplex> complex_ = std::make_shared<SimplicialComplex>();
};

// Uniform scale + translation.
struct SimilarityTransform {
  double scale = 1.0;
  Vec3 translation;

  Vec3 apply(const Vec3& p) const { return p * scale + translation; }
  Vec3 inverse(const Vec3& p) const { return (p - translation) / scale; }
};

// Maps the bounding box into [0,1]^3, centered, longest side to length 1.
std::pair<TriMesh, SimilarityTransform> normalize_unit_box(const TriMesh& mesh);
TriMesh transform_mesh(const TriMesh& mesh, const SimilarityTransform& t);
TetComplex transform_tets(const TetComplex& tets, const SimilarityTransform& t);

// Deterministic 64-bit generator (splitmix64) for sampling.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  // Uniform in [0, 1).
  double uniform();

 private:
  std::uint64_t state_;
};

// Area-weighted face choice, then uniform barycentric coordinates.
std::vector<Vec3> sample_surface(const TriMesh& mesh, std::size_t n, std::uint64_t seed,
                                 std::vector<int>* face_of_sample = nullptr);

double face_area(const TriMesh& mesh, int f);
double surface_area(const TriMesh& mesh);

// Parity test with rays along +x (jittered on degenerate hits).
bool point_inside(const TriMesh& mesh, const Vec3& p);

// Number of triangles crossed by the ray origin + t*dir, t > 0.
int ray_crossings(const TriMesh& mesh, const Vec3& origin, const Vec3& dir);

// Uniform-weight Laplacian smoothing: `rounds` Jacobi sweeps moving each
// vertex by `step` toward its neighbor mean.
TriMesh laplacian_smooth(const TriMesh& mesh, int rounds, double step = 0.5);

}  // namespace phir
