#pragma once

#include <optional>
#include <string>

#include "phir/mesh.hpp"

namespace phir {

// A closed surface with conforming volumetric complexes. The tet complexes
// index into a vertex array whose first surface.vertex_count() entries are
// the surface vertices.
struct SolidFixture {
  std::string name;
  TriMesh surface;
  TetComplex interior;
  std::optional<TetComplex> exterior;
};

TriMesh make_icosahedron();
// Icosahedron subdivided `levels` times and projected to the unit sphere.
TriMesh make_icosphere(int levels);
// Icosphere plus a cone of tets from its center.
SolidFixture make_sphere_solid(int levels);

// Torus with tube angle u (nu samples) and ring angle v (nv samples):
// p(u, v) = ((R + r cos u) cos v, (R + r cos u) sin v, r sin u).
// Constant-u rings go around the hole (tunnel class); constant-v rings go
// around the tube (handle class). Vertex id = j * nu + i for (u_i, v_j).
// Each grid quad is split along the diagonal through its smallest vertex id.
TriMesh make_torus(double R, double r, int nu, int nv);
// make_torus plus a solid-torus tetrahedralization through one axis vertex
// per ring (3 tets per prism, consistent with the surface diagonals).
SolidFixture make_torus_solid(double R, double r, int nu, int nv);

// Occupancy grid on unit-spaced cells.
struct VoxelSolid {
  int nx = 0, ny = 0, nz = 0;
  std::vector<char> occupied;  // x fastest
  double cell_size = 1.0;
  Vec3 origin;

  bool at(int i, int j, int k) const {
    if (i < 0 || j < 0 || k < 0 || i >= nx || j >= ny || k >= nz) return false;
    return occupied[(static_cast<std::size_t>(k) * ny + j) * nx + i] != 0;
  }
};

// Plate of resolution x 6 x 2 cells with hole_count 2x2 through-holes.
VoxelSolid make_holed_plate(int hole_count, int resolution);

// Boundary surface (two triangles per square, diagonal from the square's
// min corner to its max corner), interior (6-tet Kuhn split of occupied
// cells), and exterior (same split of the empty cells of a box padded by
// `padding` cells). Shared diagonals make all three conform.
SolidFixture voxel_fixture(const VoxelSolid& solid, int padding = 2);

SolidFixture make_voxel_genus_solid(int hole_count, int resolution);

// Applies a similarity to every geometric part of the fixture.
SolidFixture transform_fixture(const SolidFixture& fx, const SimilarityTransform& t);

}  // namespace phir
