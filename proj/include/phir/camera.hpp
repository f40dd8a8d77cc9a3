#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "phir/geometry.hpp"
#include "phir/loops.hpp"
#include "phir/mesh.hpp"

namespace phir {

struct Camera {
  Vec3 position;
  Vec3 look_at;
  Vec3 up{0.0, 0.0, 1.0};
  double fov = 40.0;  // vertical, degrees
  int width = 64;
  int height = 64;

  // Throws ArgumentError on coincident position/look_at, up parallel to the
  // view direction, fov outside (0, 180), or a non-positive resolution.
  void validate() const;
  Vec3 forward() const { return normalize(look_at - position); }
  // Focal length in pixels.
  double focal() const;
};

// Orthonormal view basis (right, true up, forward).
struct CameraBasis {
  Vec3 right, up, forward;
};
CameraBasis camera_basis(const Camera& cam);

struct CameraLens {
  double fov = 40.0;
  int width = 64;
  int height = 64;
};

// Fibonacci lattice z_i = 1 - (2i + 1)/n; n == 1 gives the +z camera.
std::vector<Camera> uniform_sphere_cameras(int n, double radius, const Vec3& center,
                                           const CameraLens& lens = {});

struct LoopFrame {
  Vec3 centroid;
  Vec3 normal;
  double radius = 0.0;
  // Unit vector toward the first loop vertex, orthogonal to the normal.
  Vec3 reference;
};

// Least-variance normal of the loop vertices. The sign points to the side
// whose ray from the centroid crosses fewer surface triangles; ties go
// toward the loop centroid minus the mesh vertex centroid, then to a
// positive largest component. Throws ArgumentError for collinear loops.
LoopFrame loop_frame(const LoopCycle& loop, const TriMesh& mesh);

// Two axial cameras plus (per_loop - 2) cameras on a 35 degree cone around
// the frame normal for every tunnel loop; handle loops are ignored.
std::vector<Camera> ph_guided_cameras(const std::vector<LoopCycle>& loops, const TriMesh& mesh,
                                      int per_loop, double distance_factor,
                                      const CameraLens& lens = {});

// Guided cameras first, then the uniform cameras whose direction from their
// look_at point is farther than min_angle degrees from every guided camera.
std::vector<Camera> merge_collaborative(const std::vector<Camera>& uniform,
                                        const std::vector<Camera>& guided, double min_angle);

std::string cameras_json(const std::vector<Camera>& cams);
std::vector<Camera> parse_cameras_json(const std::string& text);
void save_cameras(const std::vector<Camera>& cams, const std::string& path);
std::vector<Camera> load_cameras(const std::string& path);

}  // namespace phir
