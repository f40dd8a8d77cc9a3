#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "phir/mesh.hpp"

namespace phir {

// Exact nearest-neighbor queries over a fixed point set, bucketed on a
// uniform grid and searched in growing shells of cells.
class PointGrid {
 public:
  explicit PointGrid(std::span<const Vec3> points);
  // Squared distance to the nearest point; index of the lowest-index point
  // attaining it within the first bucket that reaches the minimum.
  double nearest_sq(const Vec3& q) const;

 private:
  Vec3 origin_;
  double cell_ = 1.0;
  int dims_[3] = {1, 1, 1};
  std::vector<int> start_;  // per cell, size cells + 1
  std::vector<double> xs_, ys_, zs_;
};

// Half the sum of the two directed mean nearest-sample distances between n
// area-weighted samples of each mesh, both drawn with the same seed.
double chamfer(const TriMesh& a, const TriMesh& b, std::size_t n, std::uint64_t seed);

// Occupancy of grid_res^3 voxel centers over the union bounding box of both
// meshes, by +x ray parity. Throws TopologyError for open meshes.
double volume_iou(const TriMesh& a, const TriMesh& b, int grid_res);

// Inside flags for the voxel centers (x fastest) of `box` split into
// grid_res cells per axis.
std::vector<char> voxelize(const TriMesh& mesh, const Aabb& box, int grid_res);

}  // namespace phir
