#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/SparseCore>

#include "phir/camera.hpp"
#include "phir/mesh.hpp"
#include "phir/render.hpp"

namespace phir {

struct BiLaplacian {
  Eigen::SparseMatrix<double> graph;   // D - A, uniform weights
  Eigen::SparseMatrix<double> matrix;  // graph * graph
};

BiLaplacian build_bilaplacian(const TriMesh& mesh);

struct Energy {
  double value = 0.0;
  std::vector<Vec3> grad;
};

// sum over x, y, z columns of col^T L col; gradient 2 L x. Evaluated as
// |G x|^2 with G the graph Laplacian.
Energy smoothness(std::span<const Vec3> x, const BiLaplacian& L);

// Reference-to-current in-plane map of one face, row-major 2x2.
struct FaceJacobian {
  std::array<double, 4> m{};
  double det() const { return m[0] * m[3] - m[1] * m[2]; }
};

// Throws ConfigurationError when a reference face has zero area, and
// ArgumentError when x does not match the reference vertex count.
std::vector<FaceJacobian> face_jacobians(std::span<const Vec3> x, const TriMesh& reference);

// sum_k min(0, det J_k)^2 with its gradient.
Energy inversion_penalty(std::span<const Vec3> x, const TriMesh& reference);

// Faces with det J_k <= 0.
int count_flips(std::span<const Vec3> x, const TriMesh& reference);

struct AdamState {
  std::vector<double> m, v;
  long t = 0;
  double lr = 1e-3, beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
};

void adam_step(AdamState& state, std::span<const double> grad, std::span<double> params);

struct LossBreakdown {
  double phi = 0.0, smooth = 0.0, inversion = 0.0, total = 0.0;
  double w1 = 0.0, w2 = 0.0;
  int flips = 0;
};

struct OptimConfig {
  double w1 = 1e-2;
  double w2 = 1.0;
  double lr = 1e-3;
  int steps = 600;
  bool precondition = false;
  double lambda = 19.0;
  RenderConfig render;
  int checkpoint_every = 0;
  // Called with (step, mesh) every checkpoint_every steps and at the end.
  std::function<void(int, const TriMesh&)> on_checkpoint;
  std::optional<int> target_genus;
};

struct OptimResult {
  TriMesh mesh;
  // steps + 1 entries: the initial state and the state after every step.
  std::vector<LossBreakdown> history;
  std::vector<std::string> warnings;
};

OptimResult optimize(const TriMesh& mesh0, const std::vector<Camera>& cams,
                     const std::vector<ImageBuffer>& targets, const OptimConfig& cfg);

// `step,phi,smooth,inversion,total,flips`
void write_loss_csv(const std::vector<LossBreakdown>& history, std::ostream& out);

}  // namespace phir
