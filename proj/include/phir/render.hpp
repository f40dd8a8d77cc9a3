#pragma once

#include <string>
#include <vector>

#include "phir/camera.hpp"
#include "phir/mesh.hpp"

namespace phir {

struct RenderConfig {
  double tau = 1.0;    // edge softness in pixels
  double near = 1e-3;  // camera-space clip depth
  void validate() const;
};

// Row-major values in [0, 1]; pixel (x, y) has center (x + 0.5, y + 0.5)
// with y growing downward.
struct ImageBuffer {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  ImageBuffer() = default;
  ImageBuffer(int w, int h, double fill = 0.0)
      : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}
  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

// Pinhole projection of a world point to pixel coordinates; false when the
// point is not in front of the near plane.
bool project(const Camera& cam, const Vec3& p, double& px, double& py, double near = 1e-3);

// Soft silhouette: S = 1 - prod_t (1 - logistic(sd_t / tau)) over the
// triangles whose padded screen box holds the pixel.
ImageBuffer render_silhouette(const TriMesh& mesh, const Camera& cam, const RenderConfig& cfg = {});

struct RenderLoss {
  double loss = 0.0;
  std::vector<Vec3> grad;  // per vertex
  std::vector<double> view_loss;
};

// Mean over views of the per-pixel mean squared error to the targets, with
// its exact gradient with respect to every vertex coordinate.
RenderLoss render_loss_and_grad(const TriMesh& mesh, const std::vector<Camera>& cams,
                                const std::vector<ImageBuffer>& targets,
                                const RenderConfig& cfg = {});

// 8-bit grayscale PNG.
void save_png(const ImageBuffer& img, const std::string& path);
// Little-endian uint32 width, uint32 height, then float32 values row-major.
void save_raw(const ImageBuffer& img, const std::string& path);
ImageBuffer load_raw(const std::string& path);

}  // namespace phir
