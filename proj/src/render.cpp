#include "phir/render.hpp"

#include <algorithm>
#include <cmath>

#include "phir/errors.hpp"
#include "phir/simd/kernels.hpp"

namespace phir {

void RenderConfig::validate() const {
  if (!(tau > 0.0)) throw ArgumentError("render: tau must be > 0");
  if (!(near > 0.0)) throw ArgumentError("render: near must be > 0");
}

namespace {

// Derivative of a 2D or 3D quantity with respect to the 9 coordinates of
// the source triangle's vertices.
using Row9 = std::array<double, 9>;

struct ClipVertex {
  Vec3 q;                   // camera space
  std::array<Row9, 3> dq;   // dq/dworld
};

struct ScreenPoly {
  simd::Polygon poly;
  std::array<std::array<Row9, 2>, 4> ds{};  // d(screen xy)/dworld per vertex
  int face = -1;
  int x_lo = 0, x_hi = -1, y_lo = 0, y_hi = -1;
};

struct Entry {
  int poly;
  int edge;
  double sd;
  double c;
};

struct ViewState {
  std::vector<ScreenPoly> polys;
  std::vector<int> offset;  // per pixel, size W*H+1
  std::vector<Entry> entries;
  ImageBuffer image;
};

ClipVertex lerp_clip(const ClipVertex& a, const ClipVertex& b, double near) {
  const double dz = b.q.z - a.q.z;
  const double s = (near - a.q.z) / dz;
  ClipVertex out;
  out.q = a.q + (b.q - a.q) * s;
  out.q.z = near;
  Row9 ds;
  for (int c = 0; c < 9; ++c) ds[c] = (-(1.0 - s) * a.dq[2][c] - s * b.dq[2][c]) / dz;
  const Vec3 delta = b.q - a.q;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 9; ++c)
      out.dq[r][c] = a.dq[r][c] + s * (b.dq[r][c] - a.dq[r][c]) + delta[r] * ds[c];
  return out;
}

void build_view(const TriMesh& mesh, const Camera& cam, const RenderConfig& cfg, ViewState& vs) {
  cam.validate();
  const CameraBasis basis = camera_basis(cam);
  const double f = cam.focal();
  const double cx = 0.5 * cam.width, cy = 0.5 * cam.height;
  const int W = cam.width, H = cam.height;
  const double pad = 4.0 * cfg.tau;

  std::vector<Vec3> q(mesh.vertices.size());
  for (std::size_t v = 0; v < q.size(); ++v) {
    const Vec3 d = mesh.vertices[v] - cam.position;
    q[v] = {dot(d, basis.right), dot(d, basis.up), dot(d, basis.forward)};
  }

  vs.polys.clear();
  for (std::size_t fi = 0; fi < mesh.faces.size(); ++fi) {
    const auto& tri = mesh.faces[fi];
    ClipVertex in[3];
    int front = 0;
    for (int k = 0; k < 3; ++k) {
      in[k].q = q[tri[k]];
      for (auto& row : in[k].dq) row.fill(0.0);
      for (int a = 0; a < 3; ++a) {
        in[k].dq[0][3 * k + a] = basis.right[a];
        in[k].dq[1][3 * k + a] = basis.up[a];
        in[k].dq[2][3 * k + a] = basis.forward[a];
      }
      if (in[k].q.z >= cfg.near) ++front;
    }
    if (front == 0) continue;
    ClipVertex out[4];
    int count = 0;
    if (front == 3) {
      for (int k = 0; k < 3; ++k) out[count++] = in[k];
    } else {
      for (int k = 0; k < 3; ++k) {
        const ClipVertex& a = in[k];
        const ClipVertex& b = in[(k + 1) % 3];
        const bool ia = a.q.z >= cfg.near, ib = b.q.z >= cfg.near;
        if (ia) out[count++] = a;
        if (ia != ib) out[count++] = lerp_clip(a, b, cfg.near);
      }
    }
    ScreenPoly sp;
    sp.face = static_cast<int>(fi);
    sp.poly.count = count;
    double xmin = HUGE_VAL, xmax = -HUGE_VAL, ymin = HUGE_VAL, ymax = -HUGE_VAL;
    for (int k = 0; k < count; ++k) {
      const Vec3& p = out[k].q;
      const double iz = 1.0 / p.z;
      const double sx = cx + f * p.x * iz;
      const double sy = cy - f * p.y * iz;
      sp.poly.x[k] = sx;
      sp.poly.y[k] = sy;
      // d(sx)/dq = (f/z, 0, -f x/z^2); d(sy)/dq = (0, -f/z, f y/z^2)
      const double ax = f * iz, az = -f * p.x * iz * iz;
      const double by = -f * iz, bz = f * p.y * iz * iz;
      for (int c = 0; c < 9; ++c) {
        sp.ds[k][0][c] = ax * out[k].dq[0][c] + az * out[k].dq[2][c];
        sp.ds[k][1][c] = by * out[k].dq[1][c] + bz * out[k].dq[2][c];
      }
      xmin = std::min(xmin, sx);
      xmax = std::max(xmax, sx);
      ymin = std::min(ymin, sy);
      ymax = std::max(ymax, sy);
    }
    double area2 = 0.0;
    for (int k = 0; k < count; ++k) {
      const int n = (k + 1) % count;
      area2 += sp.poly.x[k] * sp.poly.y[n] - sp.poly.x[n] * sp.poly.y[k];
    }
    sp.poly.orientation = area2 > 0.0 ? 1.0 : (area2 < 0.0 ? -1.0 : 0.0);
    const double lo_x = std::ceil(xmin - pad - 0.5), hi_x = std::floor(xmax + pad - 0.5);
    const double lo_y = std::ceil(ymin - pad - 0.5), hi_y = std::floor(ymax + pad - 0.5);
    if (!(hi_x >= 0.0 && lo_x <= W - 1 && hi_y >= 0.0 && lo_y <= H - 1)) continue;
    sp.x_lo = static_cast<int>(std::max(lo_x, 0.0));
    sp.x_hi = static_cast<int>(std::min(hi_x, static_cast<double>(W - 1)));
    sp.y_lo = static_cast<int>(std::max(lo_y, 0.0));
    sp.y_hi = static_cast<int>(std::min(hi_y, static_cast<double>(H - 1)));
    vs.polys.push_back(sp);
  }

  // Counting sort of (pixel, polygon) entries; polygons stay in face order.
  vs.offset.assign(static_cast<std::size_t>(W) * H + 1, 0);
  for (const auto& sp : vs.polys)
    for (int y = sp.y_lo; y <= sp.y_hi; ++y)
      for (int x = sp.x_lo; x <= sp.x_hi; ++x) ++vs.offset[static_cast<std::size_t>(y) * W + x + 1];
  for (std::size_t i = 1; i < vs.offset.size(); ++i) vs.offset[i] += vs.offset[i - 1];
  vs.entries.resize(vs.offset.back());
  std::vector<int> fill(vs.offset.begin(), vs.offset.end() - 1);
  const auto& kernels = simd::active();
  std::vector<double> sd(W);
  std::vector<int> edge(W);
  for (std::size_t pi = 0; pi < vs.polys.size(); ++pi) {
    const auto& sp = vs.polys[pi];
    const int n = sp.x_hi - sp.x_lo + 1;
    for (int y = sp.y_lo; y <= sp.y_hi; ++y) {
      kernels.polygon_row(sp.poly, sp.x_lo + 0.5, y + 0.5, n, sd.data(), edge.data());
      for (int j = 0; j < n; ++j) {
        const double c = 1.0 / (1.0 + std::exp(-sd[j] / cfg.tau));
        vs.entries[fill[static_cast<std::size_t>(y) * W + sp.x_lo + j]++] =
            Entry{static_cast<int>(pi), edge[j], sd[j], c};
      }
    }
  }

  vs.image = ImageBuffer(W, H, 0.0);
  for (std::size_t p = 0; p + 1 < vs.offset.size(); ++p) {
    double keep = 1.0;
    for (int e = vs.offset[p]; e < vs.offset[p + 1]; ++e) keep *= 1.0 - vs.entries[e].c;
    vs.image.values[p] = 1.0 - keep;
  }
}

}  // namespace

bool project(const Camera& cam, const Vec3& p, double& px, double& py, double near) {
  const CameraBasis b = camera_basis(cam);
  const Vec3 d = p - cam.position;
  const double z = dot(d, b.forward);
  if (!(z >= near)) return false;
  const double f = cam.focal();
  px = 0.5 * cam.width + f * dot(d, b.right) / z;
  py = 0.5 * cam.height - f * dot(d, b.up) / z;
  return true;
}

ImageBuffer render_silhouette(const TriMesh& mesh, const Camera& cam, const RenderConfig& cfg) {
  cfg.validate();
  if (mesh.faces.empty()) throw ArgumentError("render: mesh has no faces");
  mesh.validate();
  ViewState vs;
  build_view(mesh, cam, cfg, vs);
  return std::move(vs.image);
}

RenderLoss render_loss_and_grad(const TriMesh& mesh, const std::vector<Camera>& cams,
                                const std::vector<ImageBuffer>& targets, const RenderConfig& cfg) {
  cfg.validate();
  if (cams.size() != targets.size())
    throw ArgumentError("render_loss_and_grad: camera and target counts differ");
  if (cams.empty()) throw ArgumentError("render_loss_and_grad: no views");
  if (mesh.faces.empty()) throw ArgumentError("render: mesh has no faces");
  mesh.validate();
  for (std::size_t v = 0; v < cams.size(); ++v)
    if (targets[v].width != cams[v].width || targets[v].height != cams[v].height ||
        targets[v].values.size() != static_cast<std::size_t>(cams[v].width) * cams[v].height)
      throw ArgumentError("render_loss_and_grad: target " + std::to_string(v) +
                          " does not match its camera resolution");

  RenderLoss out;
  out.grad.assign(mesh.vertices.size(), Vec3{});
  const double views = static_cast<double>(cams.size());
  ViewState vs;
  std::vector<double> prefix;
  std::vector<std::array<double, 8>> gpoly;  // d loss / d(screen x, y) per polygon vertex
  for (std::size_t v = 0; v < cams.size(); ++v) {
    build_view(mesh, cams[v], cfg, vs);
    const int W = cams[v].width, H = cams[v].height;
    const double pixels = static_cast<double>(W) * H;
    const auto& target = targets[v].values;
    double sum = 0.0;
    for (std::size_t p = 0; p < vs.image.values.size(); ++p) {
      const double r = vs.image.values[p] - target[p];
      sum += r * r;
    }
    out.view_loss.push_back(sum / pixels);
    out.loss += sum / pixels;

    gpoly.assign(vs.polys.size(), std::array<double, 8>{});
    for (std::size_t p = 0; p < vs.image.values.size(); ++p) {
      const double gS = 2.0 * (vs.image.values[p] - target[p]) / (pixels * views);
      if (gS == 0.0) continue;
      const int b = vs.offset[p], e = vs.offset[p + 1];
      if (b == e) continue;
      prefix.resize(e - b + 1);
      prefix[0] = 1.0;
      for (int k = b; k < e; ++k) prefix[k - b + 1] = prefix[k - b] * (1.0 - vs.entries[k].c);
      const double px = static_cast<double>(p % W) + 0.5;
      const double py = static_cast<double>(p / W) + 0.5;
      double suffix = 1.0;
      for (int k = e - 1; k >= b; --k) {
        const Entry& en = vs.entries[k];
        const double others = prefix[k - b] * suffix;
        suffix *= 1.0 - en.c;
        const double g_sd = gS * others * en.c * (1.0 - en.c) / cfg.tau;
        if (g_sd == 0.0) continue;
        const auto& poly = vs.polys[en.poly].poly;
        const int i = en.edge, n = i + 1 == poly.count ? 0 : i + 1;
        const double ex = poly.x[n] - poly.x[i], ey = poly.y[n] - poly.y[i];
        const double rx = px - poly.x[i], ry = py - poly.y[i];
        const double len2 = ex * ex + ey * ey;
        double t = len2 > 0.0 ? (rx * ex + ry * ey) / len2 : 0.0;
        t = std::min(std::max(t, 0.0), 1.0);
        const double dx = rx - t * ex, dy = ry - t * ey;
        const double dist = std::sqrt(dx * dx + dy * dy);
        if (!(dist > 0.0)) continue;
        const double s = (en.sd >= 0.0 ? 1.0 : -1.0) * g_sd / dist;
        auto& g = gpoly[en.poly];
        g[2 * i] -= s * (1.0 - t) * dx;
        g[2 * i + 1] -= s * (1.0 - t) * dy;
        g[2 * n] -= s * t * dx;
        g[2 * n + 1] -= s * t * dy;
      }
    }
    for (std::size_t pi = 0; pi < vs.polys.size(); ++pi) {
      const auto& sp = vs.polys[pi];
      Row9 gw{};
      for (int k = 0; k < sp.poly.count; ++k) {
        const double gx = gpoly[pi][2 * k], gy = gpoly[pi][2 * k + 1];
        if (gx == 0.0 && gy == 0.0) continue;
        for (int c = 0; c < 9; ++c) gw[c] += gx * sp.ds[k][0][c] + gy * sp.ds[k][1][c];
      }
      const auto& tri = mesh.faces[sp.face];
      for (int k = 0; k < 3; ++k) {
        out.grad[tri[k]].x += gw[3 * k];
        out.grad[tri[k]].y += gw[3 * k + 1];
        out.grad[tri[k]].z += gw[3 * k + 2];
      }
    }
  }
  out.loss /= views;
  return out;
}

}  // namespace phir
