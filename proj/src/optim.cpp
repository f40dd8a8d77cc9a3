#include "phir/optim.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include <Eigen/IterativeLinearSolvers>

#include "phir/errors.hpp"
#include "phir/simd/kernels.hpp"

namespace phir {

BiLaplacian build_bilaplacian(const TriMesh& mesh) {
  EdgeTopology topo(mesh);
  const int n = static_cast<int>(mesh.vertices.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(topo.edges.size() * 2 + n);
  for (const auto& e : topo.edges) {
    trip.emplace_back(e[0], e[1], -1.0);
    trip.emplace_back(e[1], e[0], -1.0);
  }
  for (int v = 0; v < n; ++v)
    trip.emplace_back(v, v, static_cast<double>(topo.vertex_neighbors[v].size()));
  BiLaplacian L;
  L.graph.resize(n, n);
  L.graph.setFromTriplets(trip.begin(), trip.end());
  L.matrix = (L.graph * L.graph).pruned();
  return L;
}

namespace {

void check_shape(std::span<const Vec3> x, const TriMesh& reference) {
  if (x.size() != reference.vertices.size())
    throw ArgumentError("vertex count does not match the reference mesh");
}

struct RefFace {
  double a, b, d;  // reference edge matrix [[a, b], [0, d]]
  double area2;    // |e1 x e2|
  Vec3 normal;
};

RefFace reference_face(const TriMesh& ref, int f) {
  const auto& t = ref.faces[f];
  const Vec3 e1 = ref.vertices[t[1]] - ref.vertices[t[0]];
  const Vec3 e2 = ref.vertices[t[2]] - ref.vertices[t[0]];
  const Vec3 c = cross(e1, e2);
  RefFace r;
  r.area2 = norm(c);
  if (!(r.area2 > 0.0))
    throw ConfigurationError("reference face " + std::to_string(f) + " has zero area");
  r.normal = c / r.area2;
  const Vec3 u = normalize(e1);
  const Vec3 w = cross(r.normal, u);
  r.a = norm(e1);
  r.b = dot(e2, u);
  r.d = dot(e2, w);
  return r;
}

}  // namespace

Energy smoothness(std::span<const Vec3> x, const BiLaplacian& L) {
  if (static_cast<Eigen::Index>(x.size()) != L.graph.rows())
    throw ArgumentError("smoothness: vertex count does not match the bi-Laplacian");
  // x^T (G G) x = |G x|^2 with G x summed as neighbor differences, so
  // constant fields give exactly zero.
  auto apply = [&](std::span<const Vec3> in) {
    std::vector<Vec3> out(in.size());
    for (Eigen::Index k = 0; k < L.graph.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(L.graph, k); it; ++it)
        if (it.row() != it.col()) out[it.row()] += (in[it.row()] - in[it.col()]) * -it.value();
    return out;
  };
  const std::vector<Vec3> gx = apply(x);
  Energy e;
  for (const Vec3& v : gx) e.value += dot(v, v);
  e.grad = apply(gx);
  for (Vec3& g : e.grad) g *= 2.0;
  return e;
}

std::vector<FaceJacobian> face_jacobians(std::span<const Vec3> x, const TriMesh& reference) {
  check_shape(x, reference);
  std::vector<FaceJacobian> out(reference.faces.size());
  for (std::size_t f = 0; f < reference.faces.size(); ++f) {
    const RefFace r = reference_face(reference, static_cast<int>(f));
    const auto& t = reference.faces[f];
    const Vec3 e1 = x[t[1]] - x[t[0]];
    const Vec3 e2 = x[t[2]] - x[t[0]];
    const Vec3 c = cross(e1, e2);
    const double len1 = norm(e1);
    FaceJacobian J;
    if (len1 > 0.0) {
      const double cn = norm(c);
      const double s = dot(r.normal, c) >= 0.0 ? 1.0 : -1.0;
      const Vec3 nf = cn > 0.0 ? c * (s / cn) : r.normal;
      const Vec3 U = e1 / len1;
      const Vec3 Wd = cross(nf, U);
      const double E00 = len1, E01 = dot(e2, U), E11 = dot(e2, Wd);
      J.m = {E00 / r.a, E01 / r.d - E00 * r.b / (r.a * r.d), 0.0, E11 / r.d};
    }
    out[f] = J;
  }
  return out;
}

Energy inversion_penalty(std::span<const Vec3> x, const TriMesh& reference) {
  check_shape(x, reference);
  Energy e;
  e.grad.assign(x.size(), Vec3{});
  for (std::size_t f = 0; f < reference.faces.size(); ++f) {
    const RefFace r = reference_face(reference, static_cast<int>(f));
    const auto& t = reference.faces[f];
    const Vec3 c = cross(x[t[1]] - x[t[0]], x[t[2]] - x[t[0]]);
    const double cn = norm(c);
    if (dot(r.normal, c) >= 0.0 || !(cn > 0.0)) continue;
    const double det = -cn / r.area2;
    e.value += det * det;
    const Vec3 nh = c / cn;
    const double g = 2.0 * det * (-1.0 / r.area2);
    e.grad[t[0]] += cross(x[t[1]] - x[t[2]], nh) * g;
    e.grad[t[1]] += cross(x[t[2]] - x[t[0]], nh) * g;
    e.grad[t[2]] += cross(x[t[0]] - x[t[1]], nh) * g;
  }
  return e;
}

int count_flips(std::span<const Vec3> x, const TriMesh& reference) {
  int flips = 0;
  for (const auto& J : face_jacobians(x, reference))
    if (J.det() <= 0.0) ++flips;
  return flips;
}

void adam_step(AdamState& state, std::span<const double> grad, std::span<double> params) {
  if (grad.size() != params.size()) throw ArgumentError("adam_step: grad/params size mismatch");
  if (state.m.empty()) state.m.assign(params.size(), 0.0);
  if (state.v.empty()) state.v.assign(params.size(), 0.0);
  if (state.m.size() != params.size() || state.v.size() != params.size())
    throw ArgumentError("adam_step: state size mismatch");
  ++state.t;
  simd::AdamParams p{state.lr, state.beta1, state.beta2, state.eps,
                     1.0 - std::pow(state.beta1, static_cast<double>(state.t)),
                     1.0 - std::pow(state.beta2, static_cast<double>(state.t))};
  simd::active().adam(p, grad.data(), state.m.data(), state.v.data(), params.data(), params.size());
}

OptimResult optimize(const TriMesh& mesh0, const std::vector<Camera>& cams,
                     const std::vector<ImageBuffer>& targets, const OptimConfig& cfg) {
  if (cfg.steps < 0) throw ArgumentError("optimize: steps must be >= 0");
  if (cfg.w1 < 0.0 || cfg.w2 < 0.0) throw ArgumentError("optimize: weights must be >= 0");
  OptimResult res;
  res.mesh = mesh0;
  if (cfg.target_genus) {
    const int g = genus(mesh0);
    if (g != *cfg.target_genus)
      res.warnings.push_back("initial mesh genus " + std::to_string(g) +
                             " differs from target genus " + std::to_string(*cfg.target_genus));
  }
  const BiLaplacian L = build_bilaplacian(mesh0);
  std::optional<Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper>> cg;
  Eigen::SparseMatrix<double> A;
  if (cfg.precondition) {
    A.resize(L.graph.rows(), L.graph.cols());
    A.setIdentity();
    A += cfg.lambda * L.graph;
    cg.emplace();
    cg->setTolerance(1e-8);
    cg->setMaxIterations(500);
    cg->compute(A);
  }

  const std::size_t n = mesh0.vertices.size();
  AdamState adam;
  adam.lr = cfg.lr;
  std::vector<double> params(3 * n), grad(3 * n);
  for (std::size_t i = 0; i < n; ++i)
    for (int k = 0; k < 3; ++k) params[3 * i + k] = mesh0.vertices[i][k];

  for (int step = 0;; ++step) {
    for (std::size_t i = 0; i < n; ++i)
      res.mesh.vertices[i] = {params[3 * i], params[3 * i + 1], params[3 * i + 2]};
    RenderLoss rl = render_loss_and_grad(res.mesh, cams, targets, cfg.render);
    const Energy sm = smoothness(res.mesh.vertices, L);
    const Energy inv = inversion_penalty(res.mesh.vertices, mesh0);
    LossBreakdown lb;
    lb.phi = rl.loss;
    lb.smooth = sm.value;
    lb.inversion = inv.value;
    lb.w1 = cfg.w1;
    lb.w2 = cfg.w2;
    lb.total = lb.phi + cfg.w1 * lb.smooth + cfg.w2 * lb.inversion;
    lb.flips = count_flips(res.mesh.vertices, mesh0);
    res.history.push_back(lb);
    if (step > 0 && cfg.on_checkpoint &&
        ((cfg.checkpoint_every > 0 && step % cfg.checkpoint_every == 0) || step == cfg.steps))
      cfg.on_checkpoint(step, res.mesh);
    if (step == cfg.steps) break;

    if (cg) {
      Eigen::VectorXd b(n), y;
      for (int k = 0; k < 3; ++k) {
        for (std::size_t i = 0; i < n; ++i) b(i) = rl.grad[i][k];
        y = cg->solve(b);
        for (std::size_t i = 0; i < n; ++i) rl.grad[i][k] = y(i);
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      for (int k = 0; k < 3; ++k)
        grad[3 * i + k] = rl.grad[i][k] + cfg.w1 * sm.grad[i][k] + cfg.w2 * inv.grad[i][k];
    adam_step(adam, grad, params);
  }
  return res;
}

void write_loss_csv(const std::vector<LossBreakdown>& history, std::ostream& out) {
  out << "step,phi,smooth,inversion,total,flips\n";
  char buf[256];
  for (std::size_t s = 0; s < history.size(); ++s) {
    const auto& h = history[s];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%d\n", s, h.phi, h.smooth,
                  h.inversion, h.total, h.flips);
    out << buf;
  }
}

}  // namespace phir
