#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "helpers.hpp"
#include "phir/fixtures.hpp"
#include "phir/loops.hpp"
#include "phir/metrics.hpp"
#include "phir/optim.hpp"
#include "phir/persistence.hpp"
#include "phir/pipeline.hpp"
#include "phir/render.hpp"

using namespace phir;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs >= limit_s) {
    o.pass = false;
    o.detail += fmt::format("; over time limit {:.0f} s", limit_s);
  }
  if (!o.pass) ++failures;
  std::printf("[%s] criterion %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return {};
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// 1 ---------------------------------------------------------------------------

Outcome persistence_oracle() {
  struct Case {
    const char* name;
    SimplicialComplex cx;
  };
  const SolidFixture ball = make_sphere_solid(0);
  std::vector<Case> cases{{"torus", surface_complex(testing::grid_torus(3))},
                          {"torus4", surface_complex(testing::grid_torus(4))},
                          {"sphere", surface_complex(make_icosahedron())},
                          {"genus2", surface_complex(testing::genus2_connected_sum())},
                          {"ball", ball.interior.complex()}};
  int filtrations = 0, prefixes = 0, mismatches = 0;
  for (const auto& c : cases) {
    if (c.cx.size() > 300) return {false, fmt::format("{} has {} simplices", c.name, c.cx.size())};
    const auto cx = std::make_shared<const SimplicialComplex>(c.cx);
    for (unsigned seed = 0; seed < 5; ++seed) {
      std::mt19937 rng(1000 + seed);
      std::uniform_real_distribution<double> u(0.0, 1.0);
      std::vector<double> key(cx->size());
      // Odd seeds quantize the keys so ties between dimensions occur.
      for (auto& k : key) k = seed % 2 ? std::floor(u(rng) * 4.0) : u(rng);
      const Filtration f = build_filtration(cx, key);
      const Pairing p = pair(f);
      ++filtrations;
      for (std::size_t k = 0; k <= f.size(); ++k) {
        const auto b = prefix_betti(p, f, k, 2);
        const SimplicialComplex prefix = f.prefix_complex(k);
        ++prefixes;
        for (int d = 0; d <= 2; ++d)
          if (b[d] != betti_oracle(prefix, d)) ++mismatches;
      }
    }
  }
  return {mismatches == 0 && filtrations >= 20,
          fmt::format("{} filtrations, {} prefixes, {} mismatches", filtrations, prefixes, mismatches)};
}

// 2 and 3 ---------------------------------------------------------------------

struct GenusCase {
  std::string name;
  int g;
  SolidFixture fx;
};

std::vector<GenusCase> genus_cases() {
  std::vector<GenusCase> v;
  v.push_back({"sphere", 0, make_sphere_solid(1)});
  v.push_back({"torus", 1, make_torus_solid(2.0, 0.6, 8, 16)});
  for (int g = 1; g <= 3; ++g) v.push_back({fmt::format("voxel-g{}", g), g, make_voxel_genus_solid(g, 4 * g + 4)});
  return v;
}

Outcome rank_law() {
  Outcome o;
  for (const auto& c : genus_cases()) {
    const int two_g = betti_oracle(surface_complex(c.fx.surface), 1);
    const LoopReport r = detect_loops(c.fx.surface, c.fx.interior, c.fx.exterior);
    const bool ok = two_g == 2 * c.g && r.surface_generators == 2 * c.g && r.interior_killed == c.g;
    o.pass = o.pass && ok;
    o.detail += fmt::format("{}{}: {} unpaired, {} interior-paired", o.detail.empty() ? "" : "; ", c.name,
                            r.surface_generators, r.interior_killed);
  }
  return o;
}

Outcome loop_classification() {
  Outcome o;
  int checked = 0;
  for (const auto& c : genus_cases()) {
    const LoopReport r = detect_loops(c.fx.surface, c.fx.interior, c.fx.exterior);
    const SimplicialComplex surf = surface_complex(c.fx.surface);
    const SimplicialComplex& in = c.fx.interior.complex();
    const testing::BoundarySpan on_surface(surf), inside(in);
    std::optional<testing::BoundarySpan> outside;
    if (c.fx.exterior) outside.emplace(c.fx.exterior->complex());
    int bad = 0;
    for (const auto& h : r.handles) {
      ++checked;
      if (!surf.boundary(h.edges).empty() || on_surface.contains(h.edges.ids) ||
          !inside.contains(transfer_edges(h.edges, surf, in).ids))
        ++bad;
    }
    for (const auto& t : r.tunnels) {
      ++checked;
      if (!surf.boundary(t.edges).empty() || inside.contains(transfer_edges(t.edges, surf, in).ids)) ++bad;
      if (outside && !outside->contains(transfer_edges(t.edges, surf, c.fx.exterior->complex()).ids)) ++bad;
    }
    const bool counts = static_cast<int>(r.handles.size()) == c.g && static_cast<int>(r.tunnels.size()) == c.g;
    o.pass = o.pass && bad == 0 && counts;
    o.detail += fmt::format("{}{}: {}h/{}t, {} bad", o.detail.empty() ? "" : "; ", c.name, r.handles.size(),
                            r.tunnels.size(), bad);
  }
  o.detail += fmt::format("; {} loops checked", checked);
  return o;
}

// 4 ---------------------------------------------------------------------------

TriMesh jitter(TriMesh m, std::mt19937& rng, double amount) {
  std::uniform_real_distribution<double> u(-amount, amount);
  for (auto& v : m.vertices) v += Vec3{u(rng), u(rng), u(rng)};
  return m;
}

TriMesh soup(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TriMesh m;
  for (int t = 0; t < n; ++t) {
    const Vec3 c{u(rng), u(rng), u(rng)};
    const int base = static_cast<int>(m.vertices.size());
    for (int k = 0; k < 3; ++k) m.vertices.push_back(c + Vec3{u(rng), u(rng), u(rng)} * 0.4);
    m.faces.push_back({base, base + 1, base + 2});
  }
  return m;
}

Outcome renderer_gradients() {
  std::mt19937 rng(4242);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> errs;
  int max_tris = 0;
  for (int s = 0; s < 10; ++s) {
    TriMesh m;
    switch (s % 4) {
      case 0: m = jitter(make_icosphere(1), rng, 0.05); break;
      case 1: m = jitter(make_torus(0.8, 0.3, 6, 10), rng, 0.03); break;
      case 2: m = soup(rng, 40); break;
      default: m = jitter(make_torus(0.8, 0.35, 8, 12), rng, 0.03); break;
    }
    max_tris = std::max(max_tris, static_cast<int>(m.face_count()));
    std::vector<Camera> cams;
    std::vector<ImageBuffer> targets;
    for (int v = 0; v < 2; ++v) {
      const Vec3 dir = normalize(Vec3{u(rng), u(rng), u(rng)});
      Camera c{dir * (3.5 + u(rng)), {u(rng) * 0.1, u(rng) * 0.1, 0.0}, {0, 0, 1}, 40, 32, 32};
      if (std::abs(dir.z) > 0.95) c.up = {1, 0, 0};
      TriMesh other = m;
      for (auto& p : other.vertices) p = p * 1.1 + Vec3{0.05, -0.03, 0.0};
      cams.push_back(c);
      targets.push_back(render_silhouette(other, c));
    }
    const auto e = testing::render_fd_errors(m, cams, targets, RenderConfig{}, 1e-4, 1e-6);
    errs.insert(errs.end(), e.begin(), e.end());
  }
  std::size_t within = 0;
  for (double e : errs) within += e <= 1e-2;
  const double frac = errs.empty() ? 0.0 : static_cast<double>(within) / static_cast<double>(errs.size());
  const double med = testing::median(errs);
  return {frac >= 0.95 && med < 1e-3 && max_tris <= 200 && !errs.empty(),
          fmt::format("{} coordinates, {:.2f}% within 1e-2, median {:.2e}, max {} triangles", errs.size(),
                      100.0 * frac, med, max_tris)};
}

// 5 ---------------------------------------------------------------------------

template <class F>
double max_fd_error(std::vector<Vec3> x, const std::vector<Vec3>& grad, F&& energy, double h) {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (int k = 0; k < 3; ++k) {
      const double v = x[i][k];
      x[i][k] = v + h;
      const double up = energy(x);
      x[i][k] = v - h;
      const double dn = energy(x);
      x[i][k] = v;
      const double fd = (up - dn) / (2 * h);
      const double a = grad[i][k];
      if (a == 0.0 && fd == 0.0) continue;
      worst = std::max(worst, std::abs(a - fd) / std::max(std::abs(a), std::abs(fd)));
    }
  return worst;
}

Outcome energy_terms() {
  const TriMesh m = make_torus(2.0, 0.6, 4, 5);
  const BiLaplacian L = build_bilaplacian(m);
  std::mt19937 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vec3> x(m.vertex_count());
  for (auto& p : x) p = {g(rng), g(rng), g(rng)};
  const double smooth_err =
      max_fd_error(x, smoothness(x, L).grad, [&](const std::vector<Vec3>& y) { return smoothness(y, L).value; }, 1e-5);
  const double constant = smoothness(std::vector<Vec3>(m.vertex_count(), Vec3{0.7, -2.0, 5.0}), L).value;

  const TriMesh ref = make_icosphere(1);
  const double at_ref = inversion_penalty(ref.vertices, ref).value;
  TriMesh tri;
  tri.vertices = {{0, 0, 0}, {1, 0, 0}, {0.3, 0.8, 0}};
  tri.faces = {{0, 1, 2}};
  std::vector<Vec3> mirrored;
  for (const Vec3& v : tri.vertices) mirrored.push_back({-v.x, v.y, v.z});
  const double reflected = inversion_penalty(mirrored, tri).value;

  std::vector<Vec3> y = ref.vertices;
  const Face f = ref.faces[11];
  const Vec3 mid = (y[f[1]] + y[f[2]]) * 0.5;
  y[f[0]] = mid + (mid - y[f[0]]) * 0.2;
  const Energy inv = inversion_penalty(y, ref);
  const double inv_err = max_fd_error(
      y, inv.grad, [&](const std::vector<Vec3>& z) { return inversion_penalty(z, ref).value; }, 1e-6);

  const bool ok = smooth_err < 1e-6 && constant == 0.0 && at_ref == 0.0 && std::abs(reflected - 1.0) < 1e-12 &&
                  inv.value > 0.0 && inv_err < 1e-4;
  return {ok, fmt::format("smoothness FD {:.1e}, constant field {}, inversion at reference {}, reflected face "
                          "{:.15g}, inversion FD {:.1e}",
                          smooth_err, constant, at_ref, reflected, inv_err)};
}

// 6 and 9 ---------------------------------------------------------------------

const fs::path& work_dir() {
  static const fs::path d = [] {
    fs::path p = fs::temp_directory_path() / "phir_acceptance";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return d;
}

fs::path config_path(const char* name) { return fs::path(PHIR_SOURCE_DIR) / "configs" / name; }

double c6_seconds = 0.0;

Outcome directional(const char* config, const char* label) {
  const auto t0 = std::chrono::steady_clock::now();
  const PipelineConfig cfg = load_config(config_path(config).string());
  const PipelineResult r = run_pipeline(cfg, (work_dir() / label).string());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  c6_seconds += secs;
  const StrategyRun& u = r.runs.at(0);
  const StrategyRun& c = r.runs.at(1);
  const int flips = c.result.history.back().flips;
  const bool same_budget = u.cameras.size() == c.cameras.size() &&
                           u.result.history.size() == c.result.history.size();
  const bool ok = same_budget && c.chamfer <= u.chamfer && c.volume_iou >= u.volume_iou && flips == 0 &&
                  secs < 20 * 60;
  return {ok, fmt::format("{}: CD {:.5f} -> {:.5f}, IoU {:.4f} -> {:.4f}, {} views, {} steps, final flips {}",
                          r.model, u.chamfer, c.chamfer, u.volume_iou, c.volume_iou, c.cameras.size(),
                          c.result.history.size() - 1, flips)};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + PHIR_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome reproducible() {
  const fs::path a = work_dir() / "repro_a", b = work_dir() / "repro_b";
  const std::string cfg = "--quiet --config \"" + config_path("genus1.toml").string() + "\" --seed 1 ";
  const int ca = run_cli(cfg + "--out-dir \"" + a.string() + "\" pipeline");
  const int cb = run_cli(cfg + "--out-dir \"" + b.string() + "\" pipeline");
  if (ca != 0 || cb != 0) return {false, fmt::format("pipeline exit codes {} and {}", ca, cb)};
  Outcome o;
  for (const char* f : {"report.csv", "final_uniform.obj", "final_collaborative.obj"}) {
    const std::string x = slurp(a / f), y = slurp(b / f);
    const bool same = !x.empty() && x == y;
    o.pass = o.pass && same;
    o.detail += fmt::format("{}{} {}", o.detail.empty() ? "" : ", ", f, same ? "identical" : "differs");
  }
  return o;
}

// 7 ---------------------------------------------------------------------------

double brute_chamfer(const TriMesh& a, const TriMesh& b, std::size_t n, std::uint64_t seed) {
  const auto pa = sample_surface(a, n, seed);
  const auto pb = sample_surface(b, n, seed);
  auto nearest = [](const std::vector<Vec3>& pts, const Vec3& q) {
    double best = HUGE_VAL;
    for (const Vec3& p : pts) {
      const double dx = p.x - q.x, dy = p.y - q.y, dz = p.z - q.z;
      best = std::min(best, dx * dx + dy * dy + dz * dz);
    }
    return best;
  };
  double sa = 0.0, sb = 0.0;
  for (const auto& p : pa) sa += std::sqrt(nearest(pb, p));
  for (const auto& p : pb) sb += std::sqrt(nearest(pa, p));
  return 0.5 * (sa / static_cast<double>(n) + sb / static_cast<double>(n));
}

Outcome metric_checks() {
  const TriMesh t = make_torus(0.35, 0.1, 12, 24);
  const TriMesh s = make_icosphere(2);
  const double grid = chamfer(t, s, 500, 11), brute = brute_chamfer(t, s, 500, 11);
  const TriMesh a = testing::box_mesh({0, 0, 0}, {1, 1, 1});
  const TriMesh b = testing::box_mesh({0.5, 0, 0}, {1, 1, 1});
  const double iou = volume_iou(a, b, 128);
  const double cd_self = chamfer(t, t, 2000, 3);
  const double iou_self = volume_iou(t, t, 64);
  const bool ok = grid == brute && std::abs(iou - 1.0 / 3.0) <= 0.02 / 3.0 && cd_self == 0.0 && iou_self == 1.0;
  return {ok, fmt::format("grid {:.17g} vs brute {:.17g}, offset cubes IoU {:.5f}, self CD {}, self IoU {}", grid,
                          brute, iou, cd_self, iou_self)};
}

// 8 ---------------------------------------------------------------------------

Outcome rips_cech() {
  std::vector<Vec3> circle;
  for (int i = 0; i < 8; ++i) circle.push_back({std::cos(2 * M_PI * i / 8), std::sin(2 * M_PI * i / 8), 0.0});
  const Filtration f = rips_filtration(circle, 2.5, 2);
  const PersistenceDiagram d = diagram(pair(f), f);
  const std::size_t h1 = d.count(1, true);
  const std::vector<Vec3> tri{{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2.0, 0}};
  const Filtration r = rips_filtration(tri, 3.0, 2), c = cech_filtration(tri, 3.0, 2);
  const int id = r.complex().id_of(Simplex{0, 1, 2});
  const double rv = r.value(id), cv = c.value(c.complex().id_of(Simplex{0, 1, 2}));
  const bool ok = h1 == 1 && std::abs(rv - 1.0) <= 1e-9 && std::abs(cv - 2.0 / std::sqrt(3.0)) <= 1e-9 && cv > rv;
  return {ok, fmt::format("finite H1 points {}, Rips triangle {:.12f}, Cech triangle {:.12f}", h1, rv, cv)};
}

}  // namespace

int main() {
  criterion(1, "persistence oracle equivalence", 60, persistence_oracle);
  criterion(2, "rank law 2g unpaired / g interior-paired", 120, rank_law);
  criterion(3, "loop classification", 120, loop_classification);
  criterion(4, "renderer gradient check", 300, renderer_gradients);
  criterion(5, "energy term checks", 30, energy_terms);
  criterion(6, "directional comparison (genus-1 torus)", 20 * 60, [] { return directional("genus1.toml", "genus1"); });
  criterion(6, "directional comparison (genus-2 voxel)", 20 * 60, [] { return directional("genus2.toml", "genus2"); });
  criterion(7, "metric correctness", 120, metric_checks);
  criterion(8, "Rips/Cech sanity", 10, rips_cech);
  criterion(9, "reproducibility", 2.0 * c6_seconds, reproducible);
  std::printf("%d criteria failed\n", failures);
  fs::remove_all(work_dir());
  return failures == 0 ? 0 : 1;
}
