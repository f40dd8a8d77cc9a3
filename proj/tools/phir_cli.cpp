#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "phir/camera.hpp"
#include "phir/config.hpp"
#include "phir/errors.hpp"
#include "phir/fixtures.hpp"
#include "phir/loops.hpp"
#include "phir/mesh_io.hpp"
#include "phir/metrics.hpp"
#include "phir/optim.hpp"
#include "phir/persistence.hpp"
#include "phir/pipeline.hpp"
#include "phir/render.hpp"

namespace fs = std::filesystem;
using namespace phir;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  bool quiet = false;
};

PipelineConfig effective_config(const Globals& g) {
  PipelineConfig cfg;
  if (!g.config.empty()) {
    if (!fs::exists(g.config)) throw UsageError("config file not found: " + g.config);
    try {
      cfg = load_config(g.config);
    } catch (const ParseError& e) {
      throw UsageError(e.what());
    } catch (const ConfigurationError& e) {
      throw UsageError(e.what());
    }
  }
  if (g.seed) cfg.seed = *g.seed;
  return cfg;
}

fs::path out_path(const Globals& g, const std::string& name) {
  fs::create_directories(g.out_dir);
  return fs::path(g.out_dir) / name;
}

void info(const Globals& g, const std::string& s) {
  if (!g.quiet) std::fprintf(stderr, "%s\n", s.c_str());
}

// Ground truth from --mesh/--interior/--exterior when given, else from config.
SolidFixture ground_truth(const PipelineConfig& cfg, const std::string& mesh,
                          const std::string& interior, const std::string& exterior) {
  if (mesh.empty()) return load_ground_truth(cfg);
  SolidFixture fx;
  fx.name = fs::path(mesh).stem().string();
  fx.surface = load_obj(mesh);
  if (!interior.empty()) fx.interior = load_tetgen(interior + ".node", interior + ".ele");
  if (!exterior.empty()) fx.exterior = load_tetgen(exterior + ".node", exterior + ".ele");
  return fx;
}

std::vector<Vec3> read_points_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read points file: " + path);
  std::vector<Vec3> pts;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    for (char& c : line)
      if (c == ',') c = ' ';
    std::istringstream ls(line);
    Vec3 p;
    if (!(ls >> p.x >> p.y >> p.z)) {
      if (lineno == 1) continue;  // header
      throw ParseError(fmt::format("{}:{}: expected x,y,z", path, lineno));
    }
    pts.push_back(p);
  }
  return pts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Persistent-homology guided multi-view mesh reconstruction"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  std::uint64_t seed_value = 0;
  app.add_option("--config", g.config, "TOML configuration file");
  auto* seed_opt = app.add_option("--seed", seed_value, "Override the configured seed");
  app.add_option("--out-dir", g.out_dir, "Directory for outputs")->capture_default_str();
  app.add_flag("--quiet", g.quiet, "Suppress progress messages");

  // fixture
  auto* fixture = app.add_subcommand("fixture", "Generate a parametric or voxel fixture");
  std::string fx_kind;
  std::string fx_name = "fixture";
  std::optional<int> fx_holes, fx_res;
  fixture->add_option("--kind", fx_kind, "torus | voxel | sphere (default from config)");
  fixture->add_option("--holes", fx_holes, "Voxel fixture hole count");
  fixture->add_option("--resolution", fx_res, "Voxel fixture plate length in cells");
  fixture->add_option("--name", fx_name, "Output file prefix")->capture_default_str();

  // loops
  auto* loops = app.add_subcommand("loops", "Detect handle and tunnel loops");
  std::string lp_mesh, lp_interior, lp_exterior, lp_out = "loops.txt";
  loops->add_option("--mesh", lp_mesh, "Surface OBJ (default: configured fixture)");
  loops->add_option("--interior", lp_interior, "TetGen prefix of the interior complex");
  loops->add_option("--exterior", lp_exterior, "TetGen prefix of the exterior complex");
  loops->add_option("--out", lp_out, "Loop line-set file name")->capture_default_str();

  // cameras
  auto* cameras = app.add_subcommand("cameras", "Emit camera sets as JSON");
  std::string cm_mesh, cm_loops, cm_strategy = "collaborative", cm_out = "cameras.json";
  cameras->add_option("--mesh", cm_mesh, "Surface OBJ the loops refer to");
  cameras->add_option("--loops", cm_loops, "Loop line-set (default: detect on the configured fixture)");
  cameras->add_option("--strategy", cm_strategy, "uniform | guided | collaborative")
      ->check(CLI::IsMember({"uniform", "guided", "collaborative"}))
      ->capture_default_str();
  cameras->add_option("--out", cm_out, "Output JSON file name")->capture_default_str();

  // render
  auto* render = app.add_subcommand("render", "Render soft silhouettes");
  std::string rd_mesh, rd_cams;
  render->add_option("--mesh", rd_mesh, "Mesh OBJ")->required();
  render->add_option("--cameras", rd_cams, "Camera JSON")->required();

  // reconstruct
  auto* recon = app.add_subcommand("reconstruct", "Optimize a mesh against silhouette targets");
  std::string rc_init, rc_cams, rc_targets;
  bool rc_precondition = false;
  recon->add_option("--init", rc_init, "Initial mesh OBJ")->required();
  recon->add_option("--cameras", rc_cams, "Camera JSON")->required();
  recon->add_option("--targets", rc_targets, "Directory of view_NNN.raw targets")->required();
  recon->add_flag("--precondition", rc_precondition, "Large-steps preconditioned baseline mode");

  // eval
  auto* eval = app.add_subcommand("eval", "Chamfer distance and volume IoU between two meshes");
  std::string ev_a, ev_b;
  eval->add_option("--a", ev_a, "Mesh OBJ")->required();
  eval->add_option("--b", ev_b, "Mesh OBJ")->required();

  // pipeline
  app.add_subcommand("pipeline", "Run the full comparison and write a report");

  // rips
  auto* rips = app.add_subcommand("rips", "Persistence diagram of a point cloud");
  std::string rp_points, rp_out;
  double rp_eps = 1.0;
  int rp_dim = 2;
  bool rp_cech = false;
  rips->add_option("--points", rp_points, "CSV of x,y,z rows")->required();
  rips->add_option("--max-eps", rp_eps, "Largest scale")->capture_default_str();
  rips->add_option("--max-dim", rp_dim, "Largest simplex dimension (<= 2)")->capture_default_str();
  rips->add_flag("--cech", rp_cech, "Cech values for triangles instead of Rips");
  rips->add_option("--out", rp_out, "Diagram CSV file name (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  if (*seed_opt) g.seed = seed_value;

  try {
    const PipelineConfig cfg = effective_config(g);

    if (*fixture) {
      PipelineConfig c = cfg;
      if (!fx_kind.empty()) c.fixture.kind = fx_kind;
      if (fx_holes) c.fixture.holes = *fx_holes;
      if (fx_res) c.fixture.resolution = *fx_res;
      c.input = {};
      try {
        c.validate();
      } catch (const ConfigurationError& e) {
        throw UsageError(e.what());
      }
      const SolidFixture fx = load_ground_truth(c);
      save_obj(fx.surface, out_path(g, fx_name + ".obj"));
      save_tetgen(fx.interior, out_path(g, fx_name + "_interior.node"), out_path(g, fx_name + "_interior.ele"));
      if (fx.exterior)
        save_tetgen(*fx.exterior, out_path(g, fx_name + "_exterior.node"),
                    out_path(g, fx_name + "_exterior.ele"));
      info(g, fmt::format("{}: genus {}, {} vertices, {} faces, {} interior tets", fx.name,
                          genus(fx.surface), fx.surface.vertices.size(), fx.surface.faces.size(),
                          fx.interior.tets().size()));
    } else if (*loops) {
      const SolidFixture fx = ground_truth(cfg, lp_mesh, lp_interior, lp_exterior);
      if (fx.interior.tets().empty()) throw UsageError("loops: an interior complex is required (--interior)");
      const LoopReport r = detect_loops(fx.surface, fx.interior, fx.exterior);
      std::ofstream out(out_path(g, lp_out));
      write_loops(r, out);
      std::ofstream js(out_path(g, fs::path(lp_out).replace_extension(".json").string()));
      js << loops_json(r) << '\n';
      info(g, fmt::format("genus {}: {} handle, {} tunnel loops", r.genus, r.handles.size(),
                          r.tunnels.size()));
    } else if (*cameras) {
      SolidFixture fx = ground_truth(cfg, cm_mesh, "", "");
      const CameraLens lens{cfg.cameras.fov, cfg.render.resolution, cfg.render.resolution};
      const Vec3 center = fx.surface.bounds().center();
      std::vector<LoopCycle> tunnels;
      if (cm_strategy != "uniform") {
        if (!cm_loops.empty()) {
          std::ifstream in(cm_loops);
          if (!in) throw UsageError("cannot read loops file: " + cm_loops);
          tunnels = read_loops(in, fx.surface).tunnels;
        } else {
          if (!cm_mesh.empty()) throw UsageError("cameras: --loops is required with --mesh");
          tunnels = detect_loops(fx.surface, fx.interior, fx.exterior).tunnels;
        }
      }
      std::vector<Camera> cams;
      const auto guided = ph_guided_cameras(tunnels, fx.surface, cfg.cameras.per_loop,
                                            cfg.cameras.distance_factor, lens);
      if (cm_strategy == "uniform")
        cams = uniform_sphere_cameras(cfg.cameras.total, cfg.cameras.radius, center, lens);
      else if (cm_strategy == "guided")
        cams = guided;
      else
        cams = budget_collaborative(cfg.cameras.total, guided, cfg.cameras.radius, center, lens,
                                    cfg.cameras.min_angle);
      save_cameras(cams, out_path(g, cm_out).string());
      info(g, fmt::format("{} cameras written", cams.size()));
    } else if (*render) {
      const TriMesh mesh = load_obj(rd_mesh);
      const auto cams = load_cameras(rd_cams);
      RenderConfig rc;
      rc.tau = cfg.render.tau;
      for (std::size_t i = 0; i < cams.size(); ++i) {
        const ImageBuffer img = render_silhouette(mesh, cams[i], rc);
        save_raw(img, out_path(g, fmt::format("view_{:03d}.raw", i)).string());
        save_png(img, out_path(g, fmt::format("view_{:03d}.png", i)).string());
      }
      info(g, fmt::format("{} views rendered", cams.size()));
    } else if (*recon) {
      const TriMesh init = load_obj(rc_init);
      const auto cams = load_cameras(rc_cams);
      std::vector<ImageBuffer> targets;
      for (std::size_t i = 0; i < cams.size(); ++i)
        targets.push_back(load_raw((fs::path(rc_targets) / fmt::format("view_{:03d}.raw", i)).string()));
      OptimConfig oc;
      oc.w1 = cfg.optimize.w1;
      oc.w2 = cfg.optimize.w2;
      oc.lr = cfg.optimize.lr;
      oc.steps = cfg.optimize.steps;
      oc.lambda = cfg.optimize.lambda;
      oc.precondition = rc_precondition || cfg.optimize.precondition;
      oc.render.tau = cfg.render.tau;
      oc.checkpoint_every = cfg.optimize.checkpoint_every;
      oc.on_checkpoint = [&](int step, const TriMesh& m) {
        save_obj(m, out_path(g, fmt::format("checkpoint_step{:05d}.obj", step)));
      };
      const OptimResult r = optimize(init, cams, targets, oc);
      for (const auto& w : r.warnings) info(g, "warning: " + w);
      save_obj(r.mesh, out_path(g, "reconstructed.obj"));
      std::ofstream loss(out_path(g, "loss.csv"));
      write_loss_csv(r.history, loss);
      info(g, fmt::format("phi {:.6g} -> {:.6g}, flips {}", r.history.front().phi,
                          r.history.back().phi, r.history.back().flips));
    } else if (*eval) {
      const TriMesh a = load_obj(ev_a), b = load_obj(ev_b);
      const double cd = chamfer(a, b, static_cast<std::size_t>(cfg.metrics.samples), cfg.seed);
      const double iou = volume_iou(a, b, cfg.metrics.grid_res);
      std::printf("chamfer,volume_iou\n%.9g,%.9g\n", cd, iou);
    } else if (app.got_subcommand("pipeline")) {
      const PipelineResult r = run_pipeline(cfg, g.out_dir, [&](const std::string& s) { info(g, s); });
      if (!g.quiet) std::printf("%s", report_markdown(r.report).c_str());
    } else if (*rips) {
      if (rp_dim < 0 || rp_dim > 2) throw UsageError("--max-dim must be in [0, 2]");
      const auto pts = read_points_csv(rp_points);
      const Filtration f = rp_cech ? cech_filtration(pts, rp_eps, rp_dim) : rips_filtration(pts, rp_eps, rp_dim);
      const PersistenceDiagram d = diagram(pair(f), f);
      if (rp_out.empty()) {
        write_diagram_csv(d, std::cout);
      } else {
        std::ofstream out(out_path(g, rp_out));
        write_diagram_csv(d, out);
      }
    }
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
