#include "phir/pipeline.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "phir/errors.hpp"
#include "phir/mesh_io.hpp"
#include "phir/metrics.hpp"
#include "phir/render.hpp"

namespace phir {

namespace fs = std::filesystem;

void write_report_csv(const MetricsReport& report, std::ostream& out) {
  out << "model,cd_uniform,cd_collaborative,iou_uniform,iou_collaborative\n";
  std::vector<std::string> order;
  std::map<std::string, std::map<std::string, MetricsRow>> by_model;
  for (const auto& r : report.rows) {
    if (!by_model.count(r.model)) order.push_back(r.model);
    by_model[r.model][r.strategy] = r;
  }
  for (const auto& m : order) {
    auto& s = by_model[m];
    out << fmt::format("{},{:.9g},{:.9g},{:.9g},{:.9g}\n", m, s["uniform"].chamfer,
                       s["collaborative"].chamfer, s["uniform"].volume_iou,
                       s["collaborative"].volume_iou);
  }
}

std::string report_markdown(const MetricsReport& report) {
  std::ostringstream csv;
  write_report_csv(report, csv);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  std::string md =
      "| Model | CD ↓ uniform | CD ↓ collaborative | IoU ↑ uniform | IoU ↑ collaborative |\n"
      "|---|---|---|---|---|\n";
  while (std::getline(in, line)) {
    std::string cell;
    std::istringstream ls(line);
    md += "|";
    while (std::getline(ls, cell, ',')) md += " " + cell + " |";
    md += "\n";
  }
  return md;
}

SolidFixture load_ground_truth(const PipelineConfig& cfg) {
  SolidFixture fx;
  if (!cfg.input.mesh.empty()) {
    fx.surface = load_obj(cfg.input.mesh);
    fx.name = cfg.input.name.empty() ? fs::path(cfg.input.mesh).stem().string() : cfg.input.name;
    if (!cfg.input.interior.empty())
      fx.interior = load_tetgen(cfg.input.interior + ".node", cfg.input.interior + ".ele");
    if (!cfg.input.exterior.empty())
      fx.exterior = load_tetgen(cfg.input.exterior + ".node", cfg.input.exterior + ".ele");
  } else if (cfg.fixture.kind == "torus") {
    fx = make_torus_solid(cfg.fixture.major_radius, cfg.fixture.minor_radius, cfg.fixture.nu,
                          cfg.fixture.nv);
    fx.name = "torus-genus1";
  } else if (cfg.fixture.kind == "voxel") {
    fx = make_voxel_genus_solid(cfg.fixture.holes, cfg.fixture.resolution);
  } else if (cfg.fixture.kind == "sphere") {
    fx = make_sphere_solid(cfg.fixture.sphere_levels);
    fx.name = "sphere-genus0";
  } else {
    throw ConfigurationError("unknown fixture kind " + cfg.fixture.kind);
  }
  auto [unit, t] = normalize_unit_box(fx.surface);
  (void)unit;
  return transform_fixture(fx, t);
}

std::vector<Camera> budget_collaborative(int total, const std::vector<Camera>& guided,
                                         double radius, const Vec3& center, const CameraLens& lens,
                                         double min_angle) {
  if (total < 1) throw ArgumentError("camera budget must be >= 1");
  if (static_cast<int>(guided.size()) >= total)
    return {guided.begin(), guided.begin() + total};
  const int start = total - static_cast<int>(guided.size());
  for (int n = start; n <= 8 * total; ++n) {
    auto merged = merge_collaborative(uniform_sphere_cameras(n, radius, center, lens), guided, min_angle);
    if (static_cast<int>(merged.size()) >= total) {
      merged.resize(total);
      return merged;
    }
  }
  throw ConfigurationError("cannot fill the camera budget; min_angle too large");
}

namespace {

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg, const std::string& out_dir,
                            const std::function<void(const std::string&)>& log) {
  auto say = [&](const std::string& s) {
    if (log) log(s);
  };
  cfg.validate();
  const bool write = !out_dir.empty();
  const fs::path root(out_dir);
  if (write) stage("output", [&] {
      fs::create_directories(root / "checkpoints");
      fs::create_directories(root / "previews");
      write_text(root / "config.toml", config_toml(cfg));
      return 0;
    });

  PipelineResult res;
  res.ground_truth = stage("fixture", [&] { return load_ground_truth(cfg); });
  res.model = res.ground_truth.name;
  const TriMesh& gt = res.ground_truth.surface;
  say(fmt::format("fixture {}: {} vertices, {} faces", res.model, gt.vertices.size(), gt.faces.size()));

  res.loops = stage("loops", [&] {
    if (res.ground_truth.interior.tets().empty()) {
      LoopReport r;
      r.genus = genus(gt);
      r.notes.push_back("no interior complex; loop detection skipped");
      return r;
    }
    return detect_loops(gt, res.ground_truth.interior, res.ground_truth.exterior);
  });
  say(fmt::format("loops: genus {}, {} handles, {} tunnels", res.loops.genus,
                  res.loops.handles.size(), res.loops.tunnels.size()));

  const Vec3 center{0.5, 0.5, 0.5};
  const CameraLens lens{cfg.cameras.fov, cfg.render.resolution, cfg.render.resolution};
  std::vector<Camera> uniform, collaborative;
  stage("cameras", [&] {
    uniform = uniform_sphere_cameras(cfg.cameras.total, cfg.cameras.radius, center, lens);
    const auto guided = ph_guided_cameras(res.loops.tunnels, gt, cfg.cameras.per_loop,
                                          cfg.cameras.distance_factor, lens);
    collaborative = budget_collaborative(cfg.cameras.total, guided, cfg.cameras.radius, center, lens,
                                         cfg.cameras.min_angle);
    say(fmt::format("cameras: {} uniform, {} collaborative ({} guided)", uniform.size(),
                    collaborative.size(), std::min(guided.size(), collaborative.size())));
    return 0;
  });

  RenderConfig rcfg;
  rcfg.tau = cfg.render.tau;
  res.initial = laplacian_smooth(gt, cfg.optimize.smooth_rounds);

  if (write) stage("output", [&] {
      save_obj(gt, root / "ground_truth.obj");
      save_obj(res.initial, root / "initial.obj");
      std::ostringstream lines;
      write_loops(res.loops, lines);
      write_text(root / "loops.txt", lines.str());
      write_text(root / "loops.json", loops_json(res.loops) + "\n");
      save_cameras(uniform, (root / "cameras_uniform.json").string());
      save_cameras(collaborative, (root / "cameras_collaborative.json").string());
      return 0;
    });

  for (const auto& [name, cams] : {std::pair<std::string, const std::vector<Camera>*>{"uniform", &uniform},
                                   {"collaborative", &collaborative}}) {
    StrategyRun run;
    run.strategy = name;
    run.cameras = *cams;
    const auto targets = stage("render", [&] {
      std::vector<ImageBuffer> t;
      for (const auto& c : run.cameras) t.push_back(render_silhouette(gt, c, rcfg));
      return t;
    });
    OptimConfig ocfg;
    ocfg.w1 = cfg.optimize.w1;
    ocfg.w2 = cfg.optimize.w2;
    ocfg.lr = cfg.optimize.lr;
    ocfg.steps = cfg.optimize.steps;
    ocfg.precondition = cfg.optimize.precondition;
    ocfg.lambda = cfg.optimize.lambda;
    ocfg.render = rcfg;
    ocfg.checkpoint_every = cfg.optimize.checkpoint_every;
    ocfg.target_genus = res.loops.genus;
    if (write)
      ocfg.on_checkpoint = [&, name = name](int step, const TriMesh& m) {
        save_obj(m, root / "checkpoints" / fmt::format("{}_step{:05d}.obj", name, step));
      };
    run.result = stage("optimize", [&] { return optimize(res.initial, run.cameras, targets, ocfg); });
    for (const auto& w : run.result.warnings) say("warning: " + w);
    const auto& h = run.result.history;
    say(fmt::format("{}: phi {:.6g} -> {:.6g}, flips {}", name, h.front().phi, h.back().phi,
                    h.back().flips));
    stage("metrics", [&] {
      run.chamfer = chamfer(run.result.mesh, gt, static_cast<std::size_t>(cfg.metrics.samples), cfg.seed);
      run.volume_iou = volume_iou(run.result.mesh, gt, cfg.metrics.grid_res);
      return 0;
    });
    say(fmt::format("{}: CD {:.6g}, IoU {:.6g}", name, run.chamfer, run.volume_iou));
    res.report.rows.push_back({res.model, name, run.chamfer, run.volume_iou});

    if (write) stage("output", [&] {
        save_obj(run.result.mesh, root / fmt::format("final_{}.obj", name));
        std::ostringstream loss;
        write_loss_csv(run.result.history, loss);
        write_text(root / fmt::format("loss_{}.csv", name), loss.str());
        if (!run.cameras.empty()) {
          Camera preview = run.cameras.front();
          preview.width = preview.height = cfg.render.preview_resolution;
          save_png(render_silhouette(gt, preview, rcfg), (root / "previews" / fmt::format("{}_target.png", name)).string());
          save_png(render_silhouette(run.result.mesh, preview, rcfg),
                   (root / "previews" / fmt::format("{}_final.png", name)).string());
        }
        return 0;
      });
    res.runs.push_back(std::move(run));
  }

  if (write) stage("output", [&] {
      std::ostringstream csv;
      write_report_csv(res.report, csv);
      write_text(root / "report.csv", csv.str());
      write_text(root / "report.md", report_markdown(res.report));
      return 0;
    });
  return res;
}

}  // namespace phir
