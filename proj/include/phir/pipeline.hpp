#pragma once

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "phir/camera.hpp"
#include "phir/config.hpp"
#include "phir/fixtures.hpp"
#include "phir/loops.hpp"
#include "phir/optim.hpp"

namespace phir {

// Failure inside one pipeline stage; what() is prefixed with the stage.
struct StageError : std::runtime_error {
  StageError(std::string stage_name, const std::string& message)
      : std::runtime_error(stage_name + ": " + message), stage(std::move(stage_name)) {}
  std::string stage;
};

struct MetricsRow {
  std::string model;
  std::string strategy;  // uniform | collaborative
  double chamfer = 0.0;
  double volume_iou = 0.0;
};

struct MetricsReport {
  std::vector<MetricsRow> rows;
};

// `model,cd_uniform,cd_collaborative,iou_uniform,iou_collaborative`, one
// line per model.
void write_report_csv(const MetricsReport& report, std::ostream& out);
std::string report_markdown(const MetricsReport& report);

// Generated fixture or files named in [input], normalized to the unit box.
SolidFixture load_ground_truth(const PipelineConfig& cfg);

// Guided cameras merged with a uniform set grown until the merged set
// holds exactly `total` cameras (trailing uniform cameras are trimmed when
// a lattice size overshoots).
std::vector<Camera> budget_collaborative(int total, const std::vector<Camera>& guided,
                                         double radius, const Vec3& center, const CameraLens& lens,
                                         double min_angle);

struct StrategyRun {
  std::string strategy;
  std::vector<Camera> cameras;
  OptimResult result;
  double chamfer = 0.0;
  double volume_iou = 0.0;
};

struct PipelineResult {
  std::string model;
  SolidFixture ground_truth;
  TriMesh initial;
  LoopReport loops;
  std::vector<StrategyRun> runs;
  MetricsReport report;
};

// Runs every stage; writes artifacts under out_dir unless it is empty.
PipelineResult run_pipeline(const PipelineConfig& cfg, const std::string& out_dir,
                            const std::function<void(const std::string&)>& log = {});

}  // namespace phir
